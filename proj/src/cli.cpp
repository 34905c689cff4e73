#include "mge/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <iomanip>
#include <map>

#include "mge/config.hpp"
#include "mge/eval.hpp"
#include "mge/lexicon.hpp"
#include "mge/neighborhood.hpp"
#include "mge/trainer.hpp"
#include "mge/vocabulary.hpp"

namespace mge::cli {
namespace {

std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

void print_reader_stats(std::ostream& out, const std::string& id, const ReaderStats& s) {
  out << "stream " << id << ": lines " << s.lines_read << ", units " << s.units_emitted << ", warnings "
      << s.warnings << '\n';
  out << "#= stream " << id << ' ' << s.lines_read << ' ' << s.units_emitted << ' ' << s.warnings << '\n';
}

Vocabulary vocabulary_for(const std::vector<const StreamSource*>& streams, std::uint64_t min_count, std::ostream& out) {
  std::vector<std::unique_ptr<UnitReader>> owned;
  std::vector<UnitReader*> readers;
  for (const auto* s : streams) {
    owned.push_back(s->open());
    readers.push_back(owned.back().get());
  }
  Vocabulary vocab = build_vocabulary(std::span<UnitReader* const>(readers), min_count);
  for (std::size_t i = 0; i < streams.size(); ++i) print_reader_stats(out, streams[i]->id, owned[i]->stats());
  return vocab;
}

struct TrainArgs {
  std::string config;
  std::vector<std::string> sets;
};

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load_run_config(args.config, parse_overrides(args.sets));
  const CompositeSpec composite = validate_run_config(cfg);

  std::vector<const StreamSource*> used;
  for (const auto& part : composite.parts) {
    const StreamSource* s = cfg.stream(part.stream_id);
    if (std::find(used.begin(), used.end(), s) == used.end()) used.push_back(s);
  }
  const Vocabulary vocab = vocabulary_for(used, cfg.min_count, out);
  out << "vocabulary size: " << vocab.size() << " (" << vocab.total_tokens() << " tokens)\n";

  std::vector<StreamSource> sources;
  for (const auto* s : used) sources.push_back(*s);
  if (cfg.train.progress_interval_s == 0) cfg.train.progress_interval_s = 10;
  TrainStats stats;
  const EmbeddingModel model = train(composite, sources, vocab, cfg.train, &stats);
  if (!model.all_finite()) {
    err << "error: training diverged (non-finite values)\n";
    return kExitData;
  }
  EmbeddingStore::from_model(model, vocab).save(cfg.output, cfg.format);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "model: " << composite.render() << '\n'
      << "pairs per epoch: " << stats.pairs_per_epoch << '\n'
      << "total pairs: " << stats.pairs_trained << '\n'
      << "final lr: " << stats.final_lr << '\n'
      << "wall time: " << std::fixed << std::setprecision(2) << wall << " s\n"
      << std::defaultfloat;
  out << "#= vocab_size " << vocab.size() << '\n'
      << "#= total_pairs " << stats.pairs_trained << '\n'
      << "#= final_lr " << stats.final_lr << '\n'
      << "#= wall_time_s " << wall << '\n'
      << "#= output " << cfg.output.string() << '\n';
  return kExitOk;
}

struct VocabArgs {
  std::string config;
  std::vector<std::string> streams;
  std::uint64_t min_count = 0;
  std::string out_path;
  std::size_t top = 10;
};

int cmd_vocab(const VocabArgs& args, std::ostream& out) {
  const RunConfig cfg = load_run_config(args.config);
  std::vector<const StreamSource*> chosen;
  if (args.streams.empty()) {
    for (const auto& s : cfg.streams) chosen.push_back(&s);
  } else {
    for (const auto& id : args.streams) {
      const StreamSource* s = cfg.stream(id);
      if (!s) throw ConfigError("--stream: '" + id + "' is not declared");
      chosen.push_back(s);
    }
  }
  if (chosen.empty()) throw ConfigError("config declares no streams");
  const Vocabulary vocab = vocabulary_for(chosen, args.min_count ? args.min_count : cfg.min_count, out);
  std::map<std::string, std::pair<std::size_t, std::uint64_t>> per_lang;
  for (const auto& e : vocab.entries()) {
    auto& slot = per_lang[e.word.lang.str()];
    ++slot.first;
    slot.second += e.count;
  }
  out << "types: " << vocab.size() << "  tokens: " << vocab.total_tokens() << '\n';
  for (const auto& [lang, v] : per_lang)
    out << "  " << lang << ": " << v.first << " types, " << v.second << " retained tokens\n";
  for (std::size_t i = 0; i < std::min(args.top, vocab.size()); ++i)
    out << "  " << std::setw(6) << i << "  " << vocab.word(static_cast<WordId>(i)).key() << "  "
        << vocab.count(static_cast<WordId>(i)) << '\n';
  out << "#= types " << vocab.size() << "\n#= tokens " << vocab.total_tokens() << '\n';
  if (!args.out_path.empty()) vocab.save(args.out_path);
  return kExitOk;
}

struct EvalArgs {
  std::string model, dataset, task, lang, src_lang;
  int resamples = kBootstrapResamples;
  std::uint64_t seed = 1;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  if (args.lang.empty()) throw ConfigError("--lang is required");
  const LanguageCode lang(args.lang);
  // Load the dataset first so a missing dataset fails before the (larger) model load.
  EvalReport report;
  EvalOptions opt{args.resamples, args.seed};
  if (args.task == "analogy") {
    auto ds = load_analogy(args.dataset, lang);
    report = eval_analogy(EmbeddingStore::load(args.model), ds, opt);
  } else if (args.task == "similarity") {
    auto ds = load_similarity(args.dataset, lang);
    report = eval_similarity(EmbeddingStore::load(args.model), ds, opt);
  } else if (args.task == "translation") {
    if (args.src_lang.empty()) throw ConfigError("--src-lang is required for translation");
    auto ds = load_translation(args.dataset, LanguageCode(args.src_lang), lang);
    report = eval_translation(EmbeddingStore::load(args.model), ds, opt);
  } else {
    throw ConfigError("--task must be analogy, similarity or translation");
  }
  print_table(out, std::span<const EvalReport>(&report, 1));
  print_machine(out, report);
  return kExitOk;
}

struct NnArgs {
  std::string model, word, lang;
  std::size_t k = 10;
};

int cmd_nn(const NnArgs& args, std::ostream& out) {
  const EmbeddingStore store = EmbeddingStore::load(args.model);
  const TaggedWord w = TaggedWord::parse(args.word);
  const std::size_t i = store.require(w);
  KnnQuery q;
  q.k = args.k;
  if (!args.lang.empty()) q.lang = LanguageCode(args.lang);
  q.exclude = {i};
  for (const auto& nb : knn(store, vector_of(store, w), q))
    out << store.word(nb.index).key() << ' ' << std::setprecision(6) << nb.cosine << '\n';
  return kExitOk;
}

struct InduceArgs {
  std::string model, parallel_vocab, mono_vocab, tgt_lang, out_path;
  std::uint64_t min_count = 100;
  double threshold = 0.3;
  std::size_t k_best = 1;
};

int cmd_induce(const InduceArgs& args, std::ostream& out, std::ostream& err) {
  PoovCriteria criteria;
  criteria.min_mono_count = args.min_count;
  criteria.cosine_threshold = args.threshold;
  criteria.tgt_lang = LanguageCode(args.tgt_lang);
  criteria.validate();
  const Vocabulary parallel = Vocabulary::load(args.parallel_vocab);
  const Vocabulary mono = Vocabulary::load(args.mono_vocab);
  const EmbeddingStore store = EmbeddingStore::load(args.model);
  const auto poovs = find_poovs(parallel, mono, criteria);
  InduceStats stats;
  const auto entries = induce(store, poovs, criteria, args.k_best, &stats);
  export_phrase_table(entries, args.out_path);
  err << stats.induced << "/" << stats.candidates << "/" << stats.skipped << " induced/candidates/skipped\n";
  out << "#= induced " << stats.induced << "\n#= candidates " << stats.candidates << "\n#= skipped "
      << stats.skipped << "\n#= entries " << entries.size() << '\n';
  return kExitOk;
}

struct GraphArgs {
  std::string src, tgt, align, src_deps, tgt_deps, src_lang, tgt_lang, model;
  std::vector<std::string> queries;
};

std::vector<DepArc> parse_arcs(const std::string& text, std::size_t n, const char* flag) {
  std::vector<DepArc> arcs;
  for (auto tok : split_whitespace(text)) {
    auto dash = tok.find('-');
    int h = -1, d = -1;
    if (dash == std::string_view::npos ||
        std::from_chars(tok.data(), tok.data() + dash, h).ec != std::errc{} ||
        std::from_chars(tok.data() + dash + 1, tok.data() + tok.size(), d).ec != std::errc{} || h < 0 || d < 0 ||
        static_cast<std::size_t>(h) >= n || static_cast<std::size_t>(d) >= n || h == d)
      throw ConfigError(std::string(flag) + ": bad arc '" + std::string(tok) + "'");
    arcs.push_back({h, d});
  }
  return arcs;
}

int cmd_graph_debug(const GraphArgs& args, std::ostream& out) {
  const ModelSpec spec = [&] {
    try {
      return parse_spec(args.model);
    } catch (const SpecParseError& e) {
      throw ConfigError(std::string("--model: ") + e.what());
    }
  }();
  TrainingUnit unit;
  const LanguageCode src_lang(args.src_lang);
  for (auto tok : split_whitespace(args.src)) unit.src.tokens.emplace_back(std::string(tok), src_lang);
  if (unit.src.tokens.empty()) throw ConfigError("--src is empty");
  unit.src.deps = parse_arcs(args.src_deps, unit.src.size(), "--src-deps");
  if (!args.tgt.empty()) {
    const LanguageCode tgt_lang(args.tgt_lang);
    Sentence tgt;
    for (auto tok : split_whitespace(args.tgt)) tgt.tokens.emplace_back(std::string(tok), tgt_lang);
    tgt.deps = parse_arcs(args.tgt_deps, tgt.size(), "--tgt-deps");
    unit.tgt = std::move(tgt);
    for (auto tok : split_whitespace(args.align)) {
      auto dash = tok.find('-');
      int i = -1, j = -1;
      if (dash == std::string_view::npos ||
          std::from_chars(tok.data(), tok.data() + dash, i).ec != std::errc{} ||
          std::from_chars(tok.data() + dash + 1, tok.data() + tok.size(), j).ec != std::errc{} || i < 0 || j < 0 ||
          static_cast<std::size_t>(i) >= unit.src.size() || static_cast<std::size_t>(j) >= unit.tgt->size())
        throw ConfigError("--align: bad link '" + std::string(tok) + "'");
      unit.alignments.push_back({i, j});
    }
    std::sort(unit.alignments.begin(), unit.alignments.end());
    unit.alignments.erase(std::unique(unit.alignments.begin(), unit.alignments.end()), unit.alignments.end());
  }
  std::vector<StreamSource> one{memory_stream("unit", {unit})};
  const Vocabulary vocab = build_vocabulary(std::span<const StreamSource>(one), 1);
  const UnitGraph graph = build_unit_graph(unit, vocab, spec.active_labels());

  auto name = [&](int node) { return vocab.word(graph.nodes()[static_cast<std::size_t>(node)].word).key(); };
  out << "#= model " << spec.render() << '\n';
  out << "#= nodes " << graph.size() << " edges " << graph.edges().size() << '\n';
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& n = graph.nodes()[i];
    out << "node " << i << ' ' << (n.side == Side::src ? "src" : "tgt") << ':' << n.index << ' '
        << name(static_cast<int>(i)) << '\n';
  }
  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    const auto& edge = graph.edges()[e];
    out << "edge " << e << ' ' << label_char(edge.label) << ' ' << edge.a << ' ' << edge.b << '\n';
  }
  std::vector<int> centers;
  if (args.queries.empty()) {
    for (int i = 0; i < static_cast<int>(graph.size()); ++i) centers.push_back(i);
  } else {
    for (const auto& q : args.queries) {
      const TaggedWord w = TaggedWord::parse(q);
      bool found = false;
      for (int i = 0; i < static_cast<int>(graph.size()); ++i)
        if (vocab.word(graph.nodes()[static_cast<std::size_t>(i)].word) == w) {
          centers.push_back(i);
          found = true;
        }
      if (!found) throw LookupError("query word '" + q + "' does not occur in the unit");
    }
  }
  NeighborhoodSearcher searcher;
  for (int c : centers) {
    out << name(c) << " -> {";
    bool first = true;
    for (int x : searcher.query(graph, c, spec)) {
      out << (first ? "" : ", ") << name(x);
      first = false;
    }
    out << "}\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multigraph word embeddings: training, evaluation and lexicon induction", "mge"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train embeddings from a run config");
  train_cmd->add_option("config", train_args.config, "Run config file")->required();
  train_cmd->add_option("--set", train_args.sets, "Override a top-level key (key=value)");

  VocabArgs vocab_args;
  auto* vocab_cmd = app.add_subcommand("vocab", "Build a vocabulary and print statistics");
  vocab_cmd->add_option("config", vocab_args.config, "Run config file")->required();
  vocab_cmd->add_option("--stream", vocab_args.streams, "Restrict to these stream ids");
  vocab_cmd->add_option("--min-count", vocab_args.min_count, "Override min_count");
  vocab_cmd->add_option("--out", vocab_args.out_path, "Write the vocabulary file here");
  vocab_cmd->add_option("--top", vocab_args.top, "Number of most frequent types to list");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate embeddings on a dataset");
  eval_cmd->add_option("--model", eval_args.model, "Vector file")->required();
  eval_cmd->add_option("--dataset", eval_args.dataset, "Dataset file")->required();
  eval_cmd->add_option("--task", eval_args.task, "analogy | similarity | translation")->required();
  eval_cmd->add_option("--lang", eval_args.lang, "Dataset language (target language for translation)");
  eval_cmd->add_option("--src-lang", eval_args.src_lang, "Source language for translation");
  eval_cmd->add_option("--resamples", eval_args.resamples, "Bootstrap resamples");
  eval_cmd->add_option("--seed", eval_args.seed, "Bootstrap seed");

  NnArgs nn_args;
  auto* nn_cmd = app.add_subcommand("nn", "Nearest neighbors of a word");
  nn_cmd->add_option("--model", nn_args.model, "Vector file")->required();
  nn_cmd->add_option("word", nn_args.word, "Language-tagged word, e.g. dog_en")->required();
  nn_cmd->add_option("-k", nn_args.k, "Number of neighbors");
  nn_cmd->add_option("--lang", nn_args.lang, "Only report words of this language");

  InduceArgs induce_args;
  auto* induce_cmd = app.add_subcommand("induce-lexicon", "Induce translations for parallel-OOV words");
  induce_cmd->add_option("--model", induce_args.model, "Vector file")->required();
  induce_cmd->add_option("--parallel-vocab", induce_args.parallel_vocab, "Vocabulary of the parallel data")->required();
  induce_cmd->add_option("--mono-vocab", induce_args.mono_vocab, "Vocabulary of the monolingual data")->required();
  induce_cmd->add_option("--tgt-lang", induce_args.tgt_lang, "Target language")->required();
  induce_cmd->add_option("--min-count", induce_args.min_count, "Minimum monolingual count");
  induce_cmd->add_option("--threshold", induce_args.threshold, "Minimum cosine");
  induce_cmd->add_option("--k-best", induce_args.k_best, "Neighbors considered per word (analysis only)");
  induce_cmd->add_option("--out", induce_args.out_path, "Phrase table output")->required();

  GraphArgs graph_args;
  auto* graph_cmd = app.add_subcommand("graph-debug", "Print one unit's multigraph and neighborhoods");
  graph_cmd->add_option("--src", graph_args.src, "Source sentence")->required();
  graph_cmd->add_option("--src-lang", graph_args.src_lang, "Source language")->required();
  graph_cmd->add_option("--tgt", graph_args.tgt, "Target sentence");
  graph_cmd->add_option("--tgt-lang", graph_args.tgt_lang, "Target language");
  graph_cmd->add_option("--align", graph_args.align, "Pharaoh alignment, e.g. '0-0 1-2'");
  graph_cmd->add_option("--src-deps", graph_args.src_deps, "Source arcs as head-dep pairs");
  graph_cmd->add_option("--tgt-deps", graph_args.tgt_deps, "Target arcs as head-dep pairs");
  graph_cmd->add_option("--model", graph_args.model, "Model spec, e.g. T1A1")->required();
  graph_cmd->add_option("--query", graph_args.queries, "Tagged center word(s); default all nodes");

  std::vector<std::string> argv_store{"mge"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train_args, out, err);
    if (*vocab_cmd) return cmd_vocab(vocab_args, out);
    if (*eval_cmd) return cmd_eval(eval_args, out);
    if (*nn_cmd) return cmd_nn(nn_args, out);
    if (*induce_cmd) return cmd_induce(induce_args, out, err);
    if (*graph_cmd) return cmd_graph_debug(graph_args, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SpecParseError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace mge::cli
