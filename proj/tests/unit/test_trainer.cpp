#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mge/embeddings.hpp"
#include "mge/trainer.hpp"
#include "oracles.hpp"
#include "toy_corpus.hpp"

using namespace mge;
using namespace mge::testing;

namespace {

struct Encoded {
  Vocabulary vocab;
  std::vector<EncodedUnit> units;
};

Encoded encode_all(const std::vector<TrainingUnit>& units, std::uint64_t min_count = 1) {
  std::vector<StreamSource> streams{memory_stream("s", units)};
  Encoded out{build_vocabulary(streams, min_count), {}};
  for (const auto& u : units) out.units.push_back(encode_unit(u, out.vocab));
  return out;
}

TrainConfig small_config() {
  TrainConfig c;
  c.dim = 16;
  c.epochs = 2;
  c.seed = 17;
  return c;
}

std::vector<TrainingUnit> random_mono(Rng& rng, std::size_t n, int types) {
  std::vector<TrainingUnit> out;
  for (std::size_t s = 0; s < n; ++s) {
    TrainingUnit u;
    const auto len = 1 + rng.below(20);
    for (std::uint64_t k = 0; k < len; ++k)
      u.src.tokens.emplace_back("t" + std::to_string(rng.below(static_cast<std::uint64_t>(types))), LanguageCode("en"));
    out.push_back(std::move(u));
  }
  return out;
}

double mean_aligned_cosine(const EmbeddingStore& store, const ToyCorpus& toy) {
  double sum = 0;
  for (const auto& [s, t] : toy.lexicon) sum += cosine(store, s, t);
  return sum / static_cast<double>(toy.lexicon.size());
}

double mean_unaligned_cosine(const EmbeddingStore& store, const ToyCorpus& toy) {
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < toy.lexicon.size(); ++i)
    for (std::size_t j = 0; j < toy.lexicon.size(); ++j)
      if (i != j) {
        sum += cosine(store, toy.lexicon[i].first, toy.lexicon[j].second);
        ++n;
      }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("config validation names the key") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  auto message = [](TrainConfig bad) {
    try {
      bad.validate();
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  c.dim = 0;
  CHECK(message(c).rfind("dim", 0) == 0);
  c = {};
  c.lr_min = 0.5;
  CHECK(message(c).rfind("lr_min", 0) == 0);
  c = {};
  c.neg_count = 0;
  CHECK(message(c).rfind("neg_count", 0) == 0);
  c = {};
  c.workers = 0;
  CHECK(message(c).rfind("workers", 0) == 0);
  CHECK(TrainConfig{}.effective_lr_min() == doctest::Approx(0.025e-4));
}

TEST_CASE("interleave_schedule is proportional") {
  std::vector<std::size_t> sizes{2, 1};
  auto s = interleave_schedule(sizes);
  REQUIRE(s.size() == 3);
  CHECK(s[0].part == 0);
  CHECK(s[1].part == 1);
  CHECK(s[2].part == 0);

  std::vector<std::size_t> big{1000, 10, 0, 90};
  auto order = interleave_schedule(big);
  CHECK(order.size() == 1100);
  // Every part is visited in unit order and any prefix keeps the proportions within one unit.
  std::vector<std::size_t> seen(4, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(order[i].unit == seen[order[i].part]);
    ++seen[order[i].part];
    for (std::size_t p = 0; p < 4; ++p) {
      const double expected = static_cast<double>(big[p]) * static_cast<double>(i + 1) / 1100.0;
      CHECK(std::abs(static_cast<double>(seen[p]) - expected) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("count_pairs matches generate_pairs") {
  auto fig = make_toy_corpus(30, 10, 3);
  auto enc = encode_all(fig.parallel);
  const auto spec = parse_spec("T2A1");
  std::size_t expected = 0;
  for (const auto& u : enc.units) expected += generate_pairs(build_unit_graph(u, spec.active_labels()), spec).size();
  std::vector<ResolvedPart> parts{{spec, enc.units}};
  CHECK(count_pairs(parts) == expected);
}

TEST_CASE("T5 training equals direct window-5 SkipGram") {
  Rng rng(77);
  auto enc = encode_all(random_mono(rng, 200, 40), 2);
  auto cfg = small_config();
  cfg.epochs = 3;
  SUBCASE("separate") {}
  SUBCASE("shared") { cfg.context_vectors = ContextVectors::shared; }
  std::vector<ResolvedPart> parts{{parse_spec("T5"), enc.units}};
  TrainStats stats;
  auto trained = train(parts, enc.vocab, cfg, &stats);
  auto direct = train_skipgram_direct(enc.units, enc.vocab, 5, cfg);
  CHECK(trained == direct);
  CHECK(stats.pairs_trained == stats.pairs_per_epoch * 3);
  CHECK(stats.final_lr == doctest::Approx(cfg.effective_lr_min()).epsilon(1e-3));
}

TEST_CASE("epochs = 0 returns the initialized model") {
  auto enc = encode_all(make_toy_corpus(20, 8, 1).parallel);
  auto cfg = small_config();
  cfg.epochs = 0;
  std::vector<ResolvedPart> parts{{parse_spec("T1"), enc.units}};
  auto separate = train(parts, enc.vocab, cfg);
  CHECK(separate == init_model(enc.vocab, 16, cfg.seed, ContextVectors::separate));
  for (float v : separate.output_data()) CHECK(v == 0.0f);
  cfg.context_vectors = ContextVectors::shared;
  CHECK(train(parts, enc.vocab, cfg) == init_model(enc.vocab, 16, cfg.seed, ContextVectors::shared));
}

TEST_CASE("single-worker training is deterministic") {
  auto enc = encode_all(make_toy_corpus(100, 12, 4).parallel);
  std::vector<ResolvedPart> parts{{parse_spec("(TA)2"), enc.units}};
  auto a = train(parts, enc.vocab, small_config());
  auto b = train(parts, enc.vocab, small_config());
  CHECK(a == b);
  auto other = small_config();
  other.seed = 18;
  CHECK_FALSE(a == train(parts, enc.vocab, other));
}

TEST_CASE("specs without pairs are rejected") {
  Rng rng(2);
  auto enc = encode_all(random_mono(rng, 10, 5));
  std::vector<ResolvedPart> parts{{parse_spec("A1"), enc.units}};
  CHECK_THROWS_AS(train(parts, enc.vocab, small_config()), DataError);
}

TEST_CASE("composite training resolves stream ids") {
  auto toy = make_toy_corpus(50, 10, 5);
  std::vector<StreamSource> streams{memory_stream("par", toy.parallel)};
  auto vocab = build_vocabulary(streams, 1);
  auto cfg = small_config();
  CHECK_THROWS_AS(train(parse_composite("T1[nope]"), streams, vocab, cfg), ConfigError);
  TrainStats stats;
  auto m = train(parse_composite("T1[par]+A1[par]"), streams, vocab, cfg, &stats);
  CHECK(m.all_finite());
  CHECK(stats.units_per_epoch == 100);
}

TEST_CASE("adversarial corpora stay finite") {
  auto cfg = small_config();
  cfg.epochs = 20;
  SUBCASE("separate") {}
  SUBCASE("shared") { cfg.context_vectors = ContextVectors::shared; }
  SUBCASE("repeated identical tokens") {
    TrainingUnit u;
    for (int i = 0; i < 30; ++i) u.src.tokens.emplace_back(i % 2 ? "a" : "b", LanguageCode("en"));
    auto enc = encode_all(std::vector<TrainingUnit>(20, u));
    std::vector<ResolvedPart> parts{{parse_spec("T5"), enc.units}};
    CHECK(train(parts, enc.vocab, cfg).all_finite());
  }
  SUBCASE("single-type vocabulary") {
    TrainingUnit u;
    for (int i = 0; i < 10; ++i) u.src.tokens.emplace_back("x", LanguageCode("en"));
    auto enc = encode_all(std::vector<TrainingUnit>(20, u));
    std::vector<ResolvedPart> parts{{parse_spec("T3"), enc.units}};
    CHECK(train(parts, enc.vocab, cfg).all_finite());
  }
}

TEST_CASE("objective on held-out pairs improves after one epoch") {
  auto toy = make_toy_corpus(400, 20, 8);
  auto enc = encode_all(toy.parallel);
  const auto spec = parse_spec("(TA)2");
  std::vector<ResolvedPart> parts{{spec, enc.units}};
  auto held = make_toy_corpus(20, 20, 99);
  // Negatives are drawn as in training: never from the center's own neighborhood.
  Rng neg_rng(5);
  NegativeSamplingTable table(enc.vocab);
  std::vector<NeighborPair> sample;
  std::vector<std::vector<WordId>> negatives;
  NeighborhoodSearcher searcher;
  std::vector<int> scratch;
  for (const auto& u : held.parallel) {
    const auto graph = build_unit_graph(encode_unit(u, enc.vocab), spec.active_labels());
    for_each_neighborhood(graph, spec, searcher, scratch, [&](int w, std::span<const int> ctx) {
      const WordId center = graph.nodes()[static_cast<std::size_t>(w)].word;
      std::vector<WordId> forbidden{center};
      for (int c : ctx) forbidden.push_back(graph.nodes()[static_cast<std::size_t>(c)].word);
      std::sort(forbidden.begin(), forbidden.end());
      forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());
      for (int c : ctx) {
        sample.push_back({center, graph.nodes()[static_cast<std::size_t>(c)].word});
        negatives.push_back(sample_negatives(table, neg_rng, 5, forbidden));
      }
    });
  }
  auto average = [&](const EmbeddingModel& m) {
    double s = 0;
    for (std::size_t i = 0; i < sample.size(); ++i)
      s += pair_objective(m, sample[i].center, sample[i].context, std::span<const WordId>(negatives[i]));
    return s / static_cast<double>(sample.size());
  };
  auto cfg = small_config();
  cfg.epochs = 0;
  const double before = average(train(parts, enc.vocab, cfg));
  cfg.epochs = 1;
  const double after = average(train(parts, enc.vocab, cfg));
  CHECK(after > before);
}

TEST_CASE("toy bilingual corpus aligns translations") {
  auto toy = make_toy_corpus(1500, 30, 12);
  auto enc = encode_all(toy.parallel);
  std::vector<ResolvedPart> parts{{parse_spec("(TA)2"), enc.units}};
  auto cfg = small_config();
  cfg.dim = 32;
  cfg.epochs = 5;
  SUBCASE("separate") {
    auto store = EmbeddingStore::from_model(train(parts, enc.vocab, cfg), enc.vocab);
    CHECK(mean_aligned_cosine(store, toy) > mean_unaligned_cosine(store, toy) + 0.15);
  }
  SUBCASE("shared") {
    cfg.context_vectors = ContextVectors::shared;
    auto store = EmbeddingStore::from_model(train(parts, enc.vocab, cfg), enc.vocab);
    CHECK(mean_aligned_cosine(store, toy) >= 0.6);
  }
}

TEST_CASE("multi-worker training runs every pair") {
  auto toy = make_toy_corpus(1500, 30, 21);
  auto enc = encode_all(toy.parallel);
  std::vector<ResolvedPart> parts{{parse_spec("(TA)2"), enc.units}};
  auto cfg = small_config();
  cfg.dim = 32;
  cfg.epochs = 5;
  cfg.workers = 3;
  TrainStats stats;
  auto m = train(parts, enc.vocab, cfg, &stats);
  CHECK(m.all_finite());
  CHECK(stats.pairs_trained == stats.pairs_per_epoch * 5);
  const auto store = EmbeddingStore::from_model(m, enc.vocab);
  CHECK(mean_aligned_cosine(store, toy) > mean_unaligned_cosine(store, toy) + 0.15);
}

TEST_CASE("subsampling drops frequent words but keeps training finite") {
  auto toy = make_toy_corpus(200, 15, 6);
  auto enc = encode_all(toy.parallel);
  std::vector<ResolvedPart> parts{{parse_spec("T2"), enc.units}};
  auto cfg = small_config();
  cfg.subsample_threshold = 1e-3;
  TrainStats stats;
  auto m = train(parts, enc.vocab, cfg, &stats);
  CHECK(m.all_finite());
  CHECK(stats.pairs_trained < stats.pairs_per_epoch * 2);
  CHECK(m == train(parts, enc.vocab, cfg));
}
