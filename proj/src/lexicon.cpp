#include "mge/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace mge {

void PoovCriteria::validate() const {
  if (min_mono_count < 1) throw ConfigError("min_mono_count must be >= 1");
  if (!(cosine_threshold > 0.0 && cosine_threshold <= 1.0)) throw ConfigError("threshold must be in (0, 1]");
  if (tgt_lang.empty()) throw ConfigError("tgt_lang is required");
}

std::vector<TaggedWord> find_poovs(const Vocabulary& parallel_vocab, const Vocabulary& mono_vocab,
                                   const PoovCriteria& criteria) {
  std::vector<TaggedWord> out;
  for (const auto& e : mono_vocab.entries())
    if (e.count >= criteria.min_mono_count && e.word.lang != criteria.tgt_lang && !parallel_vocab.contains(e.word))
      out.push_back(e.word);
  return out;
}

std::vector<LexiconEntry> induce(const EmbeddingStore& store, const std::vector<TaggedWord>& poovs,
                                 const PoovCriteria& criteria, std::size_t k_best, InduceStats* stats) {
  criteria.validate();
  InduceStats local;
  std::vector<LexiconEntry> out;
  for (const auto& w : poovs) {
    ++local.candidates;
    const auto i = store.find(w);
    if (!i) {
      ++local.skipped;
      continue;
    }
    KnnQuery q;
    q.k = k_best;
    q.lang = criteria.tgt_lang;
    q.exclude = {*i};
    bool any = false;
    for (const auto& nb : knn(store, vector_of(store, w), q)) {
      if (nb.cosine < criteria.cosine_threshold) continue;
      out.push_back({w, store.word(nb.index), nb.cosine});
      any = true;
    }
    if (any) ++local.induced;
  }
  std::stable_sort(out.begin(), out.end(), [](const LexiconEntry& a, const LexiconEntry& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    if (a.source.surface != b.source.surface) return a.source.surface < b.source.surface;
    return a.source.lang < b.source.lang;
  });
  if (stats) *stats = local;
  return out;
}

void export_phrase_table(const std::vector<LexiconEntry>& entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write phrase table '" + path.string() + "'");
  char buf[32];
  for (const auto& e : entries) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, e.cosine);
    out << e.source.surface << " ||| " << e.target.surface << " ||| " << std::string_view(buf, p - buf) << '\n';
  }
  if (!out) throw DataError("I/O failure writing '" + path.string() + "'");
}

}  // namespace mge
