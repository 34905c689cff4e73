#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mge/embeddings.hpp"
#include "mge/vocabulary.hpp"

namespace mge {

struct PoovCriteria {
  std::uint64_t min_mono_count = 100;
  double cosine_threshold = 0.3;
  LanguageCode tgt_lang;

  /// Throws ConfigError.
  void validate() const;
};

struct LexiconEntry {
  TaggedWord source;
  TaggedWord target;
  double cosine = 0.0;
  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

struct InduceStats {
  std::size_t candidates = 0;
  std::size_t induced = 0;
  std::size_t skipped = 0;  // pOOVs missing from the store
};

/// Words of the monolingual vocabulary that the parallel vocabulary lacks and that occur at
/// least min_mono_count times, in monolingual-vocabulary id order.
std::vector<TaggedWord> find_poovs(const Vocabulary& parallel_vocab, const Vocabulary& mono_vocab,
                                   const PoovCriteria& criteria);

/// For each pOOV, its nearest target-language neighbors (1 by default) with
/// cosine >= threshold, sorted by descending cosine then source.
std::vector<LexiconEntry> induce(const EmbeddingStore& store, const std::vector<TaggedWord>& poovs,
                                 const PoovCriteria& criteria, std::size_t k_best = 1, InduceStats* stats = nullptr);

/// `source ||| target ||| cosine` per line, surfaces without language tags.
void export_phrase_table(const std::vector<LexiconEntry>& entries, const std::filesystem::path& path);

}  // namespace mge
