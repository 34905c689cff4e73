#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mge/corpus.hpp"
#include "mge/types.hpp"

namespace mge {

using WordId = std::int32_t;
inline constexpr WordId kNoWord = -1;

struct VocabEntry {
  TaggedWord word;
  std::uint64_t count = 0;
};

/// Language-tagged word types with dense ids, ordered by descending count.
/// Immutable once built.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Entries must already be in id order.
  Vocabulary(std::vector<VocabEntry> entries, std::uint64_t total_tokens);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }

  const VocabEntry& operator[](WordId id) const { return entries_.at(static_cast<std::size_t>(id)); }
  const TaggedWord& word(WordId id) const { return (*this)[id].word; }
  std::uint64_t count(WordId id) const { return (*this)[id].count; }
  std::span<const VocabEntry> entries() const noexcept { return entries_; }

  std::optional<WordId> find(const TaggedWord& w) const;
  WordId id_or_none(const TaggedWord& w) const;
  bool contains(const TaggedWord& w) const { return find(w).has_value(); }

  /// Text form: `# total_tokens N` then `surface_lang count` per id.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b);

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<TaggedWord, WordId, TaggedWordHash> index_;
  std::uint64_t total_tokens_ = 0;
};

/// Counts every token on both sides of every unit of every stream. Throws ConfigError when
/// nothing survives min_count.
Vocabulary build_vocabulary(std::span<UnitReader* const> streams, std::uint64_t min_count = 5);
Vocabulary build_vocabulary(std::span<const StreamSource> streams, std::uint64_t min_count = 5);

}  // namespace mge
