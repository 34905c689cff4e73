#include "mge/vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace mge {

Vocabulary::Vocabulary(std::vector<VocabEntry> entries, std::uint64_t total_tokens)
    : entries_(std::move(entries)), total_tokens_(total_tokens) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].word, static_cast<WordId>(i)).second)
      throw DataError("duplicate vocabulary entry '" + entries_[i].word.key() + "'");
  }
}

std::optional<WordId> Vocabulary::find(const TaggedWord& w) const {
  auto it = index_.find(w);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordId Vocabulary::id_or_none(const TaggedWord& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? kNoWord : it->second;
}

bool operator==(const Vocabulary& a, const Vocabulary& b) {
  if (a.total_tokens_ != b.total_tokens_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i)
    if (!(a.entries_[i].word == b.entries_[i].word) || a.entries_[i].count != b.entries_[i].count) return false;
  return true;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "# total_tokens " << total_tokens_ << '\n';
  for (const auto& e : entries_) out << e.word.key() << ' ' << e.count << '\n';
  if (!out) throw DataError("I/O failure writing '" + path.string() + "'");
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary '" + path.string() + "'");
  std::vector<VocabEntry> entries;
  std::uint64_t total = 0;
  bool have_total = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_whitespace(line);
    if (fields.size() == 3 && fields[0] == "#" && fields[1] == "total_tokens") {
      auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), total);
      if (ec != std::errc{}) throw DataError("bad total_tokens in '" + path.string() + "'");
      have_total = true;
      continue;
    }
    std::uint64_t count = 0;
    if (fields.size() != 2 ||
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), count).ec != std::errc{} ||
        count == 0)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 'surface_lang count'");
    entries.push_back({TaggedWord::parse(fields[0]), count});
  }
  if (!have_total)
    for (const auto& e : entries) total += e.count;
  return Vocabulary(std::move(entries), total);
}

namespace {

Vocabulary finish(std::unordered_map<TaggedWord, std::uint64_t, TaggedWordHash>& counts, std::uint64_t total,
                  std::uint64_t min_count) {
  std::vector<VocabEntry> entries;
  for (auto& [word, count] : counts)
    if (count >= min_count) entries.push_back({word, count});
  if (entries.empty())
    throw ConfigError("vocabulary is empty after applying min_count=" + std::to_string(min_count));
  std::sort(entries.begin(), entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return lexicographic_less(a.word, b.word);
  });
  return Vocabulary(std::move(entries), total);
}

void count_sentence(const Sentence& s, std::unordered_map<TaggedWord, std::uint64_t, TaggedWordHash>& counts,
                    std::uint64_t& total) {
  for (const auto& tok : s.tokens) {
    ++counts[tok];
    ++total;
  }
}

}  // namespace

Vocabulary build_vocabulary(std::span<UnitReader* const> streams, std::uint64_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::unordered_map<TaggedWord, std::uint64_t, TaggedWordHash> counts;
  std::uint64_t total = 0;
  for (UnitReader* reader : streams) {
    while (auto unit = reader->next()) {
      count_sentence(unit->src, counts, total);
      if (unit->tgt) count_sentence(*unit->tgt, counts, total);
    }
  }
  return finish(counts, total, min_count);
}

Vocabulary build_vocabulary(std::span<const StreamSource> streams, std::uint64_t min_count) {
  std::vector<std::unique_ptr<UnitReader>> owned;
  std::vector<UnitReader*> readers;
  for (const auto& s : streams) {
    owned.push_back(s.open());
    readers.push_back(owned.back().get());
  }
  return build_vocabulary(std::span<UnitReader* const>(readers), min_count);
}

}  // namespace mge
