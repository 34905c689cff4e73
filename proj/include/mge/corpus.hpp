#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mge/types.hpp"

namespace mge {

/// A (head, dependent) arc between 0-based token positions.
struct DepArc {
  int head = 0;
  int dep = 0;
  friend bool operator==(const DepArc&, const DepArc&) = default;
  friend auto operator<=>(const DepArc&, const DepArc&) = default;
};

/// A (src, tgt) alignment link between 0-based token positions.
struct AlignLink {
  int src = 0;
  int tgt = 0;
  friend bool operator==(const AlignLink&, const AlignLink&) = default;
  friend auto operator<=>(const AlignLink&, const AlignLink&) = default;
};

struct Sentence {
  std::vector<TaggedWord> tokens;
  std::vector<DepArc> deps;

  std::size_t size() const noexcept { return tokens.size(); }
};

/// One sentence, or one aligned sentence pair.
struct TrainingUnit {
  Sentence src;
  std::optional<Sentence> tgt;
  std::vector<AlignLink> alignments;
};

/// Checks the index-bound invariants of a unit. Returns an empty string when valid.
std::string validate_unit(const TrainingUnit& unit);

struct ReaderStats {
  std::size_t lines_read = 0;
  std::size_t units_emitted = 0;
  std::size_t warnings = 0;
};

/// Single-consumer sequential source of training units.
class UnitReader {
 public:
  virtual ~UnitReader() = default;
  virtual std::optional<TrainingUnit> next() = 0;
  const ReaderStats& stats() const noexcept { return stats_; }

 protected:
  ReaderStats stats_;
};

std::unique_ptr<UnitReader> read_monolingual(const std::filesystem::path& path, const LanguageCode& lang);
std::unique_ptr<UnitReader> read_dependency(const std::filesystem::path& path, const LanguageCode& lang);

struct ParallelPaths {
  std::filesystem::path src, tgt, align;
  // Optional per-line dependency sidecars: one line per sentence of `head-dep` pairs.
  std::optional<std::filesystem::path> src_deps, tgt_deps;
};

std::unique_ptr<UnitReader> read_parallel(const ParallelPaths& paths, const LanguageCode& src_lang,
                                          const LanguageCode& tgt_lang);

/// Reader over units already in memory. Units are still bound-checked.
std::unique_ptr<UnitReader> read_memory(std::shared_ptr<const std::vector<TrainingUnit>> units);

std::vector<TrainingUnit> read_all(UnitReader& reader);

enum class StreamKind { mono, dependency, parallel };

/// A named corpus declaration that can be opened any number of times.
struct StreamSource {
  std::string id;
  StreamKind kind = StreamKind::mono;
  std::filesystem::path path;  // mono, dependency
  ParallelPaths parallel;      // parallel
  LanguageCode lang;           // mono, dependency, parallel source side
  LanguageCode tgt_lang;       // parallel target side
  std::shared_ptr<const std::vector<TrainingUnit>> memory;  // overrides files when set

  std::unique_ptr<UnitReader> open() const;
};

StreamSource memory_stream(std::string id, std::vector<TrainingUnit> units);

// Low-level helpers, exposed for tests.
bool valid_utf8(std::string_view text) noexcept;
std::vector<std::string_view> split_whitespace(std::string_view line);

}  // namespace mge
