#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mge {

/// Invalid configuration or command-line usage (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input data (CLI exit code 1).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A word that is not present in a vocabulary or embedding store.
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Short lowercase language tag, `[a-z]{2,3}`.
class LanguageCode {
 public:
  LanguageCode() = default;
  explicit LanguageCode(std::string_view code);

  static bool valid(std::string_view code) noexcept;

  const std::string& str() const noexcept { return code_; }
  bool empty() const noexcept { return code_.empty(); }

  friend bool operator==(const LanguageCode&, const LanguageCode&) = default;
  friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;

 private:
  std::string code_;
};

/// A word type in the shared multilingual space. (surface, lang) is the identity.
struct TaggedWord {
  std::string surface;
  LanguageCode lang;

  TaggedWord() = default;
  TaggedWord(std::string s, LanguageCode l);

  /// `surface_lang`, e.g. `dog_en`.
  std::string key() const;
  /// Inverse of key(); splits at the last underscore.
  static TaggedWord parse(std::string_view key);

  friend bool operator==(const TaggedWord&, const TaggedWord&) = default;
};

/// Vocabulary ordering: lang first, then surface.
inline bool lexicographic_less(const TaggedWord& a, const TaggedWord& b) {
  if (a.lang != b.lang) return a.lang < b.lang;
  return a.surface < b.surface;
}

struct TaggedWordHash {
  std::size_t operator()(const TaggedWord& w) const noexcept {
    std::size_t h = std::hash<std::string>{}(w.surface);
    return h ^ (std::hash<std::string>{}(w.lang.str()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

}  // namespace mge
