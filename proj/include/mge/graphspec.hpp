#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mge {

/// Edge labels: text adjacency, translation alignment, syntactic dependency.
enum class Label : std::uint8_t { T = 0, A = 1, D = 2 };

inline constexpr std::array<Label, 3> kAllLabels{Label::T, Label::A, Label::D};

char label_char(Label l) noexcept;

/// Bit set over {T, A, D}.
class LabelSet {
 public:
  constexpr LabelSet() = default;
  constexpr LabelSet(std::initializer_list<Label> labels) {
    for (Label l : labels) bits_ |= bit(l);
  }

  constexpr bool contains(Label l) const noexcept { return (bits_ & bit(l)) != 0; }
  constexpr void insert(Label l) noexcept { bits_ |= bit(l); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr bool intersects(LabelSet o) const noexcept { return (bits_ & o.bits_) != 0; }
  constexpr LabelSet operator|(LabelSet o) const noexcept { return LabelSet(static_cast<std::uint8_t>(bits_ | o.bits_)); }
  int size() const noexcept { return __builtin_popcount(bits_); }

  friend constexpr bool operator==(LabelSet, LabelSet) = default;

 private:
  constexpr explicit LabelSet(std::uint8_t bits) : bits_(bits) {}
  static constexpr std::uint8_t bit(Label l) noexcept { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(l)); }
  std::uint8_t bits_ = 0;
};

struct LabelClass {
  LabelSet members;
  int distance = 0;
};

/// Parse failure with the 0-based character offset that triggered it.
class SpecParseError : public std::invalid_argument {
 public:
  SpecParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline constexpr int kDefaultDistanceCap = 10;

/// A distance function over labels, possibly with collapsed classes such as (TA)3.
class ModelSpec {
 public:
  ModelSpec() = default;
  /// Classes must be pairwise disjoint; throws std::invalid_argument otherwise.
  explicit ModelSpec(std::vector<LabelClass> classes);

  const std::vector<LabelClass>& classes() const noexcept { return classes_; }
  int distance_of(Label l) const noexcept { return distances_[static_cast<std::size_t>(l)]; }
  int max_distance() const noexcept;
  /// Labels with non-zero distance.
  LabelSet active_labels() const noexcept;

  /// Canonical form: classes ordered by their first label in T, A, D order, groups parenthesized.
  std::string render() const;

 private:
  std::vector<LabelClass> classes_;
  std::array<int, 3> distances_{0, 0, 0};
};

int distance_of(const ModelSpec& spec, Label l) noexcept;

ModelSpec parse_spec(std::string_view text, int distance_cap = kDefaultDistanceCap);

struct CompositePart {
  ModelSpec spec;
  std::string stream_id;
};

struct CompositeSpec {
  std::vector<CompositePart> parts;
  std::string render() const;
};

CompositeSpec parse_composite(std::string_view text, int distance_cap = kDefaultDistanceCap);

}  // namespace mge
