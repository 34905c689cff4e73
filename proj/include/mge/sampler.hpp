#pragma once

#include <span>
#include <vector>

#include "mge/rng.hpp"
#include "mge/vocabulary.hpp"

namespace mge {

inline constexpr double kDefaultSamplingExponent = 0.75;
inline constexpr int kNegativeRetries = 10;

/// Negative-sampling distribution: p(i) proportional to count(i)^exponent over every
/// language-tagged type in the vocabulary.
class NegativeSamplingTable {
 public:
  NegativeSamplingTable(const Vocabulary& vocab, double exponent = kDefaultSamplingExponent);

  double exponent() const noexcept { return exponent_; }
  std::size_t size() const noexcept { return probabilities_.size(); }
  double probability(WordId id) const { return probabilities_.at(static_cast<std::size_t>(id)); }
  std::span<const double> probabilities() const noexcept { return probabilities_; }

  WordId draw(Rng& rng) const;

 private:
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  double exponent_;
};

NegativeSamplingTable build_table(const Vocabulary& vocab, double exponent = kDefaultSamplingExponent);

/// Draws `count` ids, re-drawing any id in `forbidden` (sorted) up to kNegativeRetries times;
/// the last draw is kept once retries run out.
void sample_negatives(const NegativeSamplingTable& table, Rng& rng, int count, std::span<const WordId> forbidden,
                      std::vector<WordId>& out);
std::vector<WordId> sample_negatives(const NegativeSamplingTable& table, Rng& rng, int count,
                                     std::span<const WordId> forbidden);

}  // namespace mge
