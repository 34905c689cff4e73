#include "mge/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mge {

NegativeSamplingTable::NegativeSamplingTable(const Vocabulary& vocab, double exponent) : exponent_(exponent) {
  if (vocab.empty()) throw std::invalid_argument("negative sampling table needs a non-empty vocabulary");
  if (!(exponent > 0.0)) throw std::invalid_argument("sampling exponent must be positive");
  probabilities_.resize(vocab.size());
  double z = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    probabilities_[i] = std::pow(static_cast<double>(vocab.count(static_cast<WordId>(i))), exponent);
    z += probabilities_[i];
  }
  cumulative_.resize(vocab.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    probabilities_[i] /= z;
    acc += probabilities_[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;
}

WordId NegativeSamplingTable::draw(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<WordId>(it - cumulative_.begin());
}

NegativeSamplingTable build_table(const Vocabulary& vocab, double exponent) {
  return NegativeSamplingTable(vocab, exponent);
}

void sample_negatives(const NegativeSamplingTable& table, Rng& rng, int count, std::span<const WordId> forbidden,
                      std::vector<WordId>& out) {
  out.clear();
  for (int k = 0; k < count; ++k) {
    WordId id = table.draw(rng);
    for (int retry = 0; retry < kNegativeRetries && std::binary_search(forbidden.begin(), forbidden.end(), id);
         ++retry)
      id = table.draw(rng);
    out.push_back(id);
  }
}

std::vector<WordId> sample_negatives(const NegativeSamplingTable& table, Rng& rng, int count,
                                     std::span<const WordId> forbidden) {
  std::vector<WordId> out;
  sample_negatives(table, rng, count, forbidden, out);
  return out;
}

}  // namespace mge
