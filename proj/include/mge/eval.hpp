#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mge/embeddings.hpp"
#include "mge/types.hpp"

namespace mge {

struct AnalogyItem {
  TaggedWord a, b, c, reference;
  bool syntactic = false;
};

struct AnalogyDataset {
  std::string name;
  std::vector<AnalogyItem> items;
};

struct SimilarityItem {
  std::vector<TaggedWord> a;  // one word, or the words of a phrase
  std::vector<TaggedWord> b;
  double score = 0.0;
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityItem> items;
  bool phrase_mode = false;
};

struct TranslationItem {
  TaggedWord source, reference;
};

struct TranslationDataset {
  std::string name;
  std::vector<TranslationItem> items;
  LanguageCode src_lang, tgt_lang;
};

/// `a b c d` per line; `:` lines start sections, and sections named `gram*` are syntactic.
AnalogyDataset load_analogy(const std::filesystem::path& path, const LanguageCode& lang);
/// `item_a <tab> item_b <tab> score`; items may be `&`-joined phrases.
SimilarityDataset load_similarity(const std::filesystem::path& path, const LanguageCode& lang);
/// `source target` per line.
TranslationDataset load_translation(const std::filesystem::path& path, const LanguageCode& src_lang,
                                    const LanguageCode& tgt_lang);

struct MetricValue {
  std::string name;  // acc@1, acc@5, rho, ...
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::vector<MetricValue> metrics;
  std::size_t n_items = 0;
  std::size_t n_evaluated = 0;
  bool defined = true;  // false when nothing could be evaluated

  double coverage() const noexcept {
    return n_items == 0 ? 0.0 : static_cast<double>(n_evaluated) / static_cast<double>(n_items);
  }
  const MetricValue& metric(const std::string& name) const;
};

/// Aligned human-readable table.
void print_table(std::ostream& os, std::span<const EvalReport> reports);
/// One `#= dataset metric value ci_low ci_high coverage n` line per metric. Accuracies are
/// printed as percentages.
void print_machine(std::ostream& os, const EvalReport& report);

inline constexpr int kBootstrapResamples = 10000;

struct EvalOptions {
  int resamples = kBootstrapResamples;
  std::uint64_t seed = 1;
};

EvalReport eval_analogy(const EmbeddingStore& store, const AnalogyDataset& dataset, const EvalOptions& opt = {});
EvalReport eval_similarity(const EmbeddingStore& store, const SimilarityDataset& dataset, const EvalOptions& opt = {});
EvalReport eval_translation(const EmbeddingStore& store, const TranslationDataset& dataset,
                            const EvalOptions& opt = {});

/// Spearman rank correlation with average ranks for ties. Throws std::invalid_argument on a
/// length mismatch or fewer than 2 values. NaN when either side is constant.
double spearman_rho(std::span<const double> pred, std::span<const double> gold);

/// Average (1-based) ranks, ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Percentile bootstrap over item indices. `statistic` receives a resample of indices;
/// NaN statistics are dropped. Returns the 2.5th and 97.5th percentiles.
std::pair<double, double> bootstrap_ci(std::size_t n_items,
                                       const std::function<double(std::span<const std::size_t>)>& statistic,
                                       int resamples, std::uint64_t seed);
std::pair<double, double> bootstrap_mean_ci(std::span<const double> outcomes, int resamples = kBootstrapResamples,
                                            std::uint64_t seed = 1);
std::pair<double, double> bootstrap_rho_ci(std::span<const double> pred, std::span<const double> gold,
                                           int resamples = kBootstrapResamples, std::uint64_t seed = 1);

}  // namespace mge
