#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mge/model.hpp"
#include "mge/types.hpp"
#include "mge/vocabulary.hpp"

namespace mge {

enum class VectorFormat { text, binary };

/// Read-only word vectors with precomputed unit-length copies.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::vector<TaggedWord> words, std::size_t dim, std::vector<float> vectors);

  /// Input (word) rows of a trained model, in vocabulary id order.
  static EmbeddingStore from_model(const EmbeddingModel& model, const Vocabulary& vocab);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const TaggedWord& word(std::size_t i) const { return words_.at(i); }
  std::span<const float> vector(std::size_t i) const noexcept { return {vectors_.data() + i * dim_, dim_}; }
  std::span<const float> unit(std::size_t i) const noexcept { return {unit_.data() + i * dim_, dim_}; }
  /// Zero rows are kept (ids stay aligned) but flagged; they rank last in knn.
  bool is_zero(std::size_t i) const noexcept { return zero_[i] != 0; }
  std::uint16_t lang_index(std::size_t i) const noexcept { return lang_of_[i]; }
  std::optional<std::uint16_t> lang_index(const LanguageCode& lang) const;

  std::optional<std::size_t> find(const TaggedWord& w) const;
  /// Throws LookupError.
  std::size_t require(const TaggedWord& w) const;

  /// Text: `|V| dim` header then `surface_lang v1 .. v_dim` per row, shortest round-trip
  /// decimals. Binary: same header, then per row `surface_lang ` followed by dim
  /// little-endian float32 values and '\n'.
  void save(const std::filesystem::path& path, VectorFormat format) const;
  /// Detects the format. Throws DataError on malformed or truncated files.
  static EmbeddingStore load(const std::filesystem::path& path);
  static EmbeddingStore load(const std::filesystem::path& path, VectorFormat format);

  const std::vector<float>& raw() const noexcept { return vectors_; }

 private:
  std::vector<TaggedWord> words_;
  std::size_t dim_ = 0;
  std::vector<float> vectors_;
  std::vector<float> unit_;
  std::vector<std::uint8_t> zero_;
  std::vector<std::uint16_t> lang_of_;
  std::vector<LanguageCode> langs_;
  std::unordered_map<TaggedWord, std::size_t, TaggedWordHash> index_;
};

/// Cosine of two stored words. Throws LookupError for a missing word.
double cosine(const EmbeddingStore& store, const TaggedWord& a, const TaggedWord& b);
/// Cosine of a raw query against row i (0 when either side is zero).
double cosine_to(const EmbeddingStore& store, std::span<const double> unit_query, std::size_t i);

struct Neighbor {
  std::size_t index;
  double cosine;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct KnnQuery {
  std::size_t k = 1;
  std::optional<LanguageCode> lang;
  std::vector<std::size_t> exclude;  // row indices
};

/// Exhaustive top-k by cosine; ties broken by row index, zero rows last.
/// Scores rows with an OpenMP loop.
std::vector<Neighbor> knn(const EmbeddingStore& store, std::span<const double> query, const KnnQuery& q);
/// Single-threaded reference scan; identical results to knn().
std::vector<Neighbor> knn_serial(const EmbeddingStore& store, std::span<const double> query, const KnnQuery& q);

std::vector<double> vector_of(const EmbeddingStore& store, const TaggedWord& w);

/// 3CosAdd query v_b - v_a + v_c. Callers exclude {a, b, c} from candidates.
std::vector<double> analogy_query(const EmbeddingStore& store, const TaggedWord& a, const TaggedWord& b,
                                  const TaggedWord& c);

}  // namespace mge
