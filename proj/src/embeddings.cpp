#include "mge/embeddings.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mge/corpus.hpp"

namespace mge {

EmbeddingStore::EmbeddingStore(std::vector<TaggedWord> words, std::size_t dim, std::vector<float> vectors)
    : words_(std::move(words)), dim_(dim), vectors_(std::move(vectors)) {
  if (dim_ == 0) throw DataError("embedding dimension must be positive");
  if (vectors_.size() != words_.size() * dim_) throw DataError("embedding matrix does not match word count");
  const std::size_t n = words_.size();
  unit_.assign(vectors_.size(), 0.0f);
  zero_.assign(n, 0);
  lang_of_.resize(n);
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(words_[i], i).second) throw DataError("duplicate word '" + words_[i].key() + "'");
    auto it = std::find(langs_.begin(), langs_.end(), words_[i].lang);
    if (it == langs_.end()) {
      langs_.push_back(words_[i].lang);
      it = langs_.end() - 1;
    }
    lang_of_[i] = static_cast<std::uint16_t>(it - langs_.begin());
    double norm = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) norm += static_cast<double>(vectors_[i * dim_ + k]) * vectors_[i * dim_ + k];
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      zero_[i] = 1;
      continue;
    }
    for (std::size_t k = 0; k < dim_; ++k) unit_[i * dim_ + k] = static_cast<float>(vectors_[i * dim_ + k] / norm);
  }
}

EmbeddingStore EmbeddingStore::from_model(const EmbeddingModel& model, const Vocabulary& vocab) {
  if (model.rows() != vocab.size()) throw DataError("model rows do not match vocabulary size");
  std::vector<TaggedWord> words;
  words.reserve(vocab.size());
  for (const auto& e : vocab.entries()) words.push_back(e.word);
  return EmbeddingStore(std::move(words), model.dim(), model.input_data());
}

std::optional<std::uint16_t> EmbeddingStore::lang_index(const LanguageCode& lang) const {
  auto it = std::find(langs_.begin(), langs_.end(), lang);
  if (it == langs_.end()) return std::nullopt;
  return static_cast<std::uint16_t>(it - langs_.begin());
}

std::optional<std::size_t> EmbeddingStore::find(const TaggedWord& w) const {
  auto it = index_.find(w);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingStore::require(const TaggedWord& w) const {
  auto i = find(w);
  if (!i) throw LookupError("word '" + w.key() + "' is not in the embedding store");
  return *i;
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary vector format assumes a little-endian host");

void write_float(std::string& out, float v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

std::string header(std::size_t rows, std::size_t dim) { return std::to_string(rows) + " " + std::to_string(dim) + "\n"; }

struct Header {
  std::size_t rows = 0, dim = 0;
  std::size_t end = 0;  // offset after the newline
};

Header parse_header(const std::string& data) {
  const auto nl = data.find('\n');
  if (nl == std::string::npos) throw DataError("missing header line");
  auto fields = split_whitespace(std::string_view(data).substr(0, nl));
  Header h;
  if (fields.size() != 2 || std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), h.rows).ec != std::errc{} ||
      std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), h.dim).ec != std::errc{} || h.dim == 0)
    throw DataError("malformed header (expected '|V| dim')");
  h.end = nl + 1;
  return h;
}

EmbeddingStore parse_binary(const std::string& data) {
  const Header h = parse_header(data);
  std::vector<TaggedWord> words;
  std::vector<float> vectors;
  words.reserve(h.rows);
  vectors.resize(h.rows * h.dim);
  std::size_t pos = h.end;
  for (std::size_t r = 0; r < h.rows; ++r) {
    const auto sp = data.find(' ', pos);
    if (sp == std::string::npos || sp == pos) throw DataError("truncated binary file at row " + std::to_string(r));
    words.push_back(TaggedWord::parse(std::string_view(data).substr(pos, sp - pos)));
    pos = sp + 1;
    const std::size_t bytes = h.dim * sizeof(float);
    if (pos + bytes + 1 > data.size()) throw DataError("truncated binary file at row " + std::to_string(r));
    std::memcpy(vectors.data() + r * h.dim, data.data() + pos, bytes);
    pos += bytes;
    if (data[pos] != '\n') throw DataError("binary row " + std::to_string(r) + " is not newline-terminated");
    ++pos;
  }
  if (pos != data.size()) throw DataError("trailing bytes after " + std::to_string(h.rows) + " rows");
  return EmbeddingStore(std::move(words), h.dim, std::move(vectors));
}

EmbeddingStore parse_text(const std::string& data) {
  const Header h = parse_header(data);
  if (!valid_utf8(data)) throw DataError("text vector file is not valid UTF-8");
  std::vector<TaggedWord> words;
  std::vector<float> vectors;
  words.reserve(h.rows);
  vectors.reserve(h.rows * h.dim);
  std::size_t pos = h.end;
  std::size_t row = 0;
  while (pos < data.size()) {
    auto nl = data.find('\n', pos);
    if (nl == std::string::npos) nl = data.size();
    std::string_view line(data.data() + pos, nl - pos);
    pos = nl + 1;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (row >= h.rows) throw DataError("more rows than the header declares");
    if (fields.size() != h.dim + 1)
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size() - 1) +
                      " values, expected " + std::to_string(h.dim));
    words.push_back(TaggedWord::parse(fields[0]));
    for (std::size_t k = 1; k < fields.size(); ++k) {
      float v = 0;
      auto [p, ec] = std::from_chars(fields[k].data(), fields[k].data() + fields[k].size(), v);
      if (ec != std::errc{} || p != fields[k].data() + fields[k].size())
        throw DataError("row " + std::to_string(row) + ": bad number '" + std::string(fields[k]) + "'");
      vectors.push_back(v);
    }
    ++row;
  }
  if (row != h.rows)
    throw DataError("header declares " + std::to_string(h.rows) + " rows, file has " + std::to_string(row));
  return EmbeddingStore(std::move(words), h.dim, std::move(vectors));
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

void EmbeddingStore::save(const std::filesystem::path& path, VectorFormat format) const {
  std::string out = header(size(), dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    out += words_[i].key();
    if (format == VectorFormat::text) {
      for (float v : vector(i)) {
        out += ' ';
        write_float(out, v);
      }
    } else {
      out += ' ';
      out.append(reinterpret_cast<const char*>(vectors_.data() + i * dim_), dim_ * sizeof(float));
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("I/O failure writing '" + path.string() + "'");
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path, VectorFormat format) {
  const std::string data = slurp(path);
  try {
    return format == VectorFormat::binary ? parse_binary(data) : parse_text(data);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  // A binary file only parses as binary when every row has exactly dim*4 bytes and a
  // newline, so try it first and fall back to text.
  try {
    return parse_binary(data);
  } catch (const DataError& binary_error) {
    try {
      return parse_text(data);
    } catch (const DataError& text_error) {
      const bool looks_text = path.extension() == ".txt" || path.extension() == ".vec";
      throw DataError(path.string() + ": " + (looks_text ? text_error.what() : binary_error.what()));
    }
  }
}

double cosine_to(const EmbeddingStore& store, std::span<const double> unit_query, std::size_t i) {
  if (store.is_zero(i)) return 0.0;
  auto u = store.unit(i);
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += unit_query[k] * u[k];
  return s;
}

namespace {

std::vector<double> normalized(std::span<const double> query) {
  double norm = 0.0;
  for (double v : query) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<double> out(query.begin(), query.end());
  if (norm > 0)
    for (auto& v : out) v /= norm;
  return out;
}

}  // namespace

double cosine(const EmbeddingStore& store, const TaggedWord& a, const TaggedWord& b) {
  const auto ia = store.require(a);
  const auto ib = store.require(b);
  if (store.is_zero(ia) || store.is_zero(ib)) return 0.0;
  // Same arithmetic as a knn query for a, so thresholds agree with knn scores.
  auto va = store.vector(ia);
  const auto q = normalized(std::vector<double>(va.begin(), va.end()));
  return std::clamp(cosine_to(store, q, ib), -1.0, 1.0);
}

namespace {

template <bool Parallel>
std::vector<Neighbor> knn_impl(const EmbeddingStore& store, std::span<const double> query, const KnnQuery& q) {
  if (query.size() != store.dim()) throw std::invalid_argument("query dimension mismatch");
  if (q.k == 0) return {};
  const auto unit_q = normalized(query);
  const std::size_t n = store.size();
  std::optional<std::uint16_t> lang;
  if (q.lang) {
    lang = store.lang_index(*q.lang);
    if (!lang) return {};
  }
  std::vector<std::uint8_t> skip(n, 0);
  for (auto e : q.exclude)
    if (e < n) skip[e] = 1;
  std::vector<double> score(n);

#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (skip[i] || (lang && store.lang_index(i) != *lang)) {
      skip[i] = 1;
      continue;
    }
    score[i] = cosine_to(store, unit_q, i);
  }

  std::vector<std::size_t> cand;
  cand.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!skip[i]) cand.push_back(i);
  auto better = [&](std::size_t a, std::size_t b) {
    if (store.is_zero(a) != store.is_zero(b)) return !store.is_zero(a);
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  };
  const std::size_t k = std::min(q.k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), better);
  std::vector<Neighbor> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) out.push_back({cand[r], std::clamp(score[cand[r]], -1.0, 1.0)});
  return out;
}

}  // namespace

std::vector<Neighbor> knn(const EmbeddingStore& store, std::span<const double> query, const KnnQuery& q) {
  return knn_impl<true>(store, query, q);
}

std::vector<Neighbor> knn_serial(const EmbeddingStore& store, std::span<const double> query, const KnnQuery& q) {
  return knn_impl<false>(store, query, q);
}

std::vector<double> vector_of(const EmbeddingStore& store, const TaggedWord& w) {
  auto v = store.vector(store.require(w));
  return {v.begin(), v.end()};
}

std::vector<double> analogy_query(const EmbeddingStore& store, const TaggedWord& a, const TaggedWord& b,
                                  const TaggedWord& c) {
  auto va = store.vector(store.require(a));
  auto vb = store.vector(store.require(b));
  auto vc = store.vector(store.require(c));
  std::vector<double> out(store.dim());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = static_cast<double>(vb[k]) - static_cast<double>(va[k]) + static_cast<double>(vc[k]);
  return out;
}

}  // namespace mge
