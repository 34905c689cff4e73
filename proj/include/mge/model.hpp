#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mge/rng.hpp"
#include "mge/vocabulary.hpp"

namespace mge {

/// Where context vectors live: the word's own embedding, or a second output table.
enum class ContextVectors { shared, separate };

/// Input (word) and output (context) tables, row-major |V| x dim. With shared context
/// vectors there is one table and output(id) aliases input(id).
template <typename Real>
class BasicModel {
 public:
  BasicModel() = default;
  BasicModel(std::size_t rows, std::size_t dim, ContextVectors context = ContextVectors::separate)
      : rows_(rows),
        dim_(dim),
        context_(context),
        input_(rows * dim),
        output_(context == ContextVectors::separate ? rows * dim : 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  ContextVectors context_vectors() const noexcept { return context_; }
  bool shared() const noexcept { return context_ == ContextVectors::shared; }

  std::span<Real> input(WordId id) noexcept { return {input_.data() + offset(id), dim_}; }
  std::span<const Real> input(WordId id) const noexcept { return {input_.data() + offset(id), dim_}; }
  std::span<Real> output(WordId id) noexcept { return {(shared() ? input_ : output_).data() + offset(id), dim_}; }
  std::span<const Real> output(WordId id) const noexcept {
    return {(shared() ? input_ : output_).data() + offset(id), dim_};
  }

  std::vector<Real>& input_data() noexcept { return input_; }
  const std::vector<Real>& input_data() const noexcept { return input_; }
  std::vector<Real>& output_data() noexcept { return output_; }
  const std::vector<Real>& output_data() const noexcept { return output_; }

  bool all_finite() const noexcept {
    for (Real v : input_)
      if (!std::isfinite(v)) return false;
    for (Real v : output_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const BasicModel&, const BasicModel&) = default;

 private:
  std::size_t offset(WordId id) const noexcept { return static_cast<std::size_t>(id) * dim_; }

  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  ContextVectors context_ = ContextVectors::separate;
  std::vector<Real> input_;
  std::vector<Real> output_;
};

using EmbeddingModel = BasicModel<float>;

/// Input rows uniform in [-0.5/dim, 0.5/dim], separate output rows zero.
template <typename Real = float>
BasicModel<Real> init_model(std::size_t rows, std::size_t dim, std::uint64_t seed,
                            ContextVectors context = ContextVectors::separate) {
  BasicModel<Real> model(rows, dim, context);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& v : model.input_data()) v = static_cast<Real>(rng.uniform(-half, half));
  return model;
}

inline EmbeddingModel init_model(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed,
                                 ContextVectors context = ContextVectors::separate) {
  return init_model<float>(vocab.size(), dim, seed, context);
}

template <typename Real>
Real dot(std::span<const Real> a, std::span<const Real> b) noexcept {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Logistic sigma(x) = 1 / (1 + e^{-x}).
template <typename Real>
Real sigmoid(Real x) noexcept {
  return Real(1) / (Real(1) + std::exp(-x));
}

inline double log_sigmoid(double x) noexcept {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

/// log sigma(v_w . v_c) + sum_i log sigma(-v_w . v_ci), with v_w an input row and v_c, v_ci
/// output rows.
template <typename Real>
double pair_objective(const BasicModel<Real>& model, WordId w, WordId c, std::span<const WordId> negatives) {
  auto vw = model.input(w);
  double total = log_sigmoid(static_cast<double>(dot(vw, model.output(c))));
  for (WordId n : negatives) total += log_sigmoid(-static_cast<double>(dot(vw, model.output(n))));
  return total;
}

/// Dense gradient of pair_objective with respect to every parameter of the model.
template <typename Real>
BasicModel<Real> pair_gradient(const BasicModel<Real>& model, WordId w, WordId c, std::span<const WordId> negatives) {
  BasicModel<Real> grad(model.rows(), model.dim(), model.context_vectors());
  auto vw = model.input(w);
  auto gw = grad.input(w);
  auto accumulate = [&](WordId target, Real g) {
    auto vt = model.output(target);
    auto gt = grad.output(target);
    for (std::size_t k = 0; k < model.dim(); ++k) {
      gw[k] += g * vt[k];
      gt[k] += g * vw[k];
    }
  };
  accumulate(c, Real(1) - sigmoid(dot(vw, model.output(c))));
  for (WordId n : negatives) accumulate(n, -sigmoid(dot(vw, model.output(n))));
  return grad;
}

/// One ascent step on pair_objective. All partial derivatives are taken at the pre-step
/// parameters, so the step is exact even when shared rows alias (c or a negative equal to
/// w); only rows w (input), c and the negatives (output) change. `scratch` is resized as
/// needed.
template <typename Real>
void sgd_step(BasicModel<Real>& model, WordId w, WordId c, std::span<const WordId> negatives, Real lr,
              std::vector<Real>& scratch) {
  const std::size_t dim = model.dim();
  const std::size_t n_targets = negatives.size() + 1;
  scratch.assign(2 * dim + n_targets, Real(0));
  Real* input_delta = scratch.data();
  Real* vw_before = scratch.data() + dim;
  Real* coeff = scratch.data() + 2 * dim;
  auto vw = model.input(w);
  std::copy(vw.begin(), vw.end(), vw_before);
  auto target_at = [&](std::size_t t) { return t == 0 ? c : negatives[t - 1]; };

  for (std::size_t t = 0; t < n_targets; ++t) {
    auto vt = model.output(target_at(t));
    const Real s = sigmoid(dot<Real>(vw, vt));
    const Real g = (t == 0 ? Real(1) - s : -s) * lr;
    coeff[t] = g;
    for (std::size_t k = 0; k < dim; ++k) input_delta[k] += g * vt[k];
  }
  for (std::size_t t = 0; t < n_targets; ++t) {
    auto vt = model.output(target_at(t));
    const Real g = coeff[t];
    for (std::size_t k = 0; k < dim; ++k) vt[k] += g * vw_before[k];
  }
  for (std::size_t k = 0; k < dim; ++k) vw[k] += input_delta[k];
}

template <typename Real>
void sgd_step(BasicModel<Real>& model, WordId w, WordId c, std::span<const WordId> negatives, Real lr) {
  std::vector<Real> scratch;
  sgd_step(model, w, c, negatives, lr, scratch);
}

}  // namespace mge
