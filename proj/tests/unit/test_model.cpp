#include <doctest.h>

#include <cmath>

#include "mge/model.hpp"

using namespace mge;

namespace {

BasicModel<double> random_model(Rng& rng, std::size_t rows, std::size_t dim, double scale,
                                ContextVectors context = ContextVectors::separate) {
  BasicModel<double> m(rows, dim, context);
  for (auto& v : m.input_data()) v = rng.uniform(-scale, scale);
  for (auto& v : m.output_data()) v = rng.uniform(-scale, scale);
  return m;
}

double direct_objective(const BasicModel<double>& m, WordId w, WordId c, const std::vector<WordId>& negs) {
  auto dotp = [&](WordId o) {
    double s = 0;
    for (std::size_t k = 0; k < m.dim(); ++k) s += m.input(w)[k] * m.output(o)[k];
    return s;
  };
  double total = std::log(1.0 / (1.0 + std::exp(-dotp(c))));
  for (WordId n : negs) total += std::log(1.0 / (1.0 + std::exp(dotp(n))));
  return total;
}

}  // namespace

TEST_CASE("init_model") {
  auto m = init_model<float>(10, 4, 7);
  for (float v : m.input_data()) {
    CHECK(v >= -0.125f);
    CHECK(v <= 0.125f);
  }
  for (float v : m.output_data()) CHECK(v == 0.0f);
  CHECK(m == init_model<float>(10, 4, 7));
  CHECK_FALSE(m == init_model<float>(10, 4, 8));
}

TEST_CASE("pair_objective") {
  BasicModel<double> zero(4, 3);
  std::vector<WordId> negs{1, 2, 3};
  CHECK(pair_objective(zero, 0, 1, std::span<const WordId>(negs)) == doctest::Approx(4 * std::log(0.5)).epsilon(1e-15));

  BasicModel<double> sat(2, 1);
  sat.input(0)[0] = 4.0;
  sat.output(1)[0] = 5.0;
  CHECK(std::abs(pair_objective(sat, 0, 1, {})) < 1e-8);

  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    auto m = random_model(rng, 6, 8, 0.5);
    std::vector<WordId> n{2, 3, 5};
    CHECK(std::abs(pair_objective(m, 0, 1, std::span<const WordId>(n)) - direct_objective(m, 0, 1, n)) < 1e-12);
  }
}

TEST_CASE("log_sigmoid is stable") {
  CHECK(log_sigmoid(-800.0) == doctest::Approx(-800.0));
  CHECK(log_sigmoid(800.0) == 0.0);
  CHECK(std::isfinite(log_sigmoid(-1e6)));
}

TEST_CASE("zero model step stays zero") {
  BasicModel<double> m(2, 3);
  sgd_step(m, 0, 1, {}, 1.0);
  for (double v : m.input_data()) CHECK(v == 0.0);
  for (double v : m.output_data()) CHECK(v == 0.0);
}

TEST_CASE("step equals lr times analytic gradient and touches only its rows") {
  Rng rng(8);
  for (int round = 0; round < 50; ++round) {
    auto m = random_model(rng, 7, 5, 1.0, round % 2 ? ContextVectors::shared : ContextVectors::separate);
    std::vector<WordId> negs{3, 4, 3, 1};
    const double lr = 0.05;
    auto grad = pair_gradient(m, 1, 2, std::span<const WordId>(negs));
    auto stepped = m;
    sgd_step(stepped, WordId{1}, WordId{2}, std::span<const WordId>(negs), lr);
    for (std::size_t i = 0; i < m.input_data().size(); ++i)
      CHECK(stepped.input_data()[i] == doctest::Approx(m.input_data()[i] + lr * grad.input_data()[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < m.output_data().size(); ++i)
      CHECK(stepped.output_data()[i] == doctest::Approx(m.output_data()[i] + lr * grad.output_data()[i]).epsilon(1e-12));
    for (WordId untouched : {0, 5, 6}) {
      for (std::size_t k = 0; k < 5; ++k) {
        CHECK(stepped.output(untouched)[k] == m.output(untouched)[k]);
        CHECK(stepped.input(untouched)[k] == m.input(untouched)[k]);
      }
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(99);
  for (auto context : {ContextVectors::separate, ContextVectors::shared})
  for (std::size_t dim : {2u, 8u, 32u}) {
    for (int round = 0; round < 20; ++round) {
      auto m = random_model(rng, 8, dim, 0.7, context);
      const auto w = static_cast<WordId>(rng.below(8));
      const auto c = static_cast<WordId>(rng.below(8));
      std::vector<WordId> negs;
      for (int k = 0; k < 1 + static_cast<int>(rng.below(5)); ++k) negs.push_back(static_cast<WordId>(rng.below(8)));
      auto grad = pair_gradient(m, w, c, std::span<const WordId>(negs));
      const double h = 1e-5;
      auto check = [&](std::vector<double>& params, const std::vector<double>& analytic) {
        for (std::size_t i = 0; i < params.size(); ++i) {
          const double saved = params[i];
          params[i] = saved + h;
          const double up = pair_objective(m, w, c, std::span<const WordId>(negs));
          params[i] = saved - h;
          const double down = pair_objective(m, w, c, std::span<const WordId>(negs));
          params[i] = saved;
          const double numeric = (up - down) / (2 * h);
          const double err = std::abs(numeric - analytic[i]) / std::max(1e-6, std::max(std::abs(numeric), std::abs(analytic[i])));
          CHECK(err <= 1e-4);
        }
      };
      check(m.input_data(), grad.input_data());
      check(m.output_data(), grad.output_data());
    }
  }
}

TEST_CASE("repeated steps increase the objective monotonically") {
  Rng rng(5);
  auto m = random_model(rng, 3, 8, 0.3);
  std::vector<WordId> negs{2};
  double prev = pair_objective(m, 0, 1, std::span<const WordId>(negs));
  for (int i = 0; i < 100; ++i) {
    sgd_step(m, WordId{0}, WordId{1}, std::span<const WordId>(negs), 0.01);
    const double now = pair_objective(m, 0, 1, std::span<const WordId>(negs));
    CHECK(now > prev);
    prev = now;
  }
}

TEST_CASE("shared context vectors alias one table") {
  auto m = init_model<float>(5, 3, 1, ContextVectors::shared);
  CHECK(m.output_data().empty());
  CHECK(m.output(2).data() == m.input(2).data());
  // A center that is its own context: d/dv log sigma(v.v) = 2 (1 - sigma(v.v)) v.
  BasicModel<double> one(1, 2, ContextVectors::shared);
  one.input(0)[0] = 0.3;
  one.input(0)[1] = -0.4;
  const double s = 1.0 / (1.0 + std::exp(-0.25));
  sgd_step(one, WordId{0}, WordId{0}, {}, 0.1);
  CHECK(one.input(0)[0] == doctest::Approx(0.3 + 0.1 * 2 * (1 - s) * 0.3).epsilon(1e-14));
  CHECK(one.input(0)[1] == doctest::Approx(-0.4 + 0.1 * 2 * (1 - s) * -0.4).epsilon(1e-14));
}
