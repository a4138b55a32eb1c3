#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lcr/metrics.hpp"

using namespace lcr;

namespace {

EvalSet pairs(std::vector<double> actual, std::vector<double> predicted) {
  return EvalSet{std::move(actual), std::move(predicted)};
}

}  // namespace

TEST_CASE("MAPE") {
  CHECK(mape(pairs({3, 4, 5}, {3, 4, 5})).percent == 0.0);
  CHECK(mape(pairs({100}, {98})).percent == doctest::Approx(2.0));
  CHECK(mape(pairs({50, 100}, {55, 90})).percent == doctest::Approx(10.0));
  // Negative actual values use |y| in the denominator.
  CHECK(mape(pairs({-50}, {-45})).percent == doctest::Approx(10.0));

  auto with_zero = mape(pairs({0, 100}, {3, 98}));
  CHECK(with_zero.percent == doctest::Approx(2.0));
  CHECK(with_zero.excluded == 1);
  CHECK_THROWS_AS(mape(pairs({0, 1e-12}, {1, 1})), AllActualsZero);
}

TEST_CASE("RMSE") {
  CHECK(rmse(pairs({1, 2}, {1, 2})) == 0.0);
  CHECK(rmse(pairs({0, 0}, {3, 4})) == doctest::Approx(std::sqrt(12.5)));

  std::mt19937_64 rng(41);
  std::vector<double> a(50), b(50);
  std::normal_distribution<double> d;
  for (std::size_t i = 0; i < 50; ++i) {
    a[i] = d(rng);
    b[i] = d(rng);
  }
  const double before = rmse(pairs(a, b));
  const double before_mape = mape(pairs(a, b)).percent;
  std::vector<std::size_t> order(50);
  for (std::size_t i = 0; i < 50; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> a2, b2;
  for (std::size_t i : order) {
    a2.push_back(a[i]);
    b2.push_back(b[i]);
  }
  CHECK(rmse(pairs(a2, b2)) == doctest::Approx(before).epsilon(1e-14));
  CHECK(mape(pairs(a2, b2)).percent == doctest::Approx(before_mape).epsilon(1e-14));
  CHECK(before > 0.0);
}

TEST_CASE("PSNR") {
  DataGrid ref({4}, {0.1, 0.2, 0.3, 0.4});
  CHECK(std::isinf(psnr(ref, ref, 1.0)));
  CHECK(psnr(ref, ref, 1.0) > 0.0);

  DataGrid off({4}, {0.2, 0.3, 0.4, 0.5});  // MSE = 0.01
  CHECK(psnr(ref, off, 1.0) == doctest::Approx(20.0));
  CHECK(psnr(ref, off, 2.0) - psnr(ref, off, 1.0) == doctest::Approx(20.0 * std::log10(2.0)));

  DataGrid worse({4}, {0.3, 0.4, 0.5, 0.6});
  CHECK(psnr(ref, worse, 1.0) < psnr(ref, off, 1.0));
  CHECK(psnr(pairs({0.1, 0.2}, {0.2, 0.3}), 1.0) == doctest::Approx(20.0));
}

TEST_CASE("evaluation sets") {
  DataGrid truth({4}, {1, 2, 3, 4});
  DataGrid estimate({4}, {1, 5, 3, 8});
  ObservationMask mask({4}, std::vector<std::uint8_t>{1, 0, 1, 0});

  auto hidden = evaluation_set(truth, estimate, mask, EvalScope::Hidden);
  CHECK(hidden.actual == std::vector<double>{2, 4});
  CHECK(hidden.predicted == std::vector<double>{5, 8});
  CHECK(evaluation_set(truth, estimate, mask, EvalScope::All).size() == 4);

  ObservationMask known({4}, std::vector<std::uint8_t>{1, 1, 1, 0});
  CHECK(evaluation_set(truth, estimate, mask, EvalScope::Hidden, &known).size() == 1);

  CHECK_THROWS_AS(evaluation_set(truth, estimate, ObservationMask({4}, true), EvalScope::Hidden),
                  EmptyEvaluationSet);
  CHECK_THROWS_AS(evaluation_set(truth, DataGrid({3}), mask, EvalScope::Hidden), ShapeMismatch);
}
