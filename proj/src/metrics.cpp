#include "lcr/metrics.hpp"

#include <cmath>
#include <limits>

namespace lcr {

namespace {

void require_nonempty(const EvalSet& e) {
  if (e.actual.size() != e.predicted.size()) {
    throw ShapeMismatch("evaluation set has " + std::to_string(e.actual.size()) +
                        " actual and " + std::to_string(e.predicted.size()) +
                        " predicted values");
  }
  if (e.actual.empty()) throw EmptyEvaluationSet("no entries to evaluate");
}

double mean_squared_error(const EvalSet& e) {
  double sum = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double d = e.actual[i] - e.predicted[i];
    sum += d * d;
  }
  return sum / static_cast<double>(e.size());
}

}  // namespace

EvalSet evaluation_set(const DataGrid& truth, const DataGrid& estimate,
                       const ObservationMask& mask, EvalScope scope,
                       const ObservationMask* truth_known) {
  require_same_shape(truth.shape(), estimate.shape(), "evaluation");
  require_same_shape(truth.shape(), mask.shape(), "evaluation mask");
  if (truth_known) {
    require_same_shape(truth.shape(), truth_known->shape(), "ground-truth mask");
  }
  EvalSet e;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (scope == EvalScope::Hidden && mask.observed(i)) continue;
    if (truth_known && !truth_known->observed(i)) continue;
    e.actual.push_back(truth[i]);
    e.predicted.push_back(estimate[i]);
  }
  if (e.actual.empty()) {
    throw EmptyEvaluationSet(scope == EvalScope::Hidden
                                 ? "the mask hides no entry with known ground truth"
                                 : "no entry with known ground truth");
  }
  return e;
}

MapeResult mape(const EvalSet& e) {
  require_nonempty(e);
  MapeResult result;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (std::abs(e.actual[i]) <= 1e-9) {
      ++result.excluded;
      continue;
    }
    sum += std::abs(e.actual[i] - e.predicted[i]) / std::abs(e.actual[i]);
    ++used;
  }
  if (used == 0) {
    throw AllActualsZero("MAPE undefined: every actual value is zero");
  }
  result.percent = sum / static_cast<double>(used) * 100.0;
  return result;
}

double rmse(const EvalSet& e) {
  require_nonempty(e);
  return std::sqrt(mean_squared_error(e));
}

double psnr(const EvalSet& e, double peak) {
  require_nonempty(e);
  if (!(peak > 0.0)) throw InvalidConfig("PSNR peak must be positive");
  const double mse = mean_squared_error(e);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const DataGrid& reference, const DataGrid& reconstruction,
            double peak) {
  require_same_shape(reference.shape(), reconstruction.shape(), "psnr");
  return psnr(EvalSet{reference.data(), reconstruction.data()}, peak);
}

}  // namespace lcr
