#pragma once

#include <cstddef>
#include <vector>

#include "lcr/grid.hpp"
#include "lcr/masking.hpp"

namespace lcr {

/// Paired ground-truth and estimated values at the evaluated entries.
struct EvalSet {
  std::vector<double> actual;
  std::vector<double> predicted;

  std::size_t size() const noexcept { return actual.size(); }
};

enum class EvalScope {
  Hidden,  // entries the mask hides (imputation experiments)
  All,     // every entry (whole-image PSNR)
};

/// Collects entries of `truth` / `estimate` selected by `scope`. Entries
/// with no ground truth (`truth_known` false) are skipped. Throws
/// EmptyEvaluationSet when nothing is selected.
EvalSet evaluation_set(const DataGrid& truth, const DataGrid& estimate,
                       const ObservationMask& mask, EvalScope scope,
                       const ObservationMask* truth_known = nullptr);

struct MapeResult {
  double percent = 0.0;
  std::size_t excluded = 0;  // entries with |actual| <= 1e-9
};

/// Mean absolute percentage error, in percent, over entries with a
/// non-zero actual value. Throws AllActualsZero if none qualify.
MapeResult mape(const EvalSet& e);

double rmse(const EvalSet& e);

/// 10 log10(peak^2 / MSE) over all entries. Identical inputs give +inf.
double psnr(const DataGrid& reference, const DataGrid& reconstruction,
            double peak);
/// Same, over an evaluation set.
double psnr(const EvalSet& e, double peak);

}  // namespace lcr
