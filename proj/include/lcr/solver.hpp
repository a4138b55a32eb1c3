#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcr/grid.hpp"
#include "lcr/kernels.hpp"
#include "lcr/masking.hpp"

namespace lcr {

enum class Variant {
  Lcr1D,    // one series, Laplacian kernel in time
  Lcr2D,    // N x T matrix, separable kernel e_1 (x) laplacian
  Lcr3D,    // M x N x C image, laplacian (x) laplacian (x) e_1
  LcrN,     // N x T matrix solved as N independent 1D problems
  LcrVec,   // N x T matrix flattened series after series into one 1D problem
  CircNNM,  // any of the above with gamma = 0
};

std::string_view to_string(Variant v);
/// Accepts the names printed by to_string, case-insensitively.
Variant parse_variant(std::string_view name);

struct SolverConfig {
  double lambda = 1.0;
  double gamma = 0.0;
  /// Weight of the observation fit. +infinity enforces the observations
  /// exactly (z takes y on the observed entries).
  double eta = 100.0;
  std::size_t tau = 2;
  int max_iter = 100;
  double tol = 1e-4;
  Variant variant = Variant::Lcr1D;
  /// Layout CircNNM runs on. Defaults by rank: Lcr1D, LcrVec, Lcr3D.
  std::optional<Variant> circnnm_base;
  bool track_objective = false;
  /// Worker threads for LcrN; 0 means hardware concurrency.
  unsigned threads = 1;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const;
};

struct SolveReport {
  DataGrid reconstruction;
  int iterations_run = 0;
  bool converged = false;
  double final_primal_residual = 0.0;
  double last_rel_change = 0.0;
  std::vector<double> primal_residual_history;
  std::vector<double> objective_trace;
  double imaginary_residue_max = 0.0;
  /// Set when no entry was observed; the reconstruction is then all zeros.
  bool all_missing = false;
  /// The variant that actually ran (CircNNM resolves to its base layout).
  Variant resolved_variant = Variant::Lcr1D;
};

/// (lambda z_hat - w_hat) / (gamma |ell_hat|^2 + lambda), entry-wise.
/// The denominator uses the squared modulus, so it is real and >= lambda.
ComplexGrid h_update(const ComplexGrid& z_hat, const ComplexGrid& w_hat,
                     const ComplexGrid& ell_hat, double lambda, double gamma);

/// Proximal operator of threshold * |.|_1 in complex space: shrinks every
/// modulus by `threshold`, floors at zero, keeps the phase.
ComplexGrid complex_soft_threshold(const ComplexGrid& h_hat, double threshold);
cplx complex_soft_threshold(cplx h, double threshold);

/// (lambda x + w + eta y) / (lambda + eta) on observed entries and
/// x + w / lambda elsewhere. eta = +inf puts y on the observed entries.
DataGrid z_update(const DataGrid& x, const DataGrid& w, const DataGrid& y,
                  const ObservationMask& mask, double lambda, double eta);

/// w + lambda (x - z).
DataGrid w_update(const DataGrid& w, const DataGrid& x, const DataGrid& z,
                  double lambda);

/// Nuclear norm of the circulant matrix (or tensor) generated by x, which is
/// the l1 norm of its DFT.
double circulant_nuclear_norm(const DataGrid& x);

/// circulant_nuclear_norm(x) + gamma * temporal_regularizer(x, kernel).
double objective(const DataGrid& x, const DataGrid& kernel, double gamma);
double objective(const DataGrid& x, const LaplacianKernel& kernel, double gamma);
double objective(const DataGrid& x, const SeparableKernel& kernel, double gamma);

/// Runs the ADMM loop for the configured variant.
///
/// Starts from x = z = P_Omega(y), w = 0. Each iteration transforms
/// lambda z - w, divides by gamma |K_hat|^2 + lambda, soft-thresholds with
/// P / lambda (P = element count of the transform domain), inverts, then
/// applies z_update and w_update. Converges once
/// ||x_new - x_old||_F / ||x_old||_F <= tol and ||x - z||_F <= tol ||x||_F;
/// otherwise stops after max_iter iterations.
SolveReport solve(const DataGrid& y, const ObservationMask& mask,
                  const SolverConfig& config);

/// Named hyperparameter rule. lambda scales with the problem size; gamma and
/// eta are multiples of lambda.
struct Preset {
  std::string name;
  Variant variant;
  double lambda_per_element;  // lambda = lambda_per_element * scale
  bool lambda_scales_with_size;
  double gamma_ratio;
  double eta_ratio;  // +inf for the exact-observation preset
  std::size_t tau;
  std::string_view note;
};

const std::vector<Preset>& presets();
/// Throws InvalidConfig for unknown names.
const Preset& find_preset(std::string_view name);
/// Element count the preset's lambda rule scales with: T for 1D and LcrN,
/// N*T for matrix-wide variants, M*N*C for images.
double preset_scale(const Preset& preset, const Shape& shape);
SolverConfig make_config(const Preset& preset, const Shape& shape);

}  // namespace lcr
