#include "lcr/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "lcr/spectral.hpp"

namespace lcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t required_rank(Variant v) {
  switch (v) {
    case Variant::Lcr1D:
      return 1;
    case Variant::Lcr3D:
      return 3;
    default:
      return 2;
  }
}

Variant default_circnnm_base(std::size_t rank) {
  switch (rank) {
    case 1:
      return Variant::Lcr1D;
    case 3:
      return Variant::Lcr3D;
    default:
      return Variant::LcrVec;
  }
}

// State and buffers for one ADMM run over a fixed shape. The kernel enters
// only through |K_hat|^2 (for the x-update) and the kernel grid itself (for
// the optional objective trace).
class AdmmEngine {
 public:
  AdmmEngine(const Shape& shape, std::vector<double> kernel_power,
             DataGrid kernel, const SolverConfig& config)
      : transform_(shape),
        power_(std::move(kernel_power)),
        kernel_(std::move(kernel)),
        config_(config),
        threshold_(static_cast<double>(element_count(shape)) / config.lambda),
        spectrum_(transform_.size()) {}

  SolveReport run(const DataGrid& y, const ObservationMask& mask);

 private:
  GridTransform transform_;
  std::vector<double> power_;
  DataGrid kernel_;
  const SolverConfig& config_;
  double threshold_;
  std::vector<cplx> spectrum_;
};

SolveReport AdmmEngine::run(const DataGrid& y, const ObservationMask& mask) {
  const double lambda = config_.lambda;
  const double gamma = config_.gamma;
  const std::size_t count = y.size();

  SolveReport report;
  report.resolved_variant = config_.variant;
  if (mask.observed_count() == 0) {
    report.reconstruction = DataGrid(y.shape());
    report.converged = true;
    report.all_missing = true;
    return report;
  }

  DataGrid x = project(y, mask);
  DataGrid z = x;
  DataGrid w(y.shape());
  DataGrid x_prev(y.shape());

  for (int iter = 0; iter < config_.max_iter; ++iter) {
    for (std::size_t i = 0; i < count; ++i) {
      spectrum_[i] = lambda * z[i] - w[i];
    }
    transform_.forward(spectrum_);
    for (std::size_t i = 0; i < count; ++i) {
      const cplx h = spectrum_[i] / (gamma * power_[i] + lambda);
      spectrum_[i] = complex_soft_threshold(h, threshold_);
    }
    transform_.inverse(spectrum_);

    std::swap(x, x_prev);
    double max_re = 0.0;
    double max_im = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      x[i] = spectrum_[i].real();
      max_re = std::max(max_re, std::abs(spectrum_[i].real()));
      max_im = std::max(max_im, std::abs(spectrum_[i].imag()));
    }
    if (max_im > 1e-6 * max_re) {
      throw ImaginaryResidueTooLarge(
          "x-update left an imaginary residue of " + std::to_string(max_im) +
          " at iteration " + std::to_string(iter + 1));
    }
    report.imaginary_residue_max = std::max(report.imaginary_residue_max, max_im);

    double change = 0.0;
    double prev_norm = 0.0;
    double x_norm = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double d = x[i] - x_prev[i];
      change += d * d;
      prev_norm += x_prev[i] * x_prev[i];
      x_norm += x[i] * x[i];
    }
    change = std::sqrt(change);
    prev_norm = std::sqrt(prev_norm);
    x_norm = std::sqrt(x_norm);

    // z and w in one pass; both formulas match z_update / w_update.
    double primal = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (mask.observed(i)) {
        z[i] = std::isinf(config_.eta)
                   ? y[i]
                   : (lambda * x[i] + w[i] + config_.eta * y[i]) /
                         (lambda + config_.eta);
      } else {
        z[i] = x[i] + w[i] / lambda;
      }
      const double r = x[i] - z[i];
      w[i] += lambda * r;
      primal += r * r;
    }
    primal = std::sqrt(primal);

    double rel;
    if (prev_norm > 0.0) {
      rel = change / prev_norm;
    } else {
      // x was zero: only a zero x with zero primal residual is stationary.
      rel = (change == 0.0 && primal == 0.0) ? 0.0 : kInf;
    }

    report.iterations_run = iter + 1;
    report.primal_residual_history.push_back(primal);
    report.final_primal_residual = primal;
    report.last_rel_change = rel;
    if (config_.track_objective) {
      report.objective_trace.push_back(objective(x, kernel_, gamma));
    }
    // A small step alone can mean a stalled dual; also require x and z to
    // agree to the same relative tolerance.
    if (rel <= config_.tol && primal <= config_.tol * x_norm) {
      report.converged = true;
      break;
    }
  }
  report.reconstruction = std::move(x);
  return report;
}

std::vector<double> squared_modulus(std::span<const cplx> spectrum) {
  std::vector<double> out(spectrum.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(spectrum[i]);
  return out;
}

// A kernel is only needed when gamma > 0; with gamma == 0 the denominator
// gamma * 0 + lambda is exactly lambda, same as gamma * |K_hat|^2 + lambda.
SolveReport run_1d(const DataGrid& y, const ObservationMask& mask,
                   const SolverConfig& config) {
  const std::size_t length = y.size();
  if (config.gamma > 0.0) {
    const LaplacianKernel kernel(length, config.tau);
    AdmmEngine engine({length}, squared_modulus(kernel.dft()), kernel.grid(),
                      config);
    return engine.run(y, mask);
  }
  AdmmEngine engine({length}, std::vector<double>(length, 0.0),
                    DataGrid({1}, {0.0}), config);
  return engine.run(y, mask);
}

SolveReport run_separable(const DataGrid& y, const ObservationMask& mask,
                          const SolverConfig& config) {
  if (config.gamma > 0.0) {
    const SeparableKernel kernel =
        y.rank() == 2
            ? separable_kernel_2d(y.extent(0), y.extent(1), config.tau)
            : SeparableKernel({laplacian_kernel(y.extent(0), config.tau).values(),
                               laplacian_kernel(y.extent(1), config.tau).values(),
                               spatial_unit_kernel(y.extent(2))});
    AdmmEngine engine(y.shape(), squared_modulus(kernel.dft().values()),
                      kernel.full_grid(), config);
    return engine.run(y, mask);
  }
  Shape unit(y.rank(), 1);
  AdmmEngine engine(y.shape(), std::vector<double>(y.size(), 0.0),
                    DataGrid(unit, {0.0}), config);
  return engine.run(y, mask);
}

SolveReport run_vectorized(const DataGrid& y, const ObservationMask& mask,
                           const SolverConfig& config) {
  // Row-major storage of an N x T matrix is already vec(X^T).
  const Shape flat{y.size()};
  SolveReport report =
      run_1d(DataGrid(flat, y.data()), ObservationMask(flat, mask.flags()), config);
  report.reconstruction = DataGrid(y.shape(), report.reconstruction.data());
  return report;
}

SolveReport run_per_series(const DataGrid& y, const ObservationMask& mask,
                           const SolverConfig& config) {
  const std::size_t series = y.extent(0);
  const std::size_t length = y.extent(1);
  std::vector<SolveReport> rows(series);

  const auto solve_row = [&](std::size_t n) {
    const auto begin = y.data().begin() + static_cast<std::ptrdiff_t>(n * length);
    const auto mbegin =
        mask.flags().begin() + static_cast<std::ptrdiff_t>(n * length);
    DataGrid row({length}, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(length)));
    ObservationMask row_mask(
        {length}, std::vector<std::uint8_t>(mbegin, mbegin + static_cast<std::ptrdiff_t>(length)));
    rows[n] = run_1d(row, row_mask, config);
  };

  unsigned threads = config.threads ? config.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, series));
  if (threads <= 1) {
    for (std::size_t n = 0; n < series; ++n) solve_row(n);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t n = next++; n < series; n = next++) {
          try {
            solve_row(n);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Combine in row order so the result does not depend on scheduling.
  SolveReport report;
  report.resolved_variant = Variant::LcrN;
  report.reconstruction = DataGrid(y.shape());
  report.converged = true;
  report.all_missing = true;
  std::size_t longest = 0;
  for (const auto& r : rows) {
    longest = std::max(longest, r.primal_residual_history.size());
  }
  report.primal_residual_history.assign(longest, 0.0);
  if (config.track_objective) report.objective_trace.assign(longest, 0.0);
  for (std::size_t n = 0; n < series; ++n) {
    const SolveReport& r = rows[n];
    std::copy(r.reconstruction.data().begin(), r.reconstruction.data().end(),
              report.reconstruction.values().begin() +
                  static_cast<std::ptrdiff_t>(n * length));
    report.iterations_run = std::max(report.iterations_run, r.iterations_run);
    report.converged = report.converged && r.converged;
    report.all_missing = report.all_missing && r.all_missing;
    report.last_rel_change = std::max(report.last_rel_change, r.last_rel_change);
    report.imaginary_residue_max =
        std::max(report.imaginary_residue_max, r.imaginary_residue_max);
    // A series that stopped early keeps contributing its last value.
    for (std::size_t i = 0; i < longest; ++i) {
      const auto& h = r.primal_residual_history;
      if (!h.empty()) {
        const double v = h[std::min(i, h.size() - 1)];
        report.primal_residual_history[i] += v * v;
      }
      const auto& o = r.objective_trace;
      if (config.track_objective && !o.empty()) {
        report.objective_trace[i] += o[std::min(i, o.size() - 1)];
      }
    }
  }
  for (double& v : report.primal_residual_history) v = std::sqrt(v);
  if (!report.primal_residual_history.empty()) {
    report.final_primal_residual = report.primal_residual_history.back();
  }
  return report;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Lcr1D:
      return "lcr1d";
    case Variant::Lcr2D:
      return "lcr2d";
    case Variant::Lcr3D:
      return "lcr3d";
    case Variant::LcrN:
      return "lcr_n";
    case Variant::LcrVec:
      return "lcr_vec";
    case Variant::CircNNM:
      return "circnnm";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  const std::string key = lower(name);
  for (Variant v : {Variant::Lcr1D, Variant::Lcr2D, Variant::Lcr3D,
                    Variant::LcrN, Variant::LcrVec, Variant::CircNNM}) {
    if (key == to_string(v)) return v;
  }
  if (key == "lcrn") return Variant::LcrN;
  if (key == "lcrvec") return Variant::LcrVec;
  throw InvalidConfig("unknown variant '" + std::string(name) +
                      "' (expected lcr1d, lcr2d, lcr3d, lcr_n, lcr_vec or "
                      "circnnm)");
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidConfig("lambda must be a positive finite number");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidConfig("gamma must be finite and >= 0");
  }
  if (!(eta > 0.0)) throw InvalidConfig("eta must be > 0");
  if (max_iter < 1) throw InvalidConfig("max_iter must be >= 1");
  if (!(tol > 0.0)) throw InvalidConfig("tol must be > 0");
  if (tau < 1) throw InvalidTau("tau must be >= 1");
  if (circnnm_base && *circnnm_base == Variant::CircNNM) {
    throw InvalidConfig("CircNNM cannot use itself as its base layout");
  }
}

ComplexGrid h_update(const ComplexGrid& z_hat, const ComplexGrid& w_hat,
                     const ComplexGrid& ell_hat, double lambda, double gamma) {
  require_same_shape(z_hat.shape(), w_hat.shape(), "h_update");
  require_same_shape(z_hat.shape(), ell_hat.shape(), "h_update kernel");
  ComplexGrid out(z_hat.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (lambda * z_hat[i] - w_hat[i]) /
             (gamma * std::norm(ell_hat[i]) + lambda);
  }
  return out;
}

cplx complex_soft_threshold(cplx h, double threshold) {
  const double modulus = std::abs(h);
  if (modulus <= threshold) return {};
  return h * ((modulus - threshold) / modulus);
}

ComplexGrid complex_soft_threshold(const ComplexGrid& h_hat, double threshold) {
  ComplexGrid out(h_hat.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = complex_soft_threshold(h_hat[i], threshold);
  }
  return out;
}

DataGrid z_update(const DataGrid& x, const DataGrid& w, const DataGrid& y,
                  const ObservationMask& mask, double lambda, double eta) {
  require_same_shape(x.shape(), w.shape(), "z_update");
  require_same_shape(x.shape(), y.shape(), "z_update");
  require_same_shape(x.shape(), mask.shape(), "z_update mask");
  DataGrid z(x.shape());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!mask.observed(i)) {
      z[i] = x[i] + w[i] / lambda;
    } else if (std::isinf(eta)) {
      z[i] = y[i];
    } else {
      z[i] = (lambda * x[i] + w[i] + eta * y[i]) / (lambda + eta);
    }
  }
  return z;
}

DataGrid w_update(const DataGrid& w, const DataGrid& x, const DataGrid& z,
                  double lambda) {
  require_same_shape(w.shape(), x.shape(), "w_update");
  require_same_shape(w.shape(), z.shape(), "w_update");
  DataGrid out(w.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = w[i] + lambda * (x[i] - z[i]);
  }
  return out;
}

double circulant_nuclear_norm(const DataGrid& x) {
  const ComplexGrid spectrum = dft(x);
  double sum = 0.0;
  for (const cplx& v : spectrum.values()) sum += std::abs(v);
  return sum;
}

double objective(const DataGrid& x, const DataGrid& kernel, double gamma) {
  const double nuclear = circulant_nuclear_norm(x);
  if (gamma == 0.0) return nuclear;
  return nuclear + gamma * temporal_regularizer(x, kernel);
}

double objective(const DataGrid& x, const LaplacianKernel& kernel,
                 double gamma) {
  const double nuclear = circulant_nuclear_norm(x);
  if (gamma == 0.0) return nuclear;
  return nuclear + gamma * temporal_regularizer(x, kernel);
}

double objective(const DataGrid& x, const SeparableKernel& kernel,
                 double gamma) {
  const double nuclear = circulant_nuclear_norm(x);
  if (gamma == 0.0) return nuclear;
  return nuclear + gamma * temporal_regularizer(x, kernel);
}

SolveReport solve(const DataGrid& y, const ObservationMask& mask,
                  const SolverConfig& config) {
  config.validate();
  require_same_shape(y.shape(), mask.shape(), "solve mask");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw NonFiniteInput("input value at flat index " + std::to_string(i) +
                           " is not finite");
    }
  }

  SolverConfig effective = config;
  if (config.variant == Variant::CircNNM) {
    effective.variant = config.circnnm_base.value_or(default_circnnm_base(y.rank()));
    effective.gamma = 0.0;
  }
  if (y.rank() != required_rank(effective.variant)) {
    throw ConfigRankMismatch("variant " + std::string(to_string(effective.variant)) +
                             " needs rank " +
                             std::to_string(required_rank(effective.variant)) +
                             " data, got shape " + to_string(y.shape()));
  }

  SolveReport report;
  switch (effective.variant) {
    case Variant::Lcr1D:
      report = run_1d(y, mask, effective);
      break;
    case Variant::Lcr2D:
    case Variant::Lcr3D:
      report = run_separable(y, mask, effective);
      break;
    case Variant::LcrN:
      report = run_per_series(y, mask, effective);
      break;
    case Variant::LcrVec:
      report = run_vectorized(y, mask, effective);
      break;
    case Variant::CircNNM:
      throw InvalidConfig("unresolved CircNNM base");
  }
  report.resolved_variant = effective.variant;
  return report;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"lcr1d", Variant::Lcr1D, 5e-3, true, 2.0, 1e3, 2,
       "univariate; lambda and eta reuse the per-series rule"},
      {"lcr1d-exact", Variant::Lcr1D, 5e-3, true, 2.0, kInf, 2,
       "univariate with observations enforced exactly"},
      {"lcr2d", Variant::Lcr2D, 1e-5, true, 5.0, 1e2, 2,
       "lambda = 1e-5 NT, eta = 1e2 lambda, gamma = 5 lambda"},
      {"lcr_n", Variant::LcrN, 5e-3, true, 5.0, 1e3, 2,
       "lambda = 5e-3 T, eta = 1e3 lambda, gamma = 5 lambda"},
      {"lcr_vec", Variant::LcrVec, 5e-6, true, 5.0, 1e2, 2,
       "lambda = 5e-6 NT, eta = 1e2 lambda, gamma = 5 lambda"},
      {"circnnm", Variant::CircNNM, 5e-7, true, 0.0, 1e2, 2,
       "lambda = 5e-7 NT, eta = 1e2 lambda, gamma = 0"},
      {"circnnm1d", Variant::CircNNM, 5e-3, true, 0.0, 1e3, 2,
       "univariate baseline with the lcr1d lambda rule and gamma = 0"},
      {"lcr3d", Variant::Lcr3D, 1e-4, true, 1.0, 1e2, 2,
       "images: lambda = 1e-4 MNC, eta = 1e2 lambda, gamma = lambda"},
  };
  return table;
}

const Preset& find_preset(std::string_view name) {
  const std::string key = lower(name);
  for (const Preset& p : presets()) {
    if (p.name == key) return p;
  }
  if (key == "lcrn") return find_preset("lcr_n");
  if (key == "lcrvec") return find_preset("lcr_vec");
  throw InvalidConfig("unknown preset '" + std::string(name) + "'");
}

double preset_scale(const Preset& preset, const Shape& shape) {
  if (!preset.lambda_scales_with_size) return 1.0;
  if (preset.variant == Variant::LcrN) return static_cast<double>(shape.back());
  return static_cast<double>(element_count(shape));
}

SolverConfig make_config(const Preset& preset, const Shape& shape) {
  SolverConfig config;
  config.variant = preset.variant;
  config.lambda = preset.lambda_per_element * preset_scale(preset, shape);
  config.gamma = preset.gamma_ratio * config.lambda;
  config.eta = std::isinf(preset.eta_ratio) ? kInf : preset.eta_ratio * config.lambda;
  config.tau = preset.tau;
  return config;
}

}  // namespace lcr
