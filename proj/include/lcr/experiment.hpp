#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "lcr/io.hpp"
#include "lcr/metrics.hpp"
#include "lcr/solver.hpp"

namespace lcr {

struct MaskingDirective {
  enum class Kind { FileMask, Uniform, Slice };
  Kind kind = Kind::Uniform;
  std::string mask_path;  // FileMask
  double missing_rate = 0.0;  // Uniform
  double row_rate = 0.0;      // Slice
  double col_rate = 0.0;      // Slice
  std::uint64_t seed = 0;
};

std::string_view to_string(MaskingDirective::Kind kind);

/// Solver settings as given by the user: an optional preset plus explicit
/// values. See resolve_config.
struct ConfigOverrides {
  std::optional<std::string> preset;
  std::optional<Variant> variant;
  std::optional<std::size_t> tau;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<double> eta;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<unsigned> threads;
};
struct ExperimentSpec {
  std::string dataset_path;
  std::optional<Format> format;
  MaskingDirective masking;
  ConfigOverrides solver;
  bool report_mape = true;
  bool report_rmse = true;
  /// PSNR is reported when a peak is known: this value, or the dataset's
  /// format maximum (255 for rasters).
  std::optional<double> peak;
  bool report_psnr = true;
  EvalScope error_scope = EvalScope::Hidden;
  EvalScope psnr_scope = EvalScope::All;
  std::string output_path;                  // JSON report
  std::optional<std::string> reconstruction_path;
  std::optional<Format> reconstruction_format;
};

/// Everything run_experiment measured, before serialisation.
struct ExperimentResult {
  SolverConfig config;
  SolveReport solve;
  ObservationMask experiment_mask;
  std::size_t evaluated = 0;
  std::optional<MapeResult> mape;
  std::optional<double> rmse;
  std::optional<double> psnr;
  std::optional<double> peak;
  double ingest_ms = 0.0;
  double solve_ms = 0.0;
  double evaluate_ms = 0.0;
};

/// Builds the experiment mask for a dataset of `shape`.
ObservationMask make_experiment_mask(const MaskingDirective& directive,
                                     const Shape& shape);

/// In-memory core: masks the dataset, solves, evaluates on the hidden
/// entries. Throws EmptyEvaluationSet if the mask hides nothing with a known
/// ground truth.
ExperimentResult evaluate_experiment(const ExperimentSpec& spec,
                                     const Dataset& data);

/// Loads the dataset, runs evaluate_experiment, writes the reconstruction
/// and the JSON report, and returns the report.
nlohmann::json run_experiment(const ExperimentSpec& spec);

nlohmann::json make_report(const ExperimentSpec& spec, const Dataset& data,
                           const ExperimentResult& result,
                           const std::string& reconstruction_path);

/// Top-level keys whose values depend on wall-clock time.
inline constexpr const char* kTimingKey = "timing_ms";

/// Parses an experiment config file (JSON). Keys mirror the CLI flags:
/// dataset, format, preset, variant, tau, lambda, gamma, eta, max_iter, tol,
/// threads, missing_rate, row_rate, col_rate, mask, seed, peak, output,
/// reconstruction.
ExperimentSpec load_experiment_spec(const std::string& path);

/// Preset defaults for `shape`, then explicit overrides. gamma and eta follow
/// lambda through the preset ratios unless they are overridden themselves.
SolverConfig resolve_config(const ConfigOverrides& overrides, const Shape& shape);

nlohmann::json to_json(const SolverConfig& config);

}  // namespace lcr
