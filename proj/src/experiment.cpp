#include "lcr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "lcr/random.hpp"

namespace lcr {

namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// JSON has no infinity; such values are written as the string "inf".
json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string default_reconstruction_path(const ExperimentSpec& spec, Format format) {
  std::string base = spec.output_path;
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json") {
    base.resize(base.size() - 5);
  }
  return base + ".reconstruction." + std::string(to_string(format));
}

}  // namespace

std::string_view to_string(MaskingDirective::Kind kind) {
  switch (kind) {
    case MaskingDirective::Kind::FileMask:
      return "file";
    case MaskingDirective::Kind::Uniform:
      return "uniform";
    case MaskingDirective::Kind::Slice:
      return "slice";
  }
  return "unknown";
}

ObservationMask make_experiment_mask(const MaskingDirective& directive,
                                     const Shape& shape) {
  switch (directive.kind) {
    case MaskingDirective::Kind::FileMask: {
      ObservationMask mask = read_mask(directive.mask_path);
      require_same_shape(mask.shape(), shape, "mask file");
      return mask;
    }
    case MaskingDirective::Kind::Uniform:
      return uniform_random_mask(shape, directive.missing_rate, directive.seed);
    case MaskingDirective::Kind::Slice:
      return slice_mask(shape, directive.row_rate, directive.col_rate, directive.seed);
  }
  throw InvalidConfig("unknown masking directive");
}

ExperimentResult evaluate_experiment(const ExperimentSpec& spec,
                                     const Dataset& data) {
  ExperimentResult result;
  result.experiment_mask = make_experiment_mask(spec.masking, data.grid.shape());
  const ObservationMask solve_mask = result.experiment_mask.intersect(data.mask);

  // Fail before solving if nothing will be evaluated.
  const auto scope_set = [&](EvalScope scope) {
    return evaluation_set(data.grid, data.grid, result.experiment_mask, scope, &data.mask);
  };
  if (spec.report_mape || spec.report_rmse) scope_set(spec.error_scope);

  auto start = Clock::now();
  result.config = resolve_config(spec.solver, data.grid.shape());
  result.solve = solve(project(data.grid, solve_mask), solve_mask, result.config);
  result.solve_ms = elapsed_ms(start);

  start = Clock::now();
  const DataGrid& estimate = result.solve.reconstruction;
  if (spec.report_mape || spec.report_rmse) {
    const EvalSet e = evaluation_set(data.grid, estimate, result.experiment_mask,
                                     spec.error_scope, &data.mask);
    result.evaluated = e.size();
    if (spec.report_rmse) result.rmse = rmse(e);
    if (spec.report_mape) {
      try {
        result.mape = mape(e);
      } catch (const AllActualsZero&) {
        result.mape.reset();
      }
    }
  }
  result.peak = spec.peak ? spec.peak : data.meta.peak;
  if (spec.report_psnr && result.peak) {
    const EvalSet e = evaluation_set(data.grid, estimate, result.experiment_mask,
                                     spec.psnr_scope, &data.mask);
    result.psnr = psnr(e, *result.peak);
  }
  result.evaluate_ms = elapsed_ms(start);
  return result;
}

json to_json(const SolverConfig& config) {
  json j;
  j["variant"] = std::string(to_string(config.variant));
  j["lambda"] = config.lambda;
  j["gamma"] = config.gamma;
  j["eta"] = number_or_inf(config.eta);
  j["tau"] = config.tau;
  j["max_iter"] = config.max_iter;
  j["tol"] = config.tol;
  j["threads"] = config.threads;
  if (config.circnnm_base) {
    j["circnnm_base"] = std::string(to_string(*config.circnnm_base));
  }
  return j;
}

json make_report(const ExperimentSpec& spec, const Dataset& data,
                 const ExperimentResult& result,
                 const std::string& reconstruction_path) {
  json report;
  report["schema_version"] = 1;
  report["dataset"] = {{"path", data.meta.source},
                       {"shape", data.grid.shape()},
                       {"observed_in_file", data.mask.observed_count()}};
  report["preset"] = spec.solver.preset ? json(*spec.solver.preset) : json(nullptr);
  json config = to_json(result.config);
  config["resolved_variant"] = std::string(to_string(result.solve.resolved_variant));
  report["config"] = config;

  json masking = {{"kind", std::string(to_string(spec.masking.kind))},
                  {"generator", Rng::kAlgorithm}};
  switch (spec.masking.kind) {
    case MaskingDirective::Kind::FileMask:
      masking["mask_path"] = spec.masking.mask_path;
      break;
    case MaskingDirective::Kind::Uniform:
      masking["missing_rate"] = spec.masking.missing_rate;
      break;
    case MaskingDirective::Kind::Slice:
      masking["row_rate"] = spec.masking.row_rate;
      masking["col_rate"] = spec.masking.col_rate;
      break;
  }
  masking["hidden_count"] = result.experiment_mask.missing_count();
  report["masking"] = masking;
  report["seed"] = spec.masking.seed;

  const SolveReport& s = result.solve;
  report["iterations"] = s.iterations_run;
  report["converged"] = s.converged;
  report["all_missing"] = s.all_missing;
  report["final_primal_residual"] = s.final_primal_residual;
  report["last_rel_change"] = number_or_inf(s.last_rel_change);
  report["imaginary_residue_max"] = s.imaginary_residue_max;
  report["residuals"] = s.primal_residual_history;
  if (!s.objective_trace.empty()) report["objective_trace"] = s.objective_trace;

  json metrics;
  metrics["evaluated_count"] = result.evaluated;
  metrics["scope"] = spec.error_scope == EvalScope::Hidden ? "hidden" : "all";
  metrics["mape"] = result.mape ? json(result.mape->percent) : json(nullptr);
  metrics["mape_excluded"] = result.mape ? json(result.mape->excluded) : json(nullptr);
  metrics["rmse"] = result.rmse ? json(*result.rmse) : json(nullptr);
  metrics["psnr"] = result.psnr ? number_or_inf(*result.psnr) : json(nullptr);
  metrics["psnr_peak"] = result.psnr ? json(*result.peak) : json(nullptr);
  metrics["psnr_scope"] = spec.psnr_scope == EvalScope::Hidden ? "hidden" : "all";
  report["metrics"] = metrics;
  report["reconstruction_path"] = reconstruction_path;
  report[kTimingKey] = {{"ingest", result.ingest_ms},
                        {"solve", result.solve_ms},
                        {"evaluate", result.evaluate_ms},
                        {"total", result.ingest_ms + result.solve_ms + result.evaluate_ms}};
  return report;
}

json run_experiment(const ExperimentSpec& spec) {
  auto start = Clock::now();
  const Dataset data = load_dataset(spec.dataset_path, spec.format);
  const double ingest_ms = elapsed_ms(start);

  ExperimentResult result = evaluate_experiment(spec, data);
  result.ingest_ms = ingest_ms;

  const Format out_format = spec.reconstruction_format.value_or(
      spec.format.value_or(format_from_path(spec.dataset_path)));
  const std::string recon_path =
      spec.reconstruction_path.value_or(default_reconstruction_path(spec, out_format));
  write_dataset(recon_path, result.solve.reconstruction, nullptr, out_format);

  json report = make_report(spec, data, result, recon_path);
  if (!spec.output_path.empty()) {
    std::ofstream out(spec.output_path, std::ios::trunc);
    if (!out) throw ParseError("cannot write report '" + spec.output_path + "'");
    out << report.dump(2) << '\n';
  }
  return report;
}

SolverConfig resolve_config(const ConfigOverrides& o, const Shape& shape) {
  SolverConfig config;
  double gamma_ratio = 0.0;
  double eta_ratio = 1e2;
  if (o.preset) {
    const Preset& preset = find_preset(*o.preset);
    config = make_config(preset, shape);
    gamma_ratio = preset.gamma_ratio;
    eta_ratio = preset.eta_ratio;
  }
  if (o.variant) config.variant = *o.variant;
  if (o.tau) config.tau = *o.tau;
  if (o.lambda) {
    config.lambda = *o.lambda;
    config.gamma = gamma_ratio * config.lambda;
    config.eta = std::isinf(eta_ratio) ? eta_ratio : eta_ratio * config.lambda;
  }
  if (o.gamma) config.gamma = *o.gamma;
  if (o.eta) config.eta = *o.eta;
  if (o.max_iter) config.max_iter = *o.max_iter;
  if (o.tol) config.tol = *o.tol;
  if (o.threads) config.threads = *o.threads;
  if (config.variant == Variant::CircNNM) config.gamma = 0.0;
  config.validate();
  return config;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": offset " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    ExperimentSpec spec;
    spec.dataset_path = j.at("dataset").get<std::string>();
    if (j.contains("format")) spec.format = parse_format(j["format"].get<std::string>());
    spec.output_path = j.value("output", std::string("report.json"));
    if (j.contains("reconstruction")) {
      spec.reconstruction_path = j["reconstruction"].get<std::string>();
    }
    if (j.contains("peak")) spec.peak = j["peak"].get<double>();

    int directives = 0;
    spec.masking.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("mask")) {
      ++directives;
      spec.masking.kind = MaskingDirective::Kind::FileMask;
      spec.masking.mask_path = j["mask"].get<std::string>();
    }
    if (j.contains("missing_rate")) {
      ++directives;
      spec.masking.kind = MaskingDirective::Kind::Uniform;
      spec.masking.missing_rate = j["missing_rate"].get<double>();
    }
    if (j.contains("row_rate") || j.contains("col_rate")) {
      ++directives;
      spec.masking.kind = MaskingDirective::Kind::Slice;
      spec.masking.row_rate = j.value("row_rate", 0.0);
      spec.masking.col_rate = j.value("col_rate", 0.0);
    }
    if (directives != 1) {
      throw InvalidConfig(path + ": exactly one of mask, missing_rate or "
                          "row_rate/col_rate is required");
    }

    ConfigOverrides o;
    if (j.contains("preset")) o.preset = j["preset"].get<std::string>();
    if (j.contains("variant")) o.variant = parse_variant(j["variant"].get<std::string>());
    if (j.contains("tau")) o.tau = j["tau"].get<std::size_t>();
    if (j.contains("lambda")) o.lambda = j["lambda"].get<double>();
    if (j.contains("gamma")) o.gamma = j["gamma"].get<double>();
    if (j.contains("eta")) {
      o.eta = j["eta"].is_string() && j["eta"] == "inf"
                  ? std::numeric_limits<double>::infinity()
                  : j["eta"].get<double>();
    }
    if (j.contains("max_iter")) o.max_iter = j["max_iter"].get<int>();
    if (j.contains("tol")) o.tol = j["tol"].get<double>();
    if (j.contains("threads")) o.threads = j["threads"].get<unsigned>();
    spec.solver = o;
    return spec;
  } catch (const json::exception& e) {
    throw InvalidConfig(path + ": " + e.what());
  }
}

}  // namespace lcr
