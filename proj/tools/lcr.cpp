// Command-line front end: impute, mask, eval, selftest, synth.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "lcr/experiment.hpp"
#include "lcr/io.hpp"
#include "lcr/masking.hpp"
#include "lcr/metrics.hpp"
#include "lcr/random.hpp"
#include "lcr/selftest.hpp"
#include "lcr/synthetic.hpp"

namespace {

using json = nlohmann::json;

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailed = 1;  // selftest failure or unexpected error
constexpr int kUsage = 2;
constexpr int kConfig = 3;
constexpr int kData = 4;
constexpr int kNumeric = 5;

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw lcr::ParseError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

lcr::Shape parse_shape(const std::string& text) {
  lcr::Shape shape;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto sep = text.find_first_of("x,", start);
    const std::string token = text.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      shape.push_back(v);
    } catch (const std::exception&) {
      throw lcr::InvalidConfig("--shape: cannot parse '" + text + "'");
    }
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  lcr::validate_shape(shape);
  return shape;
}

double parse_eta(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw lcr::InvalidConfig("--eta: cannot parse '" + text + "'");
  }
}

const std::vector<std::string> kVariants = {"lcr1d", "lcr2d", "lcr3d", "lcr_n",
                                            "lcrn", "lcr_vec", "lcrvec", "circnnm"};
const std::vector<std::string> kFormats = {"csv", "bin", "binary", "lcrd",
                                           "ppm", "pgm", "pnm", "png"};

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : lcr::presets()) names.push_back(p.name);
  names.push_back("lcrn");
  names.push_back("lcrvec");
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplacian convolutional representation: low-rank imputation of "
               "series, matrices and images"};
  app.require_subcommand(1);

  // impute
  auto* impute = app.add_subcommand("impute", "Mask a dataset, impute it and report metrics");
  std::string data_path;
  std::string config_path;
  std::string variant;
  std::string preset;
  std::string format;
  std::string output;
  std::string reconstruction;
  std::string mask_path;
  std::string eta_text;
  std::optional<std::size_t> tau;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<double> missing_rate;
  std::optional<double> row_rate;
  std::optional<double> col_rate;
  std::optional<double> peak;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<unsigned> threads;
  std::uint64_t seed = 0;
  std::string psnr_scope = "all";

  impute->add_option("data", data_path, "Dataset file (csv, bin, ppm/pgm, png)");
  impute->add_option("--config", config_path, "Experiment config file (JSON)")
      ->check(CLI::ExistingFile);
  impute->add_option("--variant", variant, "Solver variant")
      ->check(CLI::IsMember(kVariants, CLI::ignore_case));
  impute->add_option("--preset", preset, "Named hyperparameter preset")
      ->check(CLI::IsMember(preset_names(), CLI::ignore_case));
  impute->add_option("--tau", tau, "Laplacian kernel half-bandwidth")->check(CLI::PositiveNumber);
  impute->add_option("--lambda", lambda, "Augmented Lagrangian weight");
  impute->add_option("--gamma", gamma, "Laplacian regularizer weight");
  impute->add_option("--eta", eta_text, "Observation weight, or 'inf' to enforce observations");
  impute->add_option("--missing-rate", missing_rate, "Hide this fraction uniformly at random");
  impute->add_option("--row-rate", row_rate, "Hide this fraction of whole rows");
  impute->add_option("--col-rate", col_rate, "Hide this fraction of whole columns");
  impute->add_option("--mask", mask_path, "Use this mask file (1 = observed)")
      ->check(CLI::ExistingFile);
  impute->add_option("--seed", seed, "Seed for the masking generator");
  impute->add_option("--max-iter", max_iter, "Maximum ADMM iterations")->check(CLI::PositiveNumber);
  impute->add_option("--tol", tol, "Relative-change stopping threshold");
  impute->add_option("--threads", threads, "Worker threads for lcr_n (default: all cores)");
  impute->add_option("--format", format, "Input format (default: from extension)")
      ->check(CLI::IsMember(kFormats, CLI::ignore_case));
  impute->add_option("--output", output, "Report path (default: stdout)");
  impute->add_option("--reconstruction", reconstruction, "Reconstruction output path");
  impute->add_option("--peak", peak, "Peak value for PSNR");
  impute->add_option("--psnr-scope", psnr_scope, "PSNR over all entries or hidden ones")
      ->check(CLI::IsMember({"all", "hidden"}));

  // mask
  auto* mask_cmd = app.add_subcommand("mask", "Generate and save an observation mask");
  std::string mask_shape;
  std::string mask_like;
  std::string mask_out;
  std::optional<double> m_rate;
  std::optional<double> m_row;
  std::optional<double> m_col;
  std::uint64_t m_seed = 0;
  auto* shape_opt = mask_cmd->add_option("--shape", mask_shape, "Shape, e.g. 288 or 50x288 or 64x64x3");
  mask_cmd->add_option("--like", mask_like, "Take the shape from this dataset")
      ->check(CLI::ExistingFile)
      ->excludes(shape_opt);
  mask_cmd->add_option("--missing-rate", m_rate, "Fraction hidden uniformly at random");
  mask_cmd->add_option("--row-rate", m_row, "Fraction of whole rows hidden");
  mask_cmd->add_option("--col-rate", m_col, "Fraction of whole columns hidden");
  mask_cmd->add_option("--seed", m_seed, "Generator seed");
  mask_cmd->add_option("--output", mask_out, "Mask file to write")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Metrics of an estimate against ground truth");
  std::string truth_path;
  std::string estimate_path;
  std::string eval_mask;
  std::string eval_scope = "hidden";
  std::string eval_out;
  std::optional<double> eval_peak;
  eval_cmd->add_option("truth", truth_path, "Ground-truth dataset")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("estimate", estimate_path, "Reconstruction")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--mask", eval_mask, "Observation mask; hidden entries are evaluated")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--scope", eval_scope, "Evaluate hidden entries or all")
      ->check(CLI::IsMember({"hidden", "all"}));
  eval_cmd->add_option("--peak", eval_peak, "Peak value for PSNR");
  eval_cmd->add_option("--output", eval_out, "Write the metrics here instead of stdout");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Check the spectral and kernel identities");
  std::uint64_t st_seed = 20240101;
  std::string st_out;
  selftest->add_option("--seed", st_seed, "Seed for the random test inputs");
  selftest->add_option("--output", st_out, "Also write the results as JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic test dataset");
  std::string synth_kind = "series";
  std::string synth_out;
  std::string synth_shape;
  double synth_noise = 0.1;
  std::uint64_t synth_seed = 0;
  synth->add_option("kind", synth_kind, "series, profiles or image")
      ->check(CLI::IsMember({"series", "profiles", "image"}));
  synth->add_option("--shape", synth_shape, "Shape (default 288, 50x288, 64x64)");
  synth->add_option("--noise", synth_noise, "Noise standard deviation");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--output", synth_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (impute->parsed()) {
      lcr::ExperimentSpec spec;
      if (!config_path.empty()) {
        spec = lcr::load_experiment_spec(config_path);
      } else if (data_path.empty()) {
        std::cerr << "impute: a dataset path or --config is required\n";
        return kUsage;
      }
      if (!data_path.empty()) spec.dataset_path = data_path;
      if (!format.empty()) spec.format = lcr::parse_format(format);
      spec.output_path = output;
      if (!reconstruction.empty()) spec.reconstruction_path = reconstruction;
      else if (output.empty() && !spec.reconstruction_path) {
        spec.reconstruction_path = "reconstruction." +
            std::string(lcr::to_string(spec.format.value_or(lcr::format_from_path(spec.dataset_path))));
      }
      if (peak) spec.peak = peak;
      spec.psnr_scope = psnr_scope == "all" ? lcr::EvalScope::All : lcr::EvalScope::Hidden;

      const int directives = (missing_rate ? 1 : 0) + ((row_rate || col_rate) ? 1 : 0) +
                             (mask_path.empty() ? 0 : 1);
      if (directives > 1) {
        std::cerr << "impute: use only one of --missing-rate, --row-rate/--col-rate, --mask\n";
        return kUsage;
      }
      if (directives == 0 && config_path.empty()) {
        std::cerr << "impute: one of --missing-rate, --row-rate/--col-rate or --mask is required\n";
        return kUsage;
      }
      if (directives == 1) spec.masking = {};
      spec.masking.seed = config_path.empty() || impute->count("--seed") ? seed : spec.masking.seed;
      if (missing_rate) {
        spec.masking.kind = lcr::MaskingDirective::Kind::Uniform;
        spec.masking.missing_rate = *missing_rate;
      } else if (row_rate || col_rate) {
        spec.masking.kind = lcr::MaskingDirective::Kind::Slice;
        spec.masking.row_rate = row_rate.value_or(0.0);
        spec.masking.col_rate = col_rate.value_or(0.0);
      } else if (!mask_path.empty()) {
        spec.masking.kind = lcr::MaskingDirective::Kind::FileMask;
        spec.masking.mask_path = mask_path;
      }

      auto& o = spec.solver;
      if (!preset.empty()) o.preset = preset;
      if (!variant.empty()) o.variant = lcr::parse_variant(variant);
      if (tau) o.tau = tau;
      if (lambda) o.lambda = lambda;
      if (gamma) o.gamma = gamma;
      if (!eta_text.empty()) o.eta = parse_eta(eta_text);
      if (max_iter) o.max_iter = max_iter;
      if (tol) o.tol = tol;
      if (threads) o.threads = threads;
      if (!o.threads) o.threads = std::max(1u, std::thread::hardware_concurrency());
      if (!o.preset && !o.variant) {
        std::cerr << "impute: --preset or --variant is required\n";
        return kUsage;
      }

      const json report = lcr::run_experiment(spec);
      if (output.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        const auto& m = report["metrics"];
        std::cerr << "converged=" << report["converged"] << " iterations="
                  << report["iterations"] << " rmse=" << m["rmse"]
                  << " mape=" << m["mape"] << " psnr=" << m["psnr"] << '\n';
      }
      return kOk;
    }

    if (mask_cmd->parsed()) {
      lcr::Shape shape;
      if (!mask_like.empty()) {
        shape = lcr::load_dataset(mask_like).grid.shape();
      } else if (!mask_shape.empty()) {
        shape = parse_shape(mask_shape);
      } else {
        std::cerr << "mask: --shape or --like is required\n";
        return kUsage;
      }
      lcr::ObservationMask mask;
      if (m_rate && (m_row || m_col)) {
        std::cerr << "mask: use either --missing-rate or --row-rate/--col-rate\n";
        return kUsage;
      }
      if (m_row || m_col) {
        mask = lcr::slice_mask(shape, m_row.value_or(0.0), m_col.value_or(0.0), m_seed);
      } else {
        mask = lcr::uniform_random_mask(shape, m_rate.value_or(0.0), m_seed);
      }
      lcr::write_mask(mask_out, mask);
      std::cerr << "wrote " << mask_out << ": " << mask.observed_count() << " of "
                << mask.size() << " observed (" << lcr::Rng::kAlgorithm << ")\n";
      return kOk;
    }

    if (eval_cmd->parsed()) {
      const lcr::Dataset truth = lcr::load_dataset(truth_path);
      const lcr::Dataset estimate = lcr::load_dataset(estimate_path);
      lcr::require_same_shape(truth.grid.shape(), estimate.grid.shape(), "eval");
      const lcr::ObservationMask mask = eval_mask.empty()
          ? lcr::ObservationMask(truth.grid.shape(), false)
          : lcr::read_mask(eval_mask);
      const auto scope = eval_scope == "all" ? lcr::EvalScope::All : lcr::EvalScope::Hidden;
      const lcr::EvalSet e = lcr::evaluation_set(truth.grid, estimate.grid, mask, scope, &truth.mask);
      json out;
      out["evaluated_count"] = e.size();
      out["rmse"] = lcr::rmse(e);
      try {
        const auto m = lcr::mape(e);
        out["mape"] = m.percent;
        out["mape_excluded"] = m.excluded;
      } catch (const lcr::AllActualsZero&) {
        out["mape"] = nullptr;
      }
      const auto p = eval_peak ? eval_peak : truth.meta.peak;
      if (p) {
        const double v = lcr::psnr(e, *p);
        out["psnr"] = std::isinf(v) ? json("inf") : json(v);
        out["psnr_peak"] = *p;
      }
      emit(out, eval_out);
      return kOk;
    }

    if (selftest->parsed()) {
      const auto checks = lcr::run_selftest(st_seed);
      bool all = true;
      for (const auto& c : checks) {
        std::printf("%s  %-45s max_error=%.3e tol=%.1e\n", c.passed ? "PASS" : "FAIL",
                    c.name.c_str(), c.max_error, c.tolerance);
        all = all && c.passed;
      }
      if (!st_out.empty()) emit({{"seed", st_seed}, {"checks", lcr::to_json(checks)}, {"passed", all}}, st_out);
      return all ? kOk : kFailed;
    }

    if (synth->parsed()) {
      lcr::DataGrid grid;
      if (synth_kind == "series") {
        const auto shape = synth_shape.empty() ? lcr::Shape{288} : parse_shape(synth_shape);
        grid = lcr::synthetic::two_harmonic_series(shape.at(0), synth_noise, synth_seed);
      } else if (synth_kind == "profiles") {
        const auto shape = synth_shape.empty() ? lcr::Shape{50, 288} : parse_shape(synth_shape);
        if (shape.size() != 2) throw lcr::InvalidConfig("--shape: profiles need NxT");
        grid = lcr::synthetic::daily_profiles(shape[0], shape[1], 288, synth_noise, synth_seed);
      } else {
        const auto shape = synth_shape.empty() ? lcr::Shape{64, 64} : parse_shape(synth_shape);
        if (shape.size() < 2) throw lcr::InvalidConfig("--shape: images need MxN");
        grid = lcr::synthetic::smooth_image(shape[0], shape[1], synth_seed);
      }
      lcr::write_dataset(synth_out, grid);
      return kOk;
    }
  } catch (const lcr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const lcr::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const lcr::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kOk;
}
