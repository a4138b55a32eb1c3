#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "lcr/experiment.hpp"
#include "lcr/selftest.hpp"
#include "lcr/synthetic.hpp"

using namespace lcr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lcr_exp_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

ExperimentSpec series_spec(const TempDir& dir, double rate) {
  write_dataset(dir.file("series.csv"), synthetic::two_harmonic_series(288, 0.1, 1));
  ExperimentSpec spec;
  spec.dataset_path = dir.file("series.csv");
  spec.masking.kind = MaskingDirective::Kind::Uniform;
  spec.masking.missing_rate = rate;
  spec.masking.seed = 3;
  spec.solver.preset = "lcr1d";
  spec.output_path = dir.file("report.json");
  return spec;
}

}  // namespace

TEST_CASE("nothing hidden is rejected") {
  TempDir dir;
  CHECK_THROWS_AS(run_experiment(series_spec(dir, 0.0)), EmptyEvaluationSet);
  CHECK_FALSE(fs::exists(dir.file("report.json")));
}

TEST_CASE("reports are reproducible apart from timing") {
  TempDir dir;
  auto spec = series_spec(dir, 0.95);
  auto a = run_experiment(spec);
  auto b = run_experiment(spec);
  CHECK(a.contains(kTimingKey));
  a.erase(kTimingKey);
  b.erase(kTimingKey);
  CHECK(a.dump() == b.dump());
  CHECK(a["masking"]["hidden_count"] == 274);
  CHECK(a["seed"] == 3);
  CHECK(a["preset"] == "lcr1d");
  CHECK(a["config"]["gamma"].get<double>() == doctest::Approx(2 * a["config"]["lambda"].get<double>()));
  CHECK(fs::exists(dir.file("report.reconstruction.csv")));

  auto recon = load_dataset(dir.file("report.reconstruction.csv"));
  CHECK(recon.grid.shape() == Shape{288});
  CHECK(recon.mask.observed_count() == 288);
}

TEST_CASE("reconstruction files round-trip losslessly in binary") {
  TempDir dir;
  write_dataset(dir.file("m.bin"), synthetic::daily_profiles(4, 48, 24, 0.5, 2));
  ExperimentSpec spec;
  spec.dataset_path = dir.file("m.bin");
  spec.masking.missing_rate = 0.5;
  spec.masking.seed = 4;
  spec.solver.preset = "lcr2d";
  spec.output_path = dir.file("r.json");
  auto data = load_dataset(spec.dataset_path);
  auto result = evaluate_experiment(spec, data);
  run_experiment(spec);
  auto recon = load_dataset(dir.file("r.reconstruction.bin"));
  CHECK(recon.grid == result.solve.reconstruction);
}

TEST_CASE("file missing markers are not evaluated") {
  TempDir dir;
  std::ofstream(dir.file("gappy.csv")) << "1,2,3,4,5,6,7,8\n2,,4,5,6,7,8,9\n";
  ExperimentSpec spec;
  spec.dataset_path = dir.file("gappy.csv");
  spec.masking.missing_rate = 0.5;
  spec.masking.seed = 1;
  spec.solver.variant = Variant::Lcr2D;
  spec.solver.lambda = 0.2;
  spec.solver.tau = 1;
  spec.output_path = dir.file("r.json");
  auto data = load_dataset(spec.dataset_path);
  auto result = evaluate_experiment(spec, data);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    expected += !result.experiment_mask.observed(i) && data.mask.observed(i);
  }
  CHECK(data.mask.observed_count() == 15);
  CHECK(result.evaluated == expected);
}

TEST_CASE("resolve_config") {
  ConfigOverrides o;
  o.preset = "lcr2d";
  auto base = resolve_config(o, {10, 100});
  CHECK(base.lambda == doctest::Approx(1e-2));
  o.lambda = 2.0;
  auto scaled = resolve_config(o, {10, 100});
  CHECK(scaled.gamma == doctest::Approx(10.0));
  CHECK(scaled.eta == doctest::Approx(200.0));
  o.gamma = 0.5;
  CHECK(resolve_config(o, {10, 100}).gamma == 0.5);

  ConfigOverrides circ;
  circ.preset = "circnnm";
  circ.gamma = 3.0;
  CHECK(resolve_config(circ, {10, 100}).gamma == 0.0);

  ConfigOverrides bad;
  bad.preset = "lcr2d";
  bad.tol = -1.0;
  CHECK_THROWS_AS(resolve_config(bad, {10, 100}), InvalidConfig);
}

TEST_CASE("experiment config files") {
  TempDir dir;
  std::ofstream(dir.file("spec.json")) << R"({"dataset": "d.csv", "preset": "lcr_n", "missing_rate": 0.3,
    "seed": 9, "eta": "inf", "output": "out.json"})";
  auto spec = load_experiment_spec(dir.file("spec.json"));
  CHECK(spec.masking.kind == MaskingDirective::Kind::Uniform);
  CHECK(spec.masking.seed == 9);
  CHECK(std::isinf(*spec.solver.eta));

  std::ofstream(dir.file("two.json")) << R"({"dataset": "d.csv", "missing_rate": 0.3, "mask": "m.txt"})";
  CHECK_THROWS_AS(load_experiment_spec(dir.file("two.json")), InvalidConfig);
  std::ofstream(dir.file("none.json")) << R"({"dataset": "d.csv"})";
  CHECK_THROWS_AS(load_experiment_spec(dir.file("none.json")), InvalidConfig);
}

TEST_CASE("selftest passes and is deterministic") {
  auto a = run_selftest();
  for (const auto& check : a) CHECK_MESSAGE(check.passed, check.name);
  CHECK(to_json(a).dump() == to_json(run_selftest()).dump());
}

TEST_CASE("LCR beats CircNNM on the shipped series fixture") {
  TempDir dir;
  auto rmse_for = [&](const char* preset) {
    ExperimentSpec spec;
    spec.dataset_path = std::string(LCR_DATA_DIR) + "/series.csv";
    spec.masking.missing_rate = 0.95;
    spec.masking.seed = 1;
    spec.solver.preset = preset;
    spec.output_path = dir.file(std::string(preset) + ".json");
    return run_experiment(spec)["metrics"]["rmse"].get<double>();
  };
  CHECK(rmse_for("lcr1d") < rmse_for("circnnm1d"));
}
