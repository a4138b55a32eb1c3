#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lcr/solver.hpp"
#include "lcr/spectral.hpp"
#include "lcr/synthetic.hpp"
#include "oracles.hpp"

using namespace lcr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ComplexGrid scalar(cplx v) { return ComplexGrid({1}, {v}); }

SolverConfig config_for(Variant v, double lambda, double gamma_ratio, double eta_ratio) {
  SolverConfig c;
  c.variant = v;
  c.lambda = lambda;
  c.gamma = gamma_ratio * lambda;
  c.eta = eta_ratio * lambda;
  return c;
}

double prox_objective(cplx v, cplx h, double theta) {
  return std::abs(v) + std::norm(v - h) / (2.0 * theta);
}

// Shifts every row of a rank 1 or 2 grid circularly by s along time.
DataGrid shift_time(const DataGrid& g, std::size_t s) {
  const std::size_t t = g.shape().back();
  DataGrid out(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t row = i / t, col = i % t;
    out[row * t + (col + s) % t] = g[i];
  }
  return out;
}

ObservationMask shift_time(const ObservationMask& m, std::size_t s) {
  const std::size_t t = m.shape().back();
  std::vector<std::uint8_t> flags(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    flags[(i / t) * t + (i % t + s) % t] = m.flags()[i];
  }
  return ObservationMask(m.shape(), std::move(flags));
}

double masked_rmse(const DataGrid& truth, const DataGrid& x, const ObservationMask& m) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (m.observed(i)) continue;
    s += (truth[i] - x[i]) * (truth[i] - x[i]);
    ++n;
  }
  return std::sqrt(s / static_cast<double>(n));
}

}  // namespace

TEST_CASE("h_update") {
  auto h = h_update(scalar(5.0), scalar(1.0), scalar(2.0), 2.0, 1.0);
  CHECK(h[0] == cplx(1.5, 0.0));

  CHECK(h_update(scalar(0.0), scalar(0.0), scalar(3.0), 1.0, 4.0)[0] == cplx(0.0, 0.0));

  std::mt19937_64 rng(51);
  auto z = dft(oracle::random_grid(rng, {8}));
  auto w = dft(oracle::random_grid(rng, {8}));
  auto ell = dft(laplacian_kernel(8, 2).grid());
  auto plain = h_update(z, w, ell, 3.0, 0.0);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::abs(plain[i] - (z[i] - w[i] / 3.0)) < 1e-12);
  }

  // Complex kernel spectrum: the denominator uses |l|^2 and stays real.
  auto complex_ell = h_update(scalar(1.0), scalar(0.0), scalar(cplx(0.0, 1.0)), 1.0, 1.0);
  CHECK(complex_ell[0] == cplx(0.5, 0.0));
}

TEST_CASE("h_update on real inputs has a real inverse") {
  std::mt19937_64 rng(52);
  auto ell = dft(laplacian_kernel(16, 2).grid());
  auto h = h_update(dft(oracle::random_grid(rng, {16})), dft(oracle::random_grid(rng, {16})), ell, 1.3, 2.6);
  CHECK(real_part_of_idft(h).imaginary_residue < 1e-9);
}

TEST_CASE("complex soft threshold hand cases") {
  CHECK(complex_soft_threshold(cplx(5.0, 0.0), 2.0) == cplx(3.0, 0.0));
  CHECK(std::abs(complex_soft_threshold(cplx(0.0, 3.0), 2.0) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(complex_soft_threshold(std::polar(1.9, 0.7), 2.0) == cplx(0.0, 0.0));
  CHECK(complex_soft_threshold(cplx(-4.0, 0.0), 1.0) == cplx(-3.0, 0.0));
}

TEST_CASE("soft threshold minimises the proximal objective") {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> d(0.0, 2.0);
  std::vector<cplx> h(8);
  for (cplx& v : h) v = cplx(d(rng), d(rng));
  const double theta = 1.1;
  auto x = complex_soft_threshold(ComplexGrid({8}, h), theta);
  for (std::size_t i = 0; i < 8; ++i) {
    // Independent check: brute-force grid search around the returned point.
    const double best = prox_objective(x[i], h[i], theta);
    double grid_min = best;
    for (int a = -40; a <= 40; ++a) {
      for (int b = -40; b <= 40; ++b) {
        const cplx v = x[i] + cplx(a * 0.01, b * 0.01);
        grid_min = std::min(grid_min, prox_objective(v, h[i], theta));
      }
    }
    CHECK(best <= grid_min + 1e-12);
    for (int dir = 0; dir < 8; ++dir) {
      const cplx step = std::polar(theta * 1e-2, dir * std::numbers::pi / 4.0);
      CHECK(prox_objective(x[i] + step, h[i], theta) >= best - 1e-15);
    }
  }
}

TEST_CASE("z_update") {
  DataGrid x({1}, {2.0}), w({1}, {0.0}), y({1}, {6.0});
  ObservationMask on({1}, true), off({1}, false);
  CHECK(z_update(x, w, y, on, 1.0, 3.0)[0] == doctest::Approx(5.0));

  std::mt19937_64 rng(54);
  DataGrid xs = oracle::random_grid(rng, {10}), ws = oracle::random_grid(rng, {10});
  DataGrid ys = oracle::random_grid(rng, {10});
  ObservationMask none({10}, false);
  auto free = z_update(xs, ws, ys, none, 2.0, 5.0);
  for (std::size_t i = 0; i < 10; ++i) CHECK(free[i] == doctest::Approx(xs[i] + ws[i] / 2.0));

  ObservationMask all({10}, true);
  auto tight = z_update(xs, ws, ys, all, 2.0, 1e12 * 2.0);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(tight[i] - ys[i]) < 1e-9);
  auto exact = z_update(xs, ws, ys, all, 2.0, kInf);
  CHECK(exact == ys);
}

TEST_CASE("w_update") {
  DataGrid w({3}, {1, 2, 3}), x({3}, {4, 5, 6});
  CHECK(w_update(w, x, x, 2.0) == w);
  CHECK(w_update(DataGrid({1}, {0.0}), DataGrid({1}, {1.0}), DataGrid({1}, {0.0}), 2.0)[0] == 2.0);
  DataGrid z({3}, {3, 4, 5});
  auto twice = w_update(w_update(w, x, z, 1.5), x, z, 1.5);
  for (std::size_t i = 0; i < 3; ++i) CHECK(twice[i] - w[i] == doctest::Approx(2 * 1.5 * 1.0));
}

TEST_CASE("circulant nuclear norm") {
  CHECK(circulant_nuclear_norm(DataGrid({4}, {1, 1, 1, 1})) == doctest::Approx(4.0));
  std::mt19937_64 rng(55);
  for (std::size_t t = 4; t <= 32; t += 4) {
    auto x = oracle::random_vector(rng, t);
    const double svd = oracle::circulant_nuclear_norm_svd(x);
    const double fast = circulant_nuclear_norm(DataGrid({t}, x));
    CHECK(std::abs(svd - fast) <= 1e-8 * fast);
    std::vector<double> scaled(x);
    for (double& v : scaled) v *= -2.5;
    CHECK(circulant_nuclear_norm(DataGrid({t}, scaled)) == doctest::Approx(2.5 * fast).epsilon(1e-12));
  }
}

TEST_CASE("objective") {
  auto k = laplacian_kernel(12, 2);
  DataGrid constant({12}, 2.0);
  CHECK(objective(constant, k, 7.0) == doctest::Approx(circulant_nuclear_norm(constant)));
  std::mt19937_64 rng(56);
  DataGrid x = oracle::random_grid(rng, {12});
  CHECK(objective(x, k, 0.0) == circulant_nuclear_norm(x));
  CHECK(objective(x, k.grid(), 3.0) == doctest::Approx(objective(x, k, 3.0)).epsilon(1e-12));
}

TEST_CASE("solver lowers the objective from the masked start") {
  std::mt19937_64 rng(57);
  DataGrid y = synthetic::two_harmonic_series(16, 0.05, 3);
  auto mask = uniform_random_mask({16}, 0.5, 4);
  auto c = config_for(Variant::Lcr1D, 1.0, 2.0, kInf);
  c.max_iter = 2000;
  c.tol = 1e-10;
  auto r = solve(project(y, mask), mask, c);
  auto k = laplacian_kernel(16, 2);
  CHECK(objective(r.reconstruction, k, c.gamma) <= objective(project(y, mask), k, c.gamma));
}

TEST_CASE("constant data is a fixed point of every variant") {
  // With finite eta the optimum of |C(x)|_* + eta/2 |x - c|^2 sits 1/eta
  // below c, so the exact-observation form is the one with c as fixed point.
  struct Case {
    Variant variant;
    Shape shape;
  };
  for (const Case& cs : {Case{Variant::Lcr1D, {48}}, Case{Variant::Lcr2D, {4, 24}},
                         Case{Variant::Lcr3D, {8, 8, 3}}, Case{Variant::LcrN, {3, 20}},
                         Case{Variant::LcrVec, {3, 20}}, Case{Variant::CircNNM, {48}},
                         Case{Variant::CircNNM, {3, 20}}}) {
    DataGrid y(cs.shape, 3.25);
    ObservationMask full(cs.shape, true);
    auto c = config_for(cs.variant, static_cast<double>(y.size()), 2.0, kInf);
    c.max_iter = 5000;
    c.tol = 1e-10;
    auto r = solve(y, full, c);
    CHECK_MESSAGE(oracle::max_abs_diff(r.reconstruction.values(), y.values()) <= 1e-6,
                  to_string(cs.variant));
  }
}

TEST_CASE("CircNNM equals LCR with gamma zero bit for bit") {
  std::mt19937_64 rng(58);
  struct Case {
    Variant base;
    Shape shape;
  };
  for (const Case& cs : {Case{Variant::Lcr1D, {96}}, Case{Variant::Lcr2D, {5, 48}},
                         Case{Variant::Lcr3D, {10, 10, 3}}, Case{Variant::LcrN, {4, 30}},
                         Case{Variant::LcrVec, {4, 30}}}) {
    DataGrid y = oracle::random_grid(rng, cs.shape);
    auto mask = uniform_random_mask(cs.shape, 0.6, 9);
    auto lcr = config_for(cs.base, 3.0, 0.0, 50.0);
    lcr.max_iter = 25;
    lcr.tol = 1e-300;
    auto circ = lcr;
    circ.variant = Variant::CircNNM;
    circ.circnnm_base = cs.base;
    auto a = solve(project(y, mask), mask, lcr);
    auto b = solve(project(y, mask), mask, circ);
    CHECK(a.iterations_run == b.iterations_run);
    CHECK_MESSAGE(a.reconstruction == b.reconstruction, to_string(cs.base));
    CHECK(b.resolved_variant == cs.base);
  }
}

TEST_CASE("CircNNM default base follows the rank") {
  DataGrid y({3, 8}, 1.0);
  ObservationMask m(y.shape(), true);
  SolverConfig c;
  c.variant = Variant::CircNNM;
  c.max_iter = 2;
  CHECK(solve(y, m, c).resolved_variant == Variant::LcrVec);
  CHECK(solve(DataGrid({8}, 1.0), ObservationMask({8}, true), c).resolved_variant == Variant::Lcr1D);
  CHECK(solve(DataGrid({4, 4, 3}, 1.0), ObservationMask({4, 4, 3}, true), c).resolved_variant ==
        Variant::Lcr3D);
}

TEST_CASE("LCR-2D with one series matches LCR-1D") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    DataGrid y = synthetic::two_harmonic_series(96, 0.1, seed);
    auto mask = uniform_random_mask({96}, 0.6, seed + 100);
    auto c1 = config_for(Variant::Lcr1D, 0.5, 2.0, 100.0);
    auto c2 = c1;
    c2.variant = Variant::Lcr2D;
    auto a = solve(project(y, mask), mask, c1);
    DataGrid y2({1, 96}, y.data());
    ObservationMask m2({1, 96}, mask.flags());
    auto b = solve(project(y2, m2), m2, c2);
    CHECK(a.iterations_run == b.iterations_run);
    CHECK(oracle::max_abs_diff(a.reconstruction.values(), b.reconstruction.values()) <= 1e-8);
  }
}

TEST_CASE("LCR-vec is LCR-1D on the row-major flattening") {
  DataGrid y = synthetic::daily_profiles(4, 48, 48, 0.5, 3);
  auto mask = uniform_random_mask(y.shape(), 0.5, 4);
  auto cv = config_for(Variant::LcrVec, 2.0, 5.0, 100.0);
  auto c1 = cv;
  c1.variant = Variant::Lcr1D;
  auto a = solve(project(y, mask), mask, cv);
  DataGrid flat({y.size()}, y.data());
  ObservationMask fm({y.size()}, mask.flags());
  auto b = solve(project(flat, fm), fm, c1);
  CHECK(a.reconstruction.data() == b.reconstruction.data());
  CHECK(a.reconstruction.shape() == y.shape());
}

TEST_CASE("LCR_N solves rows independently and does not depend on the thread count") {
  DataGrid y = synthetic::daily_profiles(6, 96, 48, 0.5, 5);
  auto mask = uniform_random_mask(y.shape(), 0.5, 6);
  auto c = config_for(Variant::LcrN, 0.48, 5.0, 1000.0);
  c.threads = 1;
  auto one = solve(project(y, mask), mask, c);
  c.threads = 4;
  auto four = solve(project(y, mask), mask, c);
  CHECK(one.reconstruction == four.reconstruction);
  CHECK(one.primal_residual_history == four.primal_residual_history);

  // Row 2 on its own.
  DataGrid row({96}, std::vector<double>(y.data().begin() + 192, y.data().begin() + 288));
  ObservationMask rm({96}, std::vector<std::uint8_t>(mask.flags().begin() + 192, mask.flags().begin() + 288));
  auto c1 = c;
  c1.variant = Variant::Lcr1D;
  auto single = solve(project(row, rm), rm, c1);
  for (std::size_t t = 0; t < 96; ++t) CHECK(single.reconstruction[t] == one.reconstruction(2, t));
}

TEST_CASE("circular shifts commute with the solver") {
  DataGrid y = synthetic::two_harmonic_series(120, 0.1, 8);
  auto mask = uniform_random_mask({120}, 0.7, 9);
  auto c = config_for(Variant::Lcr1D, 0.6, 2.0, 100.0);
  c.max_iter = 60;
  c.tol = 1e-300;
  auto base = solve(project(y, mask), mask, c);
  auto moved = solve(project(shift_time(y, 17), shift_time(mask, 17)), shift_time(mask, 17), c);
  auto expected = shift_time(base.reconstruction, 17);
  CHECK(oracle::max_abs_diff(moved.reconstruction.values(), expected.values()) <= 1e-8);

  DataGrid m = synthetic::daily_profiles(3, 48, 24, 0.3, 2);
  auto mm = uniform_random_mask(m.shape(), 0.5, 3);
  auto c2 = config_for(Variant::Lcr2D, 1.44, 5.0, 100.0);
  c2.max_iter = 40;
  c2.tol = 1e-300;
  auto b2 = solve(project(m, mm), mm, c2);
  auto s2 = solve(project(shift_time(m, 5), shift_time(mm, 5)), shift_time(mm, 5), c2);
  CHECK(oracle::max_abs_diff(s2.reconstruction.values(), shift_time(b2.reconstruction, 5).values()) <= 1e-8);
}

TEST_CASE("Laplacian regularisation helps on the two-harmonic series") {
  DataGrid y = synthetic::two_harmonic_series(288, 0.1, 1);
  auto mask = uniform_random_mask({288}, 0.95, 101);
  CHECK(mask.observed_count() == 14);
  auto lcr = make_config(find_preset("lcr1d"), {288});
  auto circ = lcr;
  circ.gamma = 0.0;
  const double with = masked_rmse(y, solve(project(y, mask), mask, lcr).reconstruction, mask);
  const double without = masked_rmse(y, solve(project(y, mask), mask, circ).reconstruction, mask);
  CHECK(with < without);
}

TEST_CASE("observation fidelity, realness and feasibility") {
  DataGrid y = synthetic::two_harmonic_series(96, 0.0, 4);
  auto mask = uniform_random_mask({96}, 0.5, 5);
  auto c = config_for(Variant::Lcr1D, 0.48, 2.0, 1000.0);
  c.max_iter = 1000;
  auto r = solve(project(y, mask), mask, c);
  REQUIRE(r.converged);
  CHECK(r.last_rel_change <= c.tol);

  double fit = 0.0, ref = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < 96; ++i) {
    peak = std::max(peak, std::abs(r.reconstruction[i]));
    if (!mask.observed(i)) continue;
    fit += std::pow(r.reconstruction[i] - y[i], 2);
    ref += y[i] * y[i];
  }
  CHECK(std::sqrt(fit / ref) <= 1e-2);
  CHECK(r.imaginary_residue_max <= 1e-9 * peak);
  CHECK(r.final_primal_residual <= c.tol * frobenius_norm(r.reconstruction.values()));
  CHECK(r.final_primal_residual == r.primal_residual_history.back());
  CHECK(r.primal_residual_history.size() == static_cast<std::size_t>(r.iterations_run));
}

TEST_CASE("objective trace") {
  DataGrid y = synthetic::two_harmonic_series(48, 0.1, 2);
  auto mask = uniform_random_mask({48}, 0.5, 3);
  auto c = config_for(Variant::Lcr1D, 0.24, 2.0, 100.0);
  c.track_objective = true;
  auto r = solve(project(y, mask), mask, c);
  CHECK(r.objective_trace.size() == static_cast<std::size_t>(r.iterations_run));
  c.track_objective = false;
  CHECK(solve(project(y, mask), mask, c).objective_trace.empty());
}

TEST_CASE("solver is deterministic") {
  DataGrid y = synthetic::daily_profiles(5, 64, 32, 1.0, 11);
  auto mask = uniform_random_mask(y.shape(), 0.6, 12);
  auto c = make_config(find_preset("lcr2d"), y.shape());
  auto a = solve(project(y, mask), mask, c);
  auto b = solve(project(y, mask), mask, c);
  CHECK(a.reconstruction == b.reconstruction);
  CHECK(a.primal_residual_history == b.primal_residual_history);
}

TEST_CASE("degenerate inputs") {
  auto c = config_for(Variant::Lcr1D, 1.0, 2.0, 100.0);
  auto r = solve(DataGrid({10}), ObservationMask({10}, false), c);
  CHECK(r.all_missing);
  CHECK(r.converged);
  CHECK(r.reconstruction == DataGrid({10}));

  CHECK_THROWS_AS(solve(DataGrid({3, 10}), ObservationMask({3, 10}, true), c), ConfigRankMismatch);
  CHECK_THROWS_AS(solve(DataGrid({10}), ObservationMask({11}, true), c), ShapeMismatch);
  CHECK_THROWS_AS(solve(DataGrid({10}, std::numeric_limits<double>::quiet_NaN()), ObservationMask({10}, true), c),
                  NonFiniteInput);
  auto wide = c;
  wide.tau = 5;
  CHECK_THROWS_AS(solve(DataGrid({10}), ObservationMask({10}, true), wide), InvalidTau);
}

TEST_CASE("config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.lambda = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = SolverConfig{};
  c.gamma = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = SolverConfig{};
  c.eta = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = SolverConfig{};
  c.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = SolverConfig{};
  c.tol = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = SolverConfig{};
  c.eta = kInf;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("variant names") {
  for (Variant v : {Variant::Lcr1D, Variant::Lcr2D, Variant::Lcr3D, Variant::LcrN, Variant::LcrVec,
                    Variant::CircNNM}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK(parse_variant("LCR2D") == Variant::Lcr2D);
  CHECK(parse_variant("lcrn") == Variant::LcrN);
  CHECK_THROWS_AS(parse_variant("lcr4d"), InvalidConfig);
}

TEST_CASE("presets") {
  auto c2 = make_config(find_preset("lcr2d"), {50, 288});
  CHECK(c2.lambda == doctest::Approx(1e-5 * 50 * 288));
  CHECK(c2.gamma == doctest::Approx(5 * c2.lambda));
  CHECK(c2.eta == doctest::Approx(100 * c2.lambda));

  auto cn = make_config(find_preset("lcr_n"), {50, 288});
  CHECK(cn.lambda == doctest::Approx(5e-3 * 288));
  CHECK(cn.eta == doctest::Approx(1e3 * cn.lambda));

  auto cv = make_config(find_preset("lcr_vec"), {50, 288});
  CHECK(cv.lambda == doctest::Approx(5e-6 * 50 * 288));

  auto cc = make_config(find_preset("circnnm"), {50, 288});
  CHECK(cc.lambda == doctest::Approx(5e-7 * 50 * 288));
  CHECK(cc.gamma == 0.0);
  CHECK(cc.variant == Variant::CircNNM);

  auto c1 = make_config(find_preset("lcr1d"), {288});
  CHECK(c1.gamma == doctest::Approx(2 * c1.lambda));
  CHECK(c1.tau == 2);
  CHECK(std::isinf(make_config(find_preset("lcr1d-exact"), {288}).eta));

  CHECK(find_preset("LCRN").name == "lcr_n");
  CHECK_THROWS_AS(find_preset("nope"), InvalidConfig);
}
