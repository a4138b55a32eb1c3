#include "lcr/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lcr/kernels.hpp"
#include "lcr/random.hpp"
#include "lcr/solver.hpp"
#include "lcr/spectral.hpp"

namespace lcr {

namespace {

DataGrid random_grid(Rng& rng, Shape shape) {
  DataGrid g(std::move(shape));
  for (auto& v : g.values()) v = 2.0 * rng.uniform01() - 1.0;
  return g;
}

double rel_gap(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

SelfTestCheck check(std::string name, double max_error, double tolerance) {
  return {std::move(name), max_error <= tolerance, max_error, tolerance};
}

const std::vector<Shape>& sample_shapes() {
  static const std::vector<Shape> shapes = {
      {1}, {2}, {3}, {4}, {7}, {8}, {12}, {16}, {97}, {288},
      {3, 5}, {4, 12}, {5, 7, 3}};
  return shapes;
}

}  // namespace

std::vector<SelfTestCheck> run_selftest(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SelfTestCheck> checks;

  {
    double worst = 0.0;
    for (const Shape& shape : sample_shapes()) {
      const DataGrid g = random_grid(rng, shape);
      const ComplexGrid back = idft(dft(g));
      const double scale = max_abs(g.values());
      for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::abs(back[i] - g[i]) / scale);
      }
    }
    checks.push_back(check("dft round trip", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (const Shape& shape : sample_shapes()) {
      const DataGrid g = random_grid(rng, shape);
      const double energy = frobenius_norm(g.values());
      const double spectral =
          squared_norm(dft(g).values()) / static_cast<double>(g.size());
      worst = std::max(worst, rel_gap(energy * energy, spectral));
    }
    checks.push_back(check("parseval", worst, 1e-9));
  }
  {
    double worst = 0.0;
    for (std::size_t length = 2; length <= 32; length += 3) {
      const DataGrid x = random_grid(rng, {length});
      const DataGrid k = random_grid(rng, {length});
      const DataGrid fast = circular_convolve(x, k);
      const auto direct = multiply(circulant(x.values()), k.values());
      const double scale = max_abs(direct);
      for (std::size_t i = 0; i < length; ++i) {
        worst = std::max(worst, std::abs(fast[i] - direct[i]) / scale);
      }
    }
    checks.push_back(check("convolution theorem vs circulant product", worst, 1e-10));
  }
  {
    const std::vector<double> tau1{2, -1, 0, 0, -1};
    const std::vector<double> tau2{4, -1, -1, -1, -1};
    const bool ok = laplacian_kernel(5, 1).values() == tau1 &&
                    laplacian_kernel(5, 2).values() == tau2;
    checks.push_back(check("laplacian kernel layout", ok ? 0.0 : 1.0, 0.0));
  }
  {
    double worst = 0.0;
    for (std::size_t length = 3; length <= 32; length += 2) {
      const std::size_t tau = 1 + rng.uniform_index((length - 1) / 2);
      const LaplacianKernel ell(length, tau);
      const DataGrid x = random_grid(rng, {length});
      const auto lx = multiply(circulant(ell.values()), x.values());
      const double matrix_form = 0.5 * std::pow(frobenius_norm(lx), 2);
      const double conv_form =
          0.5 * std::pow(frobenius_norm(circular_convolve(x, ell.grid()).values()), 2);
      const double fourier_form = temporal_regularizer(x, ell);
      worst = std::max({worst, rel_gap(matrix_form, conv_form),
                        rel_gap(matrix_form, fourier_form)});
    }
    checks.push_back(check("laplacian regularizer forms agree", worst, 1e-10));
  }
  {
    double worst = 0.0;
    const DataGrid x = random_grid(rng, {24});
    const double energy = std::pow(frobenius_norm(x.values()), 2);
    for (std::size_t tau = 1; tau <= 24; ++tau) {
      const DataGrid c = convolution_matrix(x.values(), tau);
      const double fro = std::pow(frobenius_norm(c.values()), 2);
      worst = std::max(worst, std::abs(energy - fro / static_cast<double>(tau)));
    }
    checks.push_back(check("convolution matrix norm identity", worst, 1e-12));
  }
  {
    double worst = 0.0;
    for (const SeparableKernel& k :
         {separable_kernel_2d(4, 9, 2), separable_kernel_3d(7, 5, 2)}) {
      const ComplexGrid direct = dft(k.full_grid());
      for (std::size_t i = 0; i < direct.size(); ++i) {
        worst = std::max(worst, std::abs(direct[i] - k.dft()[i]));
      }
    }
    checks.push_back(check("separable kernel dft factorises", worst, 1e-10));
  }
  {
    // The shrinkage result must not be improved by small moves in 8
    // directions of the complex plane.
    double worst = 0.0;
    const double threshold = 0.7;
    const auto cost = [&](cplx v, cplx h) {
      return std::abs(v) + std::norm(v - h) / (2.0 * threshold);
    };
    for (int trial = 0; trial < 200; ++trial) {
      const cplx h{4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0};
      const cplx best = complex_soft_threshold(h, threshold);
      const double base = cost(best, h);
      for (int d = 0; d < 8; ++d) {
        const cplx step = std::polar(threshold * 1e-2, d * std::numbers::pi / 4.0);
        worst = std::max(worst, base - cost(best + step, h));
      }
    }
    checks.push_back(check("complex shrinkage is the proximal point", worst, 1e-12));
  }
  {
    const DataGrid y = random_grid(rng, {40});
    const ObservationMask mask = uniform_random_mask({40}, 0.5, seed);
    SolverConfig lcr;
    lcr.lambda = 0.2;
    lcr.gamma = 0.0;
    lcr.eta = 20.0;
    lcr.max_iter = 25;
    lcr.tol = 1e-300;
    SolverConfig circ = lcr;
    circ.variant = Variant::CircNNM;
    const auto a = solve(project(y, mask), mask, lcr).reconstruction;
    const auto b = solve(project(y, mask), mask, circ).reconstruction;
    checks.push_back(check("circnnm equals lcr with gamma 0", a == b ? 0.0 : 1.0, 0.0));
  }
  return checks;
}

nlohmann::json to_json(const std::vector<SelfTestCheck>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"max_error", c.max_error},
                   {"tolerance", c.tolerance}});
  }
  return out;
}

}  // namespace lcr
