#include "lcr/kernels.hpp"

#include <algorithm>

namespace lcr {

LaplacianKernel::LaplacianKernel(std::size_t length, std::size_t tau)
    : values_(length, 0.0), tau_(tau) {
  if (length < 3) {
    throw InvalidTau("Laplacian kernel needs length >= 3, got " +
                     std::to_string(length));
  }
  if (tau < 1 || 2 * tau > length - 1) {
    throw InvalidTau("tau = " + std::to_string(tau) +
                     " outside [1, (T-1)/2] for T = " + std::to_string(length));
  }
  values_[0] = 2.0 * static_cast<double>(tau);
  for (std::size_t k = 1; k <= tau; ++k) {
    values_[k] = -1.0;
    values_[length - k] = -1.0;
  }
  dft_.assign(values_.begin(), values_.end());
  FftPlan(length).forward(dft_);
  // The entries sum to zero, so the DC term is exactly zero.
  dft_[0] = cplx{};
}

std::vector<double> spatial_unit_kernel(std::size_t length) {
  if (length == 0) throw ShapeError("spatial kernel length must be positive");
  std::vector<double> e1(length, 0.0);
  e1[0] = 1.0;
  return e1;
}

SeparableKernel::SeparableKernel(std::vector<std::vector<double>> axis_kernels)
    : axis_kernels_(std::move(axis_kernels)) {
  Shape shape;
  for (const auto& k : axis_kernels_) shape.push_back(k.size());
  full_grid_ = DataGrid(shape);
  dft_ = ComplexGrid(shape);

  std::vector<std::vector<cplx>> axis_dft;
  for (const auto& k : axis_kernels_) {
    std::vector<cplx> spectrum(k.begin(), k.end());
    FftPlan(k.size()).forward(spectrum);
    axis_dft.push_back(std::move(spectrum));
  }

  std::vector<std::size_t> index(shape.size(), 0);
  for (std::size_t flat = 0; flat < full_grid_.size(); ++flat) {
    double value = 1.0;
    cplx spectrum = 1.0;
    for (std::size_t a = 0; a < shape.size(); ++a) {
      value *= axis_kernels_[a][index[a]];
      spectrum *= axis_dft[a][index[a]];
    }
    full_grid_[flat] = value;
    dft_[flat] = spectrum;
    for (std::size_t a = shape.size(); a-- > 0;) {
      if (++index[a] < shape[a]) break;
      index[a] = 0;
    }
  }
}

SeparableKernel separable_kernel_2d(std::size_t series, std::size_t length,
                                    std::size_t tau) {
  return SeparableKernel(
      {spatial_unit_kernel(series), laplacian_kernel(length, tau).values()});
}

SeparableKernel separable_kernel_3d(std::size_t rows, std::size_t cols,
                                    std::size_t tau) {
  const std::size_t shortest = std::min(rows, cols);
  if (tau < 1 || shortest < 3 || 2 * tau > shortest - 1) {
    throw InvalidTau("tau = " + std::to_string(tau) +
                     " outside [1, (min(M,N)-1)/2] for a " +
                     std::to_string(rows) + "x" + std::to_string(cols) +
                     " image");
  }
  return SeparableKernel({laplacian_kernel(rows, tau).values(),
                          laplacian_kernel(cols, tau).values(),
                          {1.0, 0.0, 0.0}});
}

DataGrid circulant(std::span<const double> x) {
  const std::size_t n = x.size();
  DataGrid c({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c(i, j) = x[(i + n - j) % n];
  }
  return c;
}

DataGrid convolution_matrix(std::span<const double> x, std::size_t tau) {
  const std::size_t n = x.size();
  if (tau < 1 || tau > n) {
    throw InvalidTau("convolution matrix width " + std::to_string(tau) +
                     " outside [1, " + std::to_string(n) + "]");
  }
  DataGrid c({n, tau});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < tau; ++j) c(i, j) = x[(i + n - j) % n];
  }
  return c;
}

std::vector<double> multiply(const DataGrid& matrix,
                             std::span<const double> v) {
  if (matrix.rank() != 2 || matrix.extent(1) != v.size()) {
    throw ShapeMismatch("matrix " + to_string(matrix.shape()) +
                        " cannot multiply a vector of length " +
                        std::to_string(v.size()));
  }
  std::vector<double> out(matrix.extent(0), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += matrix(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

namespace {

double regularizer_from_spectrum(const DataGrid& x, const ComplexGrid& k_hat) {
  ComplexGrid x_hat = dft(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < x_hat.size(); ++i) {
    sum += std::norm(k_hat[i] * x_hat[i]);
  }
  return 0.5 * sum / static_cast<double>(x.size());
}

}  // namespace

double temporal_regularizer(const DataGrid& x, const DataGrid& kernel) {
  return regularizer_from_spectrum(x, dft(zero_extend(kernel, x.shape())));
}

double temporal_regularizer(const DataGrid& x, const LaplacianKernel& kernel) {
  if (x.rank() == 1 && x.size() == kernel.size()) {
    return regularizer_from_spectrum(
        x, ComplexGrid({kernel.size()}, kernel.dft()));
  }
  return temporal_regularizer(x, kernel.grid());
}

double temporal_regularizer(const DataGrid& x, const SeparableKernel& kernel) {
  if (x.shape() == kernel.shape()) return regularizer_from_spectrum(x, kernel.dft());
  return temporal_regularizer(x, kernel.full_grid());
}

}  // namespace lcr
