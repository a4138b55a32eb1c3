#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lcr/grid.hpp"
#include "lcr/spectral.hpp"

namespace lcr {

/// Circular Laplacian kernel of length T and half-bandwidth tau:
/// (2 tau, -1 x tau, 0 ..., -1 x tau). It is the first column of the
/// Laplacian matrix of the circulant graph that links every time step to its
/// tau neighbours on each side. Immutable; the DFT is computed on
/// construction.
class LaplacianKernel {
 public:
  /// Throws InvalidTau unless T >= 3 and 1 <= tau <= (T - 1) / 2.
  LaplacianKernel(std::size_t length, std::size_t tau);

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t tau() const noexcept { return tau_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<cplx>& dft() const noexcept { return dft_; }
  DataGrid grid() const { return DataGrid({values_.size()}, values_); }

 private:
  std::vector<double> values_;
  std::size_t tau_;
  std::vector<cplx> dft_;
};

inline LaplacianKernel laplacian_kernel(std::size_t length, std::size_t tau) {
  return LaplacianKernel(length, tau);
}

/// First column of the N x N identity, e_1.
std::vector<double> spatial_unit_kernel(std::size_t length);

/// Outer product of per-axis kernels. The multi-axis DFT of the full grid
/// factors into the per-axis DFTs, which is how dft() is computed.
class SeparableKernel {
 public:
  explicit SeparableKernel(std::vector<std::vector<double>> axis_kernels);

  const std::vector<std::vector<double>>& axis_kernels() const noexcept {
    return axis_kernels_;
  }
  const DataGrid& full_grid() const noexcept { return full_grid_; }
  const ComplexGrid& dft() const noexcept { return dft_; }
  const Shape& shape() const noexcept { return full_grid_.shape(); }

 private:
  std::vector<std::vector<double>> axis_kernels_;
  DataGrid full_grid_;
  ComplexGrid dft_;
};

/// e_1(N) (x) laplacian(T, tau): no coupling across series, Laplacian in time.
SeparableKernel separable_kernel_2d(std::size_t series, std::size_t length,
                                    std::size_t tau);

/// laplacian(M, tau) (x) laplacian(N, tau) (x) (1, 0, 0) for M x N x 3
/// images. Throws InvalidTau unless tau <= (min(M, N) - 1) / 2.
SeparableKernel separable_kernel_3d(std::size_t rows, std::size_t cols,
                                    std::size_t tau);

// Dense matrices below are O(T^2) memory and exist for diagnostics and
// tests. The solver never builds them.

/// T x T circulant matrix whose column j is x shifted down by j.
DataGrid circulant(std::span<const double> x);

/// First tau columns of circulant(x). Throws InvalidTau unless 1 <= tau <= T.
DataGrid convolution_matrix(std::span<const double> x, std::size_t tau);

/// Dense matrix times vector.
std::vector<double> multiply(const DataGrid& matrix, std::span<const double> v);

/// 1/2 ||k * x||^2 computed in the frequency domain as
/// (1 / 2P) ||dft(k) . dft(x)||^2. Any kernel of x's rank is accepted,
/// including asymmetric (directed-graph) ones; shorter kernels are
/// zero-extended.
double temporal_regularizer(const DataGrid& x, const DataGrid& kernel);
double temporal_regularizer(const DataGrid& x, const LaplacianKernel& kernel);
double temporal_regularizer(const DataGrid& x, const SeparableKernel& kernel);

}  // namespace lcr
