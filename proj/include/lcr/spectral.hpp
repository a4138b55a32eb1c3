#pragma once

#include "lcr/fft.hpp"
#include "lcr/grid.hpp"

namespace lcr {

/// Unnormalized forward DFT along every axis.
ComplexGrid dft(const DataGrid& g);
ComplexGrid dft(const ComplexGrid& g);

/// Inverse DFT with the 1/P factor, so idft(dft(g)) == g.
ComplexGrid idft(const ComplexGrid& g);

ComplexGrid to_complex(const DataGrid& g);

/// Real part of a spectrum's inverse, plus the largest imaginary magnitude
/// that was discarded.
struct RealPart {
  DataGrid grid;
  double imaginary_residue = 0.0;
};

/// Drops the imaginary part of `time_domain` (already inverse transformed).
/// Throws ImaginaryResidueTooLarge if max|Im| > 1e-6 * max|Re|.
RealPart take_real_part(const ComplexGrid& time_domain);

/// take_real_part(idft(spectrum)).
RealPart real_part_of_idft(const ComplexGrid& spectrum);

/// Copies `kernel` into the leading corner of a zero grid of `shape`.
/// Throws ShapeMismatch if the rank differs or any kernel axis is longer.
DataGrid zero_extend(const DataGrid& kernel, const Shape& shape);

/// Circular convolution z = k * x, evaluated as idft(dft(x) . dft(k)).
/// Kernels shorter than x along an axis are zero-extended first.
DataGrid circular_convolve(const DataGrid& x, const DataGrid& kernel);

/// Sum of squared moduli.
double squared_norm(std::span<const cplx> values);

}  // namespace lcr
