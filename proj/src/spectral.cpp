#include "lcr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lcr {

ComplexGrid to_complex(const DataGrid& g) {
  std::vector<cplx> data(g.values().begin(), g.values().end());
  return ComplexGrid(g.shape(), std::move(data));
}

ComplexGrid dft(const DataGrid& g) { return dft(to_complex(g)); }

ComplexGrid dft(const ComplexGrid& g) {
  ComplexGrid out = g;
  GridTransform(g.shape()).forward(out.values());
  return out;
}

ComplexGrid idft(const ComplexGrid& g) {
  ComplexGrid out = g;
  GridTransform(g.shape()).inverse(out.values());
  return out;
}

RealPart take_real_part(const ComplexGrid& time_domain) {
  RealPart result{DataGrid(time_domain.shape()), 0.0};
  double max_re = 0.0;
  auto src = time_domain.values();
  auto dst = result.grid.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i].real();
    max_re = std::max(max_re, std::abs(src[i].real()));
    result.imaginary_residue =
        std::max(result.imaginary_residue, std::abs(src[i].imag()));
  }
  if (result.imaginary_residue > 1e-6 * max_re) {
    std::ostringstream msg;
    msg << "inverse transform is not real: max |Im| = "
        << result.imaginary_residue << ", max |Re| = " << max_re;
    throw ImaginaryResidueTooLarge(msg.str());
  }
  return result;
}

RealPart real_part_of_idft(const ComplexGrid& spectrum) {
  return take_real_part(idft(spectrum));
}

DataGrid zero_extend(const DataGrid& kernel, const Shape& shape) {
  validate_shape(shape);
  if (kernel.rank() != shape.size()) {
    throw ShapeMismatch("kernel rank " + std::to_string(kernel.rank()) +
                        " differs from data rank " +
                        std::to_string(shape.size()));
  }
  for (std::size_t a = 0; a < shape.size(); ++a) {
    if (kernel.extent(a) > shape[a]) {
      throw ShapeMismatch("kernel " + to_string(kernel.shape()) +
                          " exceeds data shape " + to_string(shape));
    }
  }
  if (kernel.shape() == shape) return kernel;

  // Pad every kernel shape to rank 3 so one triple loop covers all ranks.
  Shape k3 = kernel.shape();
  Shape d3 = shape;
  while (k3.size() < 3) {
    k3.insert(k3.begin(), 1);
    d3.insert(d3.begin(), 1);
  }
  DataGrid out(shape);
  for (std::size_t i = 0; i < k3[0]; ++i) {
    for (std::size_t j = 0; j < k3[1]; ++j) {
      for (std::size_t c = 0; c < k3[2]; ++c) {
        out[(i * d3[1] + j) * d3[2] + c] = kernel[(i * k3[1] + j) * k3[2] + c];
      }
    }
  }
  return out;
}

DataGrid circular_convolve(const DataGrid& x, const DataGrid& kernel) {
  const DataGrid k = zero_extend(kernel, x.shape());
  GridTransform transform(x.shape());
  ComplexGrid xs = to_complex(x);
  ComplexGrid ks = to_complex(k);
  transform.forward(xs.values());
  transform.forward(ks.values());
  auto xv = xs.values();
  auto kv = ks.values();
  for (std::size_t i = 0; i < xv.size(); ++i) xv[i] *= kv[i];
  transform.inverse(xs.values());
  DataGrid out(x.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i].real();
  return out;
}

double squared_norm(std::span<const cplx> values) {
  double sum = 0.0;
  for (const cplx& v : values) sum += std::norm(v);
  return sum;
}

}  // namespace lcr
