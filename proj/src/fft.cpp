#include "lcr/fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace lcr {

namespace {

constexpr std::size_t kMaxStockhamPrime = 31;

cplx unit_root(std::size_t num, std::size_t den) {
  // exp(-2 pi i num / den) with the argument reduced first.
  const double angle = -2.0 * std::numbers::pi *
                       static_cast<double>(num % den) /
                       static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

std::vector<std::size_t> small_factors(std::size_t n, std::size_t& rest) {
  std::vector<std::size_t> factors;
  while (n % 4 == 0) {
    factors.push_back(4);
    n /= 4;
  }
  while (n % 2 == 0) {
    factors.push_back(2);
    n /= 2;
  }
  for (std::size_t p = 3; p <= kMaxStockhamPrime; p += 2) {
    while (n % p == 0) {
      factors.push_back(p);
      n /= p;
    }
  }
  rest = n;
  return factors;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// In-place length-`radix` DFT of v. `roots` holds exp(-2 pi i s / radix).
inline void butterfly(cplx* v, std::size_t radix, const cplx* roots) {
  switch (radix) {
    case 2: {
      const cplx a = v[0], b = v[1];
      v[0] = a + b;
      v[1] = a - b;
      return;
    }
    case 3: {
      constexpr double kSin = 0.86602540378443864676;  // sqrt(3)/2
      const cplx t1 = v[1] + v[2];
      const cplx t2 = v[0] - 0.5 * t1;
      const cplx d = v[1] - v[2];
      const cplx t3{kSin * d.imag(), -kSin * d.real()};  // -i sqrt(3)/2 * d
      v[0] += t1;
      v[1] = t2 + t3;
      v[2] = t2 - t3;
      return;
    }
    case 4: {
      const cplx a = v[0] + v[2];
      const cplx b = v[0] - v[2];
      const cplx c = v[1] + v[3];
      const cplx e = v[1] - v[3];
      const cplx d{e.imag(), -e.real()};  // -i * e
      v[0] = a + c;
      v[1] = b + d;
      v[2] = a - c;
      v[3] = b - d;
      return;
    }
    default: {
      std::array<cplx, kMaxStockhamPrime> out{};
      for (std::size_t s = 0; s < radix; ++s) {
        cplx acc = v[0];
        std::size_t idx = 0;
        for (std::size_t r = 1; r < radix; ++r) {
          idx += s;
          if (idx >= radix) idx -= radix;
          acc += v[r] * roots[idx];
        }
        out[s] = acc;
      }
      std::copy_n(out.begin(), radix, v);
    }
  }
}

}  // namespace

struct FftPlan::Bluestein {
  std::size_t m;
  FftPlan inner;
  std::vector<cplx> chirp;       // exp(-i pi k^2 / n)
  std::vector<cplx> kernel_fft;  // FFT_m of the conjugate chirp, wrapped

  explicit Bluestein(std::size_t n) : m(next_pow2(2 * n - 1)), inner(m) {
    chirp.resize(n);
    const std::size_t period = 2 * n;
    for (std::size_t k = 0; k < n; ++k) {
      const auto sq = static_cast<unsigned long long>(k) * k % period;
      const double angle = -std::numbers::pi * static_cast<double>(sq) /
                           static_cast<double>(n);
      chirp[k] = {std::cos(angle), std::sin(angle)};
    }
    kernel_fft.assign(m, cplx{});
    kernel_fft[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel_fft[k] = std::conj(chirp[k]);
      kernel_fft[m - k] = std::conj(chirp[k]);
    }
    inner.forward(kernel_fft);
  }
};

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw ShapeError("FFT length must be positive");
  std::size_t rest = 1;
  const auto factors = small_factors(n, rest);
  if (rest != 1) {
    bluestein_ = std::make_unique<Bluestein>(n);
    return;
  }
  std::size_t span = 1;
  for (std::size_t radix : factors) {
    Stage stage{radix, span, {}, {}};
    for (std::size_t s = 0; s < radix; ++s) {
      stage.roots.push_back(unit_root(s, radix));
    }
    stage.twiddle.resize(span * radix);
    for (std::size_t k = 0; k < span; ++k) {
      for (std::size_t r = 0; r < radix; ++r) {
        stage.twiddle[k * radix + r] = unit_root(r * k, span * radix);
      }
    }
    stages_.push_back(std::move(stage));
    span *= radix;
  }
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

std::size_t FftPlan::scratch_size() const noexcept {
  if (bluestein_) return 2 * bluestein_->m;
  return n_ > 1 ? n_ : 0;
}

void FftPlan::stockham(std::span<cplx> data, std::span<cplx> scratch) const {
  if (n_ == 1) return;
  cplx* src = data.data();
  cplx* dst = scratch.data();
  std::array<cplx, kMaxStockhamPrime> v{};
  for (const Stage& stage : stages_) {
    const std::size_t radix = stage.radix;
    const std::size_t span = stage.span;
    const std::size_t m = n_ / radix;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = j % span;
      const cplx* tw = stage.twiddle.data() + k * radix;
      v[0] = src[j];
      for (std::size_t r = 1; r < radix; ++r) v[r] = src[j + r * m] * tw[r];
      butterfly(v.data(), radix, stage.roots.data());
      cplx* out = dst + (j - k) * radix + k;
      for (std::size_t r = 0; r < radix; ++r) out[r * span] = v[r];
    }
    std::swap(src, dst);
  }
  if (src != data.data()) std::copy_n(src, n_, data.data());
}

void FftPlan::forward(std::span<cplx> data, std::span<cplx> scratch) const {
  if (data.size() != n_ || scratch.size() < scratch_size()) {
    throw ShapeMismatch("FFT buffer does not match plan length " +
                        std::to_string(n_));
  }
  if (!bluestein_) {
    stockham(data, scratch);
    return;
  }
  const Bluestein& b = *bluestein_;
  std::span<cplx> work = scratch.first(b.m);
  std::span<cplx> inner_scratch = scratch.subspan(b.m, b.m);
  for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * b.chirp[k];
  std::fill(work.begin() + static_cast<std::ptrdiff_t>(n_), work.end(),
            cplx{});
  b.inner.forward(work, inner_scratch);
  for (std::size_t k = 0; k < b.m; ++k) work[k] *= b.kernel_fft[k];
  b.inner.backward(work, inner_scratch);
  const double scale = 1.0 / static_cast<double>(b.m);
  for (std::size_t k = 0; k < n_; ++k) {
    data[k] = work[k] * b.chirp[k] * scale;
  }
}

void FftPlan::backward(std::span<cplx> data, std::span<cplx> scratch) const {
  for (auto& v : data) v = std::conj(v);
  forward(data, scratch);
  for (auto& v : data) v = std::conj(v);
}

void FftPlan::forward(std::span<cplx> data) const {
  std::vector<cplx> scratch(scratch_size());
  forward(data, scratch);
}

void FftPlan::backward(std::span<cplx> data) const {
  std::vector<cplx> scratch(scratch_size());
  backward(data, scratch);
}

GridTransform::GridTransform(const Shape& shape)
    : shape_(shape), count_(element_count(shape)) {
  validate_shape(shape_);
  std::size_t longest = 0;
  std::size_t scratch = 0;
  for (std::size_t axis = 0; axis < shape_.size(); ++axis) {
    std::shared_ptr<const FftPlan> plan;
    for (std::size_t prev = 0; prev < axis; ++prev) {
      if (shape_[prev] == shape_[axis]) plan = plans_[prev];
    }
    if (!plan) plan = std::make_shared<const FftPlan>(shape_[axis]);
    scratch = std::max(scratch, plan->scratch_size());
    longest = std::max(longest, shape_[axis]);
    plans_.push_back(std::move(plan));
  }
  line_.resize(longest);
  scratch_.resize(scratch);
}

void GridTransform::forward(std::span<cplx> data) { apply(data, false); }

void GridTransform::inverse(std::span<cplx> data) {
  apply(data, true);
  const double scale = 1.0 / static_cast<double>(count_);
  for (auto& v : data) v *= scale;
}

void GridTransform::apply(std::span<cplx> data, bool inverse) {
  if (data.size() != count_) {
    throw ShapeMismatch("transform buffer size does not match shape " +
                        to_string(shape_));
  }
  std::size_t stride = count_;
  for (std::size_t axis = 0; axis < shape_.size(); ++axis) {
    const std::size_t len = shape_[axis];
    stride /= len;
    if (len == 1) continue;
    const FftPlan& plan = *plans_[axis];
    const std::size_t outer = count_ / (len * stride);
    std::span<cplx> line(line_.data(), len);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t s = 0; s < stride; ++s) {
        cplx* base = data.data() + o * len * stride + s;
        if (stride == 1) {
          std::span<cplx> contiguous(base, len);
          inverse ? plan.backward(contiguous, scratch_)
                  : plan.forward(contiguous, scratch_);
          continue;
        }
        for (std::size_t t = 0; t < len; ++t) line[t] = base[t * stride];
        inverse ? plan.backward(line, scratch_) : plan.forward(line, scratch_);
        for (std::size_t t = 0; t < len; ++t) base[t * stride] = line[t];
      }
    }
  }
}

}  // namespace lcr
