#pragma once

// Thin RAII layer over FFTW for complex transforms of real grid data in one
// to three dimensions. Buffers come from fftw_malloc so the planner sees the
// same alignment every call and FFTW_ESTIMATE plans are reproducible.
//
// Normalization: forward is unnormalized, inverse divides by the number of
// samples, so inverse(forward(u)) = u. Coefficients relate to the unitary
// continuous transform by the factor cell_volume / (2 pi)^(d/2) times a phase
// for the box origin; window-weighted reconstructions never see it.

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "mixnorm/core/error.hpp"

namespace mixnorm::fft {

using cplx = std::complex<double>;

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

struct PlanDestroy {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;
using Plan = std::unique_ptr<fftw_plan_s, PlanDestroy>;

inline Buffer allocate(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!p) throw std::bad_alloc();
  return Buffer(p);
}

inline void transform(std::span<const cplx> in, std::span<cplx> out, std::span<const std::size_t> shape,
                      int sign) {
  const std::size_t n = in.size();
  auto buf = allocate(n);
  int dims[3];
  for (std::size_t a = 0; a < shape.size(); ++a) dims[a] = static_cast<int>(shape[a]);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft(static_cast<int>(shape.size()), dims, buf.get(), buf.get(), sign, FFTW_ESTIMATE));
  }
  if (!plan) throw NumericalAnomaly("FFT planning failed");
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = in[i].real();
    buf[i][1] = in[i].imag();
  }
  fftw_execute(plan.get());
  for (std::size_t i = 0; i < n; ++i) out[i] = cplx(buf[i][0], buf[i][1]);
}

}  // namespace detail

/// Unnormalized forward DFT of real samples (row-major, axis 0 slowest).
inline std::vector<cplx> forward(std::span<const double> values, std::span<const std::size_t> shape) {
  std::vector<cplx> in(values.begin(), values.end());
  std::vector<cplx> out(values.size());
  detail::transform(in, out, shape, FFTW_FORWARD);
  return out;
}

/// Inverse DFT divided by the sample count.
inline std::vector<cplx> inverse(std::span<const cplx> spectrum, std::span<const std::size_t> shape) {
  std::vector<cplx> out(spectrum.size());
  detail::transform(spectrum, out, shape, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  for (auto& c : out) c *= scale;
  return out;
}

}  // namespace mixnorm::fft
