#pragma once

// Seeded random band-limited functions. Coefficients are drawn on a fixed
// frequency set |k_a| <= kmax_a independent of the grid, so the same seed
// gives the same continuous function at every resolution.

#include <cstdint>
#include <random>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/fft.hpp"
#include "mixnorm/grid.hpp"

namespace mixnorm {

struct RandomBandlimitedSpec {
  std::uint64_t seed = 1;
  std::vector<int> kmax;  ///< largest integer wavenumber per axis
};

/// sum_k c_k exp(2 pi i k.(x - lower)/L) with c_k ~ complex normal of unit
/// variance for |k_a| <= kmax_a, real part, scaled to unit L_2 norm. Wavenumbers
/// must stay within the lowest quarter of Nyquist (kmax_a <= n_a / 8).
inline GridFunction random_bandlimited(const RandomBandlimitedSpec& spec, const Box& box,
                                       const std::vector<std::size_t>& shape, Extension ext = Extension::periodic) {
  const std::size_t d = box.dim();
  require(spec.kmax.size() == d && shape.size() == d, "kmax", "one band per axis required");
  for (std::size_t a = 0; a < d; ++a) {
    require(spec.kmax[a] >= 1, "kmax", "band must contain a nonzero wavenumber");
    require(static_cast<std::size_t>(spec.kmax[a]) * 8 <= shape[a], "kmax",
            "band exceeds the lowest quarter of Nyquist on axis " + std::to_string(a));
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::size_t total = 1;
  for (auto n : shape) total *= n;
  std::vector<fft::cplx> coeffs(total, 0.0);
  // odometer over k in prod [-kmax_a, kmax_a], last axis fastest
  std::vector<int> k(d);
  for (std::size_t a = 0; a < d; ++a) k[a] = -spec.kmax[a];
  while (true) {
    const double re = normal(rng), im = normal(rng);
    std::size_t flat = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const auto n = static_cast<std::ptrdiff_t>(shape[a]);
      flat = flat * shape[a] + static_cast<std::size_t>(((k[a] % n) + n) % n);
    }
    coeffs[flat] = fft::cplx(re, im);
    std::size_t a = d;
    bool done = true;
    while (a > 0) {
      --a;
      if (++k[a] <= spec.kmax[a]) {
        done = false;
        break;
      }
      k[a] = -spec.kmax[a];
    }
    if (done) break;
  }
  auto z = fft::inverse(coeffs, shape);
  std::vector<double> v(total);
  for (std::size_t i = 0; i < total; ++i) v[i] = z[i].real();
  GridFunction u(box, shape, std::move(v), ext);
  const double n2 = lp_norm(u, 2.0);
  require(n2 > 0.0, "seed", "degenerate random draw");
  std::vector<double> w(u.values().begin(), u.values().end());
  for (auto& x : w) x /= n2;
  return u.with_values(std::move(w));
}

/// `count` members with seeds base_seed, base_seed + 1, ...
inline std::vector<GridFunction> random_family(std::uint64_t base_seed, std::size_t count, const std::vector<int>& kmax,
                                               const Box& box, const std::vector<std::size_t>& shape,
                                               Extension ext = Extension::periodic) {
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_bandlimited({base_seed + i, kmax}, box, shape, ext));
  return out;
}

}  // namespace mixnorm
