#pragma once

// Dyadic decompositions of frequency space and the norms built on them:
// Littlewood-Paley blocks, Besov and Sobolev norms via blocks, band limiting,
// spectral derivatives, Nikol'skij ratios and Peetre maximal functions.
//
// Frequencies are angular: the DFT index j on an axis of length L and n
// samples sits at xi = 2 pi k / L with k = j for j <= n/2 and j - n otherwise.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/core/parallel.hpp"
#include "mixnorm/core/summation.hpp"
#include "mixnorm/differences.hpp"
#include "mixnorm/fft.hpp"
#include "mixnorm/grid.hpp"
#include "mixnorm/profiles.hpp"

namespace mixnorm {

using fft::cplx;

/// Angular frequencies of the DFT bins along one axis.
inline std::vector<double> angular_frequencies(std::size_t n, double length) {
  std::vector<double> xi(n);
  const auto ni = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t j = 0; j < ni; ++j) {
    std::ptrdiff_t k = j <= ni / 2 ? j : j - ni;
    xi[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
  }
  return xi;
}

/// DFT coefficients of a real grid function with their frequency grid.
struct Spectrum {
  std::vector<cplx> coeffs;
  std::vector<std::size_t> shape;
  std::vector<std::vector<double>> xi;  // per axis
  /// forward transform is unnormalized; the inverse divides by the sample count
  static constexpr const char* normalization = "forward unnormalized, inverse 1/N";
};

inline Spectrum spectrum(const GridFunction& u) {
  Spectrum s;
  s.shape = u.shape();
  s.coeffs = fft::forward(u.values(), u.shape());
  for (std::size_t a = 0; a < u.dim(); ++a) s.xi.push_back(angular_frequencies(u.shape()[a], u.box().length(a)));
  return s;
}

enum class SystemKind { smooth, sharp };

inline const char* to_string(SystemKind k) { return k == SystemKind::smooth ? "smooth" : "sharp"; }

/// phi_0: 1 on [-1, 1], supported in [-3/2, 3/2].
inline double lp_profile(double xi) { return profiles::plateau_bump(xi, 1.0, 1.5); }

/// A dyadic decomposition of unity sampled on the frequency grid of one
/// box and resolution. Windows are products of per-axis 1-d windows.
class DyadicSystem {
public:
  DyadicSystem() = default;
  DyadicSystem(SystemKind kind, Box box, std::vector<std::size_t> shape) : kind_(kind), box_(std::move(box)), shape_(std::move(shape)) {
    for (std::size_t a = 0; a < shape_.size(); ++a) {
      const std::size_t n = shape_[a];
      auto xi = angular_frequencies(n, box_.length(a));
      const double xi_max = std::numbers::pi * static_cast<double>(n) / box_.length(a);
      int J = std::max(0, static_cast<int>(std::ceil(std::log2(xi_max) - 1e-12)));
      levels_.push_back(J);
      std::vector<std::vector<double>> w(static_cast<std::size_t>(J) + 1, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        const double x = std::abs(xi[i]);
        if (kind_ == SystemKind::sharp) {
          int j = x <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(x) - 1e-12));
          // guard against log2 rounding at exact powers of two
          while (j > 0 && x <= std::ldexp(1.0, j - 1)) --j;
          while (x > std::ldexp(1.0, j)) ++j;
          w[static_cast<std::size_t>(std::min(j, J))][i] = 1.0;
        } else {
          w[0][i] = lp_profile(x);
          for (int j = 1; j <= J; ++j)
            w[static_cast<std::size_t>(j)][i] = lp_profile(std::ldexp(x, -j)) - lp_profile(std::ldexp(x, -j + 1));
        }
      }
      windows_.push_back(std::move(w));
    }
  }

  SystemKind kind() const { return kind_; }
  const Box& box() const { return box_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t dim() const { return shape_.size(); }
  /// Highest level per axis: the smallest J with 2^J >= the Nyquist frequency.
  int levels(std::size_t axis) const { return levels_[axis]; }
  std::span<const double> window(std::size_t axis, int j) const { return windows_[axis][static_cast<std::size_t>(j)]; }

  /// Number of multi-indices k with 0 <= k_a <= levels(a).
  std::size_t block_count() const {
    std::size_t c = 1;
    for (int J : levels_) c *= static_cast<std::size_t>(J) + 1;
    return c;
  }
  /// Flat block number -> multi-index, last axis fastest.
  std::vector<int> block_index(std::size_t flat) const {
    std::vector<int> k(dim());
    for (std::size_t a = dim(); a-- > 0;) {
      auto n = static_cast<std::size_t>(levels_[a]) + 1;
      k[a] = static_cast<int>(flat % n);
      flat /= n;
    }
    return k;
  }

private:
  SystemKind kind_ = SystemKind::smooth;
  Box box_;
  std::vector<std::size_t> shape_;
  std::vector<int> levels_;
  std::vector<std::vector<std::vector<double>>> windows_;
};

inline DyadicSystem build_system(SystemKind kind, const Box& box, const std::vector<std::size_t>& shape) {
  require(shape.size() == box.dim(), "resolution", "one sample count per axis required");
  for (auto n : shape) {
    require(n >= 16, "resolution", "at least 16 samples per axis required");
    require(std::has_single_bit(n), "resolution", "sample counts must be powers of two");
  }
  return DyadicSystem(kind, box, shape);
}

inline DyadicSystem build_system(SystemKind kind, const GridFunction& u) { return build_system(kind, u.box(), u.shape()); }

namespace detail {

inline void require_system_grid(const GridFunction& u, const DyadicSystem& sys) {
  require(u.box() == sys.box() && u.shape() == sys.shape(), "system", "dyadic system built for a different grid");
}

// Multiplies the spectrum by a separable mask given per axis.
inline std::vector<cplx> apply_mask(const Spectrum& s, std::span<const std::span<const double>> masks) {
  std::vector<cplx> out(s.coeffs.size());
  const std::size_t d = s.shape.size();
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) w *= masks[a][idx[a]];
    out[flat] = w == 0.0 ? cplx(0.0) : s.coeffs[flat] * w;
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < s.shape[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

// Real part of an inverse transform; the imaginary part must be roundoff.
// sum |c_k| / N bounds every output value and scales with any amplification
// of roundoff by the multiplier, so the residue is measured against it.
inline GridFunction real_inverse(const GridFunction& grid, std::span<const cplx> spec) {
  double bound = 0.0;
  for (const auto& c : spec) bound += std::abs(c);
  bound /= static_cast<double>(spec.size());
  auto z = fft::inverse(spec, grid.shape());
  std::vector<double> re(z.size());
  double max_im = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    re[i] = z[i].real();
    max_im = std::max(max_im, std::abs(z[i].imag()));
  }
  if (max_im > 1e-6 * bound && max_im > 1e-13)
    throw NumericalAnomaly("inverse transform left an imaginary residue of " + std::to_string(max_im));
  return grid.with_values(std::move(re));
}

inline bool block_is_empty(const DyadicSystem& sys, std::span<const int> k) {
  for (std::size_t a = 0; a < sys.dim(); ++a) {
    auto w = sys.window(a, k[a]);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) return true;
  }
  return false;
}

inline GridFunction block_from_spectrum(const GridFunction& u, const Spectrum& s, const DyadicSystem& sys,
                                        std::span<const int> k) {
  std::array<std::span<const double>, kMaxDim> masks;
  for (std::size_t a = 0; a < u.dim(); ++a) masks[a] = sys.window(a, k[a]);
  return real_inverse(u, apply_mask(s, std::span<const std::span<const double>>(masks.data(), u.dim())));
}

}  // namespace detail

/// F^-1[phi_k F u].
inline GridFunction lp_block(const GridFunction& u, std::span<const int> k, const DyadicSystem& sys) {
  detail::require_system_grid(u, sys);
  require(k.size() == u.dim(), "k", "one level per axis required");
  for (std::size_t a = 0; a < u.dim(); ++a)
    require(k[a] >= 0 && k[a] <= sys.levels(a), "k", "level out of range on axis " + std::to_string(a));
  return detail::block_from_spectrum(u, spectrum(u), sys, k);
}

/// Every block, in flat block order (last axis fastest).
inline std::vector<GridFunction> lp_decomposition(const GridFunction& u, const DyadicSystem& sys) {
  detail::require_system_grid(u, sys);
  const auto s = spectrum(u);
  std::vector<GridFunction> out(sys.block_count());
  parallel_for(out.size(), [&](std::size_t b) {
    auto k = sys.block_index(b);
    out[b] = detail::block_is_empty(sys, k) ? GridFunction::zeros(u.box(), u.shape(), u.extension())
                                            : detail::block_from_spectrum(u, s, sys, k);
  });
  return out;
}

/// (sum_k 2^{r|k|_1 p} ||F^-1[phi_k F u]||_p^p)^{1/p} over the retained levels,
/// max form at p = inf.
inline double besov_norm_fourier(const GridFunction& u, double r, double p, const DyadicSystem& sys) {
  require_exponent(p);
  require(r >= 0, "r", "smoothness must be nonnegative");
  detail::require_system_grid(u, sys);
  const auto s = spectrum(u);
  const bool inf = detail::is_inf_exponent(p);
  std::vector<double> terms(sys.block_count(), 0.0);
  parallel_for(terms.size(), [&](std::size_t b) {
    auto k = sys.block_index(b);
    if (detail::block_is_empty(sys, k)) return;
    int k1 = 0;
    for (int v : k) k1 += v;
    double n = lp_norm(detail::block_from_spectrum(u, s, sys, k), p);
    terms[b] = inf ? std::exp2(r * k1) * n : std::exp2(r * k1 * p) * std::pow(n, p);
  });
  if (inf) return *std::max_element(terms.begin(), terms.end());
  return detail::finish_lp(detail::pairwise_sum(terms), p);
}

/// || (sum_k 2^{2|k|_1 m} |F^-1[phi_k F u]|^2)^{1/2} ||_p, 1 < p < inf.
inline double sobolev_norm_fourier(const GridFunction& u, int m, double p, const DyadicSystem& sys) {
  require(p > 1.0 && !detail::is_inf_exponent(p), "p", "square-function norm requires 1 < p < inf");
  require(m >= 0, "m", "order must be nonnegative");
  detail::require_system_grid(u, sys);
  const auto s = spectrum(u);
  std::vector<GridFunction> blocks(sys.block_count());
  std::vector<char> used(sys.block_count(), 0);
  parallel_for(blocks.size(), [&](std::size_t b) {
    auto k = sys.block_index(b);
    if (detail::block_is_empty(sys, k)) return;
    blocks[b] = detail::block_from_spectrum(u, s, sys, k);
    used[b] = 1;
  });
  std::vector<double> sq(u.size(), 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (!used[b]) continue;
    auto k = sys.block_index(b);
    int k1 = 0;
    for (int v : k) k1 += v;
    const double w = std::exp2(2.0 * k1 * m);
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += w * blocks[b][i] * blocks[b][i];
  }
  for (auto& v : sq) v = std::sqrt(v);
  return lp_norm(u.with_values(std::move(sq)), p);
}

/// Zeroes every coefficient with |xi_a| > b_a on some axis.
inline GridFunction bandlimit(const GridFunction& u, std::span<const double> b) {
  require(b.size() == u.dim(), "b", "one bandwidth per axis required");
  for (double v : b) require(v > 0, "b", "bandwidths must be positive");
  const auto s = spectrum(u);
  std::vector<std::vector<double>> masks(u.dim());
  std::array<std::span<const double>, kMaxDim> views;
  for (std::size_t a = 0; a < u.dim(); ++a) {
    masks[a].resize(s.xi[a].size());
    for (std::size_t i = 0; i < masks[a].size(); ++i) masks[a][i] = std::abs(s.xi[a][i]) <= b[a] * (1 + 1e-12) ? 1.0 : 0.0;
    views[a] = masks[a];
  }
  return detail::real_inverse(u, detail::apply_mask(s, std::span<const std::span<const double>>(views.data(), u.dim())));
}

/// Relative L_2 distance between u and its band limitation.
inline double bandlimit_defect(const GridFunction& u, std::span<const double> b) {
  auto v = bandlimit(u, b);
  std::vector<double> diff(u.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = u[i] - v[i];
  double n = lp_norm(u, 2.0);
  return n == 0.0 ? 0.0 : lp_norm(u.with_values(std::move(diff)), 2.0) / n;
}

inline constexpr int kMaxSpectralOrder = 4;

/// F^-1[(i xi)^alpha F u]. The Nyquist bin is dropped for odd orders, where
/// its derivative has no real representative.
inline GridFunction spectral_derivative(const GridFunction& u, std::span<const int> alpha,
                                        int max_order = kMaxSpectralOrder) {
  require(alpha.size() == u.dim(), "alpha", "one order per axis required");
  bool zero_order = true;
  for (int a : alpha) {
    require(a >= 0 && a <= max_order, "alpha", "derivative order outside [0, " + std::to_string(max_order) + "]");
    zero_order = zero_order && a == 0;
  }
  if (zero_order) return u;
  auto s = spectrum(u);
  // per-axis factors (i xi)^alpha_a
  std::vector<std::vector<cplx>> f(u.dim());
  for (std::size_t a = 0; a < u.dim(); ++a) {
    const std::size_t n = u.shape()[a];
    f[a].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx v(1.0);
      for (int t = 0; t < alpha[a]; ++t) v *= cplx(0.0, s.xi[a][i]);
      if (alpha[a] % 2 == 1 && n % 2 == 0 && i == n / 2) v = 0.0;
      f[a][i] = v;
    }
  }
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t flat = 0; flat < s.coeffs.size(); ++flat) {
    cplx w(1.0);
    for (std::size_t a = 0; a < u.dim(); ++a) w *= f[a][idx[a]];
    s.coeffs[flat] *= w;
    for (std::size_t a = u.dim(); a-- > 0;) {
      if (++idx[a] < u.shape()[a]) break;
      idx[a] = 0;
    }
  }
  return detail::real_inverse(u, s.coeffs);
}

/// ||D^alpha u||_p / (prod b_i^{alpha_i + 1/p0 - 1/p} ||u||_p0) for u band-limited to b.
inline double nikolskij_ratio(const GridFunction& u, std::span<const int> alpha, double p0, double p,
                              std::span<const double> b) {
  require_exponent(p0);
  require_exponent(p);
  require(p0 <= p, "p0", "p0 must not exceed p");
  require(b.size() == u.dim(), "b", "one bandwidth per axis required");
  const double n0 = lp_norm(u, p0);
  require(n0 > 0.0, "u", "zero function has no Nikol'skij ratio");
  require(bandlimit_defect(u, b) <= 1e-8, "b", "input is not band-limited to b");
  auto inv = [](double q) { return detail::is_inf_exponent(q) ? 0.0 : 1.0 / q; };
  double scale = 1.0;
  for (std::size_t a = 0; a < u.dim(); ++a) scale *= std::pow(b[a], alpha[a] + inv(p0) - inv(p));
  return lp_norm(spectral_derivative(u, alpha), p) / (scale * n0);
}

namespace detail {

// One-dimensional pass of the Peetre supremum along `axis`.
inline std::vector<double> peetre_pass(const GridFunction& grid, std::span<const double> in, std::size_t axis,
                                       double b, double a) {
  const auto g = axis_geometry(grid.shape(), axis);
  const auto n = static_cast<std::ptrdiff_t>(g.n);
  const double dx = grid.spacing(axis);
  const bool periodic = grid.extension() == Extension::periodic;
  // weight by signed cell offset c = j - i, stored at c + n - 1
  std::vector<double> w(2 * g.n - 1);
  for (std::ptrdiff_t c = -(n - 1); c <= n - 1; ++c) {
    std::ptrdiff_t cc = c;
    if (periodic) {
      cc = ((c % n) + n) % n;
      if (cc >= n - n / 2) cc -= n;  // minimal image in [-n/2, n/2)
    }
    w[static_cast<std::size_t>(c + n - 1)] = std::pow(1.0 + std::abs(b * static_cast<double>(cc) * dx), -a);
  }
  std::vector<double> out(in.size(), 0.0);
  std::vector<double> line(g.n), res(g.n);
  for (std::size_t o = 0; o < g.outer; ++o)
    for (std::size_t i = 0; i < g.inner; ++i) {
      const std::size_t base = o * g.n * g.inner + i;
      for (std::size_t j = 0; j < g.n; ++j) line[j] = in[base + j * g.inner];
      for (std::ptrdiff_t j = 0; j < n; ++j) {
        double m = 0.0;
        const double* wj = w.data() + (j + n - 1);
        for (std::ptrdiff_t s = 0; s < n; ++s) m = std::max(m, line[static_cast<std::size_t>(s)] * wj[-s]);
        res[static_cast<std::size_t>(j)] = m;
      }
      for (std::size_t j = 0; j < g.n; ++j) out[base + j * g.inner] = res[j];
    }
  return out;
}

}  // namespace detail

/// P_{b,a}u(x) = max_z |u(x - z)| / prod (1 + |b_i z_i|)^a over grid offsets z
/// (one period for periodic grids, the box otherwise). The weight factors
/// over axes, so the maximum is taken one axis at a time.
inline GridFunction peetre_maximal(const GridFunction& u, std::span<const double> b, double a,
                                   double band_tolerance = 1e-6) {
  require(a > 0, "a", "Peetre exponent must be positive");
  require(b.size() == u.dim(), "b", "one bandwidth per axis required");
  for (double v : b) require(v > 0, "b", "bandwidths must be positive");
  if (band_tolerance < kInf) require(bandlimit_defect(u, b) <= band_tolerance, "b", "input is not band-limited to b");
  std::vector<double> cur(u.size());
  for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = std::abs(u[i]);
  for (std::size_t ax = 0; ax < u.dim(); ++ax) cur = detail::peetre_pass(u, cur, ax, b[ax], a);
  return u.with_values(std::move(cur));
}

/// max_x |Delta_h^{m,e} u(x)| / (prod_{i in e} max{1, |b_i h_i|^a} min{1, |b_i h_i|^{m_i}} P_{b,a}u(x)),
/// with h snapped to whole cells.
inline double difference_maximal_check(const GridFunction& u, DirectionSet e, const MixedOrder& m,
                                       std::span<const double> h, std::span<const double> b, double a) {
  for (auto ax : e.axes()) require(m[ax] >= 1, "m", "orders on e must be at least 1");
  auto diff = mixed_difference(u, e, m, h);
  double factor = 1.0;
  for (auto ax : e.axes()) {
    const double bh = std::abs(b[ax] * static_cast<double>(diff.cells[ax]) * u.spacing(ax));
    factor *= std::max(1.0, std::pow(bh, a)) * std::min(1.0, std::pow(bh, m[ax]));
  }
  if (factor == 0.0) return 0.0;
  auto P = peetre_maximal(u, b, a);
  double worst = 0.0;
  const double scale = std::max(sup_norm(u), 1e-300);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double num = std::abs(diff.function[i]);
    if (P[i] == 0.0) {
      if (num > 1e-13 * scale) throw NumericalAnomaly("Peetre maximal function vanishes where the difference does not");
      continue;
    }
    worst = std::max(worst, num / (factor * P[i]));
  }
  return worst;
}

}  // namespace mixnorm
