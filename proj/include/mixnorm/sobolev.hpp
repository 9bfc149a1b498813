#pragma once

// Derivative-based norms: the dominating mixed Sobolev norm over all
// multi-indices with |alpha|_inf <= m, its reduced form over {0, m}^d, the
// C^m_mix norm, and the mixed sup/L_p functional used for traces.

#include <cmath>
#include <span>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/core/parallel.hpp"
#include "mixnorm/fourier.hpp"
#include "mixnorm/grid.hpp"
#include "mixnorm/tensor_grid.hpp"

namespace mixnorm {

enum class Realization { spectral, central_difference };

inline const char* to_string(Realization r) { return r == Realization::spectral ? "spectral" : "central"; }

namespace detail {

// Second-order central stencils along one axis: order 1 is
// (u(x+dx) - u(x-dx)) / (2 dx), order 2 is the three-point Laplacian;
// higher orders compose these.
inline std::vector<double> central_pass(const GridFunction& u, std::span<const double> in, std::size_t axis,
                                        int order) {
  const auto g = axis_geometry(u.shape(), axis);
  const double dx = u.spacing(axis);
  const auto n = static_cast<std::ptrdiff_t>(g.n);
  const bool periodic = u.extension() == Extension::periodic;
  auto get = [&](std::size_t base, std::ptrdiff_t j) -> double {
    if (j < 0 || j >= n) {
      if (!periodic) return 0.0;
      j = ((j % n) + n) % n;
    }
    return in[base + static_cast<std::size_t>(j) * g.inner];
  };
  std::vector<double> out(in.size());
  for (std::size_t o = 0; o < g.outer; ++o)
    for (std::size_t i = 0; i < g.inner; ++i) {
      const std::size_t base = o * g.n * g.inner + i;
      for (std::ptrdiff_t j = 0; j < n; ++j) {
        double v = order == 1 ? (get(base, j + 1) - get(base, j - 1)) / (2.0 * dx)
                              : (get(base, j + 1) - 2.0 * get(base, j) + get(base, j - 1)) / (dx * dx);
        out[base + static_cast<std::size_t>(j) * g.inner] = v;
      }
    }
  return out;
}

}  // namespace detail

/// D^alpha u by second-order central differences.
inline GridFunction central_derivative(const GridFunction& u, std::span<const int> alpha) {
  require(alpha.size() == u.dim(), "alpha", "one order per axis required");
  std::vector<double> cur(u.values().begin(), u.values().end());
  for (std::size_t a = 0; a < u.dim(); ++a) {
    require(alpha[a] >= 0 && alpha[a] <= kMaxSpectralOrder, "alpha", "derivative order out of range");
    if (alpha[a] == 0) continue;
    require(u.shape()[a] >= 5, "resolution", "central stencils need at least 5 cells per axis");
    int left = alpha[a];
    while (left >= 2) {
      cur = detail::central_pass(u, cur, a, 2);
      left -= 2;
    }
    if (left == 1) cur = detail::central_pass(u, cur, a, 1);
  }
  return u.with_values(std::move(cur));
}

inline GridFunction derivative(const GridFunction& u, std::span<const int> alpha,
                               Realization how = Realization::spectral) {
  return how == Realization::spectral ? spectral_derivative(u, alpha) : central_derivative(u, alpha);
}

namespace detail {

inline void require_sobolev_exponent(double p) {
  require(p > 1.0 && !is_inf_exponent(p), "p", "Sobolev norms require 1 < p < inf");
}

// Multi-indices alpha with entries in `values`, last axis fastest.
inline std::vector<std::vector<int>> index_set(std::size_t d, const std::vector<int>& values) {
  std::vector<std::vector<int>> out;
  std::vector<std::size_t> pos(d, 0);
  while (true) {
    std::vector<int> a(d);
    for (std::size_t i = 0; i < d; ++i) a[i] = values[pos[i]];
    out.push_back(std::move(a));
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (++pos[i] < values.size()) break;
      pos[i] = 0;
      if (i == 0) return out;
    }
  }
}

template <class Norm>
double derivative_sum(const GridFunction& u, const std::vector<std::vector<int>>& alphas, Realization how,
                      Norm&& norm) {
  std::vector<double> terms(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t i) { terms[i] = norm(derivative(u, alphas[i], how)); });
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

inline std::vector<int> range_values(int m) {
  std::vector<int> v(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace detail

/// Multi-indices of the full norm: all alpha with |alpha|_inf <= m.
inline std::vector<std::vector<int>> full_index_set(std::size_t d, int m) {
  return detail::index_set(d, detail::range_values(m));
}

/// Multi-indices of the reduced norm: alpha in {0, m}^d.
inline std::vector<std::vector<int>> reduced_index_set(std::size_t d, int m) {
  return m == 0 ? std::vector<std::vector<int>>{std::vector<int>(d, 0)} : detail::index_set(d, {0, m});
}

/// sum_{|alpha|_inf <= m} ||D^alpha u||_p
inline double sobolev_norm_full(const GridFunction& u, int m, double p, Realization how = Realization::spectral) {
  detail::require_sobolev_exponent(p);
  require(m >= 0 && m <= kMaxSpectralOrder, "m", "order out of range");
  return detail::derivative_sum(u, full_index_set(u.dim(), m), how,
                                [p](const GridFunction& f) { return lp_norm(f, p); });
}

/// sum_{alpha in {0,m}^d} ||D^alpha u||_p
inline double sobolev_norm_reduced(const GridFunction& u, int m, double p,
                                   Realization how = Realization::spectral) {
  detail::require_sobolev_exponent(p);
  require(m >= 0 && m <= kMaxSpectralOrder, "m", "order out of range");
  return detail::derivative_sum(u, reduced_index_set(u.dim(), m), how,
                                [p](const GridFunction& f) { return lp_norm(f, p); });
}

/// sum_{|alpha|_inf <= m} max_x |D^alpha u(x)|
inline double cmix_norm(const GridFunction& u, int m, Realization how = Realization::spectral) {
  require(m >= 0 && m <= kMaxSpectralOrder, "m", "order out of range");
  return detail::derivative_sum(u, full_index_set(u.dim(), m), how,
                                [](const GridFunction& f) { return sup_norm(f); });
}

/// (integral over the first N axes of max over the remaining axes of |D^beta u|^p)^{1/p}.
inline double mixed_sup_lp(const GridFunction& u, std::span<const int> beta, std::size_t N, double p,
                           Realization how = Realization::spectral) {
  require(N >= 1 && N <= u.dim(), "N", "split index must lie in [1, d]");
  require_exponent(p);
  auto D = derivative(u, beta, how);
  if (N == u.dim()) return lp_norm(D, p);
  // flat = lead * tail + rest, with lead over the first N axes
  std::size_t lead = 1, tail = 1;
  for (std::size_t a = 0; a < N; ++a) lead *= u.shape()[a];
  for (std::size_t a = N; a < u.dim(); ++a) tail *= u.shape()[a];
  std::vector<double> sup(lead, 0.0);
  for (std::size_t i = 0; i < lead; ++i)
    sup[i] = detail::max_abs(D.values().subspan(i * tail, tail));
  if (detail::is_inf_exponent(p)) return detail::max_abs(sup);
  double vol = 1.0;
  for (std::size_t a = 0; a < N; ++a) vol *= u.spacing(a);
  return detail::finish_lp(detail::sum_abs_pow(sup, p) * vol, p);
}

// Cross-norm forms on factored inputs.
inline double sobolev_norm_full(const TensorGridFunction& u, int m, double p,
                                Realization how = Realization::spectral) {
  return cross_norm(u, [&](const GridFunction& f) { return sobolev_norm_full(f, m, p, how); });
}

inline double sobolev_norm_reduced(const TensorGridFunction& u, int m, double p,
                                   Realization how = Realization::spectral) {
  return cross_norm(u, [&](const GridFunction& f) { return sobolev_norm_reduced(f, m, p, how); });
}

inline double cmix_norm(const TensorGridFunction& u, int m, Realization how = Realization::spectral) {
  return cross_norm(u, [&](const GridFunction& f) { return cmix_norm(f, m, how); });
}

}  // namespace mixnorm
