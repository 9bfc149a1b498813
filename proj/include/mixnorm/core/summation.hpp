#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace mixnorm::detail {

// Blocked pairwise summation. The split points depend only on the length,
// so the result is reproducible bit for bit.
template <class Term>
double pairwise_sum(std::size_t count, Term&& term) {
  constexpr std::size_t kBlock = 64;
  if (count <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += term(i);
    return s;
  }
  struct Rec {
    Term& t;
    double operator()(std::size_t lo, std::size_t hi) const {
      if (hi - lo <= kBlock) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += t(i);
        return s;
      }
      const std::size_t mid = lo + (hi - lo) / 2;
      return (*this)(lo, mid) + (*this)(mid, hi);
    }
  };
  return Rec{term}(0, count);
}

inline double pairwise_sum(std::span<const double> v) {
  return pairwise_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

inline bool is_inf_exponent(double p) { return std::isinf(p) && p > 0; }

// sum |v_i|^p, specialised for the exponents that dominate run time
inline double sum_abs_pow(std::span<const double> v, double p) {
  if (p == 1.0) return pairwise_sum(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
  if (p == 2.0) return pairwise_sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; });
  return pairwise_sum(v.size(), [&](std::size_t i) { return std::pow(std::abs(v[i]), p); });
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace mixnorm::detail
