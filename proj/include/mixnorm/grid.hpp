#pragma once

// Sampled scalar fields on uniform grids over boxes in one to three
// dimensions, together with the quadrature and pointwise algebra that every
// norm in the library is assembled from.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/core/summation.hpp"

namespace mixnorm {

inline constexpr std::size_t kMaxDim = 3;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Extension { zero, periodic };

inline const char* to_string(Extension e) { return e == Extension::zero ? "zero" : "periodic"; }

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
    require(lower.size() == upper.size(), "box", "lower/upper dimension mismatch");
    require(!lower.empty() && lower.size() <= kMaxDim, "box", "dimension must be 1, 2 or 3");
    for (std::size_t i = 0; i < lower.size(); ++i)
      require(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] < upper[i], "box",
              "lower < upper violated on axis " + std::to_string(i));
  }

  /// [lo, hi]^d
  static Box cube(std::size_t d, double lo, double hi) {
    return Box(std::vector<double>(d, lo), std::vector<double>(d, hi));
  }

  std::size_t dim() const noexcept { return lower.size(); }
  double length(std::size_t axis) const { return upper[axis] - lower[axis]; }
  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= length(i);
    return v;
  }

  friend bool operator==(const Box&, const Box&) = default;

  /// Cartesian product, axes of `a` first.
  friend Box operator*(const Box& a, const Box& b) {
    auto lo = a.lower;
    auto hi = a.upper;
    lo.insert(lo.end(), b.lower.begin(), b.lower.end());
    hi.insert(hi.end(), b.upper.begin(), b.upper.end());
    return Box(std::move(lo), std::move(hi));
  }
};

/// Values of a real field at the cell-left nodes lower_i + j*dx_i,
/// j = 0..n_i-1, stored row-major with axis 0 slowest. Immutable once built.
class GridFunction {
public:
  GridFunction() = default;

  GridFunction(Box box, std::vector<std::size_t> shape, std::vector<double> values,
               Extension extension = Extension::zero)
      : box_(std::move(box)), shape_(std::move(shape)), values_(std::move(values)), ext_(extension) {
    require(shape_.size() == box_.dim(), "resolution", "one sample count per axis required");
    std::size_t total = 1;
    for (auto n : shape_) {
      require(n > 0, "resolution", "sample counts must be positive");
      total *= n;
    }
    require(values_.size() == total, "values", "size does not match the resolution");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) throw NumericalAnomaly("non-finite grid value at flat index " + std::to_string(i));
    }
    strides_.assign(dim(), 1);
    for (std::size_t a = dim(); a-- > 1;) strides_[a - 1] = strides_[a] * shape_[a];
  }

  static GridFunction zeros(const Box& box, const std::vector<std::size_t>& shape,
                            Extension extension = Extension::zero) {
    std::size_t total = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    return GridFunction(box, shape, std::vector<double>(total, 0.0), extension);
  }

  /// New function on the same grid.
  GridFunction with_values(std::vector<double> values) const {
    return GridFunction(box_, shape_, std::move(values), ext_);
  }

  std::size_t dim() const noexcept { return shape_.size(); }
  const Box& box() const noexcept { return box_; }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  Extension extension() const noexcept { return ext_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

  double spacing(std::size_t axis) const { return box_.length(axis) / static_cast<double>(shape_[axis]); }
  double node(std::size_t axis, std::ptrdiff_t j) const {
    return box_.lower[axis] + static_cast<double>(j) * spacing(axis);
  }
  double cell_volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < dim(); ++a) v *= spacing(a);
    return v;
  }

  double operator[](std::size_t flat) const { return values_[flat]; }

  std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t a = 0; a < dim(); ++a) {
      idx[a] = flat / strides_[a];
      flat %= strides_[a];
    }
    return idx;
  }

  /// Value at a possibly out-of-range multi-index, per the extension rule.
  double at(std::span<const std::ptrdiff_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim(); ++a) {
      auto n = static_cast<std::ptrdiff_t>(shape_[a]);
      std::ptrdiff_t j = idx[a];
      if (j < 0 || j >= n) {
        if (ext_ == Extension::zero) return 0.0;
        j = ((j % n) + n) % n;
      }
      flat += static_cast<std::size_t>(j) * strides_[a];
    }
    return values_[flat];
  }

  bool same_grid(const GridFunction& o) const {
    return box_ == o.box_ && shape_ == o.shape_ && ext_ == o.ext_;
  }

private:
  Box box_;
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
  Extension ext_ = Extension::zero;
  std::vector<std::size_t> strides_;
};

/// Throws ValidationError naming the first mismatched grid attribute.
inline void require_same_grid(const GridFunction& u, const GridFunction& v) {
  require(u.box() == v.box(), "box", "grid mismatch");
  require(u.shape() == v.shape(), "resolution", "grid mismatch");
  require(u.extension() == v.extension(), "extension", "grid mismatch");
}

/// Samples `expr` at every node. `expr` receives the node coordinates as a
/// span of length d.
template <class Expr>
GridFunction sample(Expr&& expr, const Box& box, const std::vector<std::size_t>& shape,
                    Extension extension = Extension::zero) {
  GridFunction grid = GridFunction::zeros(box, shape, extension);
  std::vector<double> values(grid.size());
  std::array<double, kMaxDim> x{};
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    auto idx = grid.unflatten(flat);
    for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = grid.node(a, static_cast<std::ptrdiff_t>(idx[a]));
    double v = expr(std::span<const double>(x.data(), grid.dim()));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite sample at node (";
      for (std::size_t a = 0; a < grid.dim(); ++a) os << (a ? ", " : "") << x[a];
      os << ")";
      throw NumericalAnomaly(os.str());
    }
    values[flat] = v;
  }
  return grid.with_values(std::move(values));
}

/// One-dimensional convenience overload.
template <class Expr>
GridFunction sample_1d(Expr&& expr, double lower, double upper, std::size_t n,
                       Extension extension = Extension::zero) {
  return sample([&](std::span<const double> x) { return expr(x[0]); }, Box({lower}, {upper}), {n}, extension);
}

inline void require_exponent(double p) {
  require(p >= 1.0 && !std::isnan(p), "p", "integrability exponent must lie in [1, inf]");
}

/// Left-endpoint Riemann sum (sum |u|^p * cell volume)^(1/p); max |u| for p = inf.
inline double lp_norm(const GridFunction& u, double p) {
  require_exponent(p);
  if (detail::is_inf_exponent(p)) return detail::max_abs(u.values());
  double s = detail::sum_abs_pow(u.values(), p) * u.cell_volume();
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

inline double sup_norm(const GridFunction& u) { return detail::max_abs(u.values()); }

inline GridFunction pointwise_multiply(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] * v[i];
  return u.with_values(std::move(w));
}

inline GridFunction operator*(const GridFunction& u, const GridFunction& v) { return pointwise_multiply(u, v); }

/// (u (x) v)(x, y) = u(x) v(y) on the product box.
inline GridFunction tensor_product(const GridFunction& u, const GridFunction& v) {
  require(u.dim() + v.dim() <= kMaxDim, "dimension", "tensor product would exceed three dimensions");
  require(u.extension() == v.extension(), "extension", "factors must share the extension rule");
  auto shape = u.shape();
  shape.insert(shape.end(), v.shape().begin(), v.shape().end());
  std::vector<double> w(u.size() * v.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    for (std::size_t k = 0; k < v.size(); ++k) w[j * v.size() + k] = u[j] * v[k];
  return GridFunction(u.box() * v.box(), std::move(shape), std::move(w), u.extension());
}

/// Translation by whole cells: result(x) = u(x - cells*dx). Vacated cells are
/// filled per the extension rule.
inline GridFunction shift_cells(const GridFunction& u, std::span<const std::ptrdiff_t> cells) {
  require(cells.size() == u.dim(), "shift", "one cell count per axis required");
  std::vector<double> w(u.size());
  std::array<std::ptrdiff_t, kMaxDim> src{};
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    auto idx = u.unflatten(flat);
    for (std::size_t a = 0; a < u.dim(); ++a) src[a] = static_cast<std::ptrdiff_t>(idx[a]) - cells[a];
    w[flat] = u.at(std::span<const std::ptrdiff_t>(src.data(), u.dim()));
  }
  return u.with_values(std::move(w));
}

/// Translation by a displacement in length units; each component must be a
/// whole number of cells.
inline GridFunction shift(const GridFunction& u, std::span<const double> displacement) {
  require(displacement.size() == u.dim(), "shift", "one displacement per axis required");
  std::array<std::ptrdiff_t, kMaxDim> cells{};
  for (std::size_t a = 0; a < u.dim(); ++a) {
    double c = displacement[a] / u.spacing(a);
    double r = std::round(c);
    require(std::abs(c - r) <= 1e-9 * std::max(1.0, std::abs(c)), "shift",
            "displacement on axis " + std::to_string(a) + " is not a whole number of cells");
    cells[a] = static_cast<std::ptrdiff_t>(r);
  }
  return shift_cells(u, std::span<const std::ptrdiff_t>(cells.data(), u.dim()));
}

/// First and last node index with a nonzero value; {1, 0} for the zero function.
inline std::pair<std::size_t, std::size_t> support_extent_1d(const GridFunction& u) {
  std::size_t first = u.size(), last = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) {
      first = std::min(first, i);
      last = i;
    }
  if (first == u.size()) return {1, 0};
  return {first, last};
}

/// t -> u(2^levels t) on the same box, zero extension. Node images must land
/// on nodes unless `allow_resample`, in which case linear interpolation is used.
inline GridFunction dyadic_dilate(const GridFunction& u, int levels, bool allow_resample = false) {
  require(u.dim() == 1, "dimension", "dyadic dilation is one-dimensional");
  require(levels >= 0, "levels", "must be nonnegative");
  if (levels == 0) return u;
  const double lambda = std::ldexp(1.0, levels);
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double dx = u.spacing(0);
  const double lower = u.box().lower[0];

  auto [first, last] = support_extent_1d(u);
  if (first <= last) {
    double cells = static_cast<double>(last - first + 1) / lambda;
    require(cells >= 8.0, "levels", "dilated support spans fewer than 8 samples");
  }

  // node j maps to fractional index j*lambda + lower*(lambda-1)/dx
  const double offset = lower * (lambda - 1.0) / dx;
  const double offset_r = std::round(offset);
  const bool exact = std::abs(offset - offset_r) <= 1e-9 * std::max(1.0, std::abs(offset));
  require(exact || allow_resample, "resolution",
          "dilated nodes do not land on grid nodes; enable resampling");

  auto fetch = [&](std::ptrdiff_t i) { return u.at(std::span<const std::ptrdiff_t>(&i, 1)); };
  std::vector<double> w(u.size(), 0.0);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    if (exact) {
      auto i = static_cast<std::ptrdiff_t>(j * static_cast<std::ptrdiff_t>(lambda)) +
               static_cast<std::ptrdiff_t>(offset_r);
      w[static_cast<std::size_t>(j)] = fetch(i);
    } else {
      double pos = static_cast<double>(j) * lambda + offset;
      double fl = std::floor(pos);
      auto i = static_cast<std::ptrdiff_t>(fl);
      double frac = pos - fl;
      w[static_cast<std::size_t>(j)] = (1.0 - frac) * fetch(i) + frac * fetch(i + 1);
    }
  }
  return GridFunction(u.box(), u.shape(), std::move(w), Extension::zero);
}

}  // namespace mixnorm
