#pragma once

// Mixed finite differences, moduli of smoothness and the difference-based
// Besov norms of dominating mixed smoothness.
//
// Moduli replace the supremum over continuous steps by a maximum over a
// per-axis shift lattice: for every dyadic scale 2^-k * t_max the probes
// c * 2^-k * t_max, c in {1/4, 1/2, 3/4, 1}, snapped to whole cells, plus the
// largest whole-cell shift below the scale. The modulus at scale t takes the
// maximum over every lattice shift not exceeding t (snapped), which makes it
// monotone in t. Only positive steps are probed: with periodic extension, or
// zero extension with a margin of m * t_max, the L_p norm of a difference is
// invariant under h_i -> -h_i.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/core/summation.hpp"
#include "mixnorm/grid.hpp"
#include "mixnorm/tensor_grid.hpp"

namespace mixnorm {

/// Subset e of the axes {0, .., d-1}, stored as a bitmask.
struct DirectionSet {
  unsigned mask = 0;

  static DirectionSet none() { return {0}; }
  static DirectionSet all(std::size_t d) { return {(1u << d) - 1u}; }
  static DirectionSet of(std::initializer_list<std::size_t> axes) {
    DirectionSet e;
    for (auto a : axes) e.mask |= 1u << a;
    return e;
  }

  bool contains(std::size_t axis) const { return (mask >> axis) & 1u; }
  bool empty() const { return mask == 0; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask)); }
  std::vector<std::size_t> axes() const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < kMaxDim; ++a)
      if (contains(a)) out.push_back(a);
    return out;
  }
  friend bool operator==(DirectionSet, DirectionSet) = default;
};

/// Per-axis difference orders.
using MixedOrder = std::vector<int>;

inline std::vector<double> binomial_row(int m) {
  std::vector<double> c(static_cast<std::size_t>(m) + 1, 1.0);
  for (int l = 1; l <= m; ++l) c[l] = c[l - 1] * static_cast<double>(m - l + 1) / static_cast<double>(l);
  return c;
}

/// Coefficients (-1)^(m-l) C(m, l), l = 0..m.
inline std::vector<double> difference_stencil(int m) {
  auto c = binomial_row(m);
  for (int l = 0; l <= m; ++l)
    if ((m - l) % 2) c[l] = -c[l];
  return c;
}

namespace detail {

struct AxisGeometry {
  std::size_t outer, n, inner;  // flat = (o * n + j) * inner + i
};

inline AxisGeometry axis_geometry(std::span<const std::size_t> shape, std::size_t axis) {
  AxisGeometry g{1, shape[axis], 1};
  for (std::size_t a = 0; a < axis; ++a) g.outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) g.inner *= shape[a];
  return g;
}

// out = sum_l coeff[l] * in(. + l*s e_axis) under the extension rule. Rows of
// the axis are contiguous blocks of `inner` values, so every (l, segment)
// pair is a single contiguous axpy.
inline void apply_difference(std::span<const double> in, std::span<double> out,
                             std::span<const std::size_t> shape, std::size_t axis, int m,
                             std::ptrdiff_t s, Extension ext) {
  const auto g = axis_geometry(shape, axis);
  const auto n = static_cast<std::ptrdiff_t>(g.n);
  const auto coeff = difference_stencil(m);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t o = 0; o < g.outer; ++o) {
    const std::size_t base = o * g.n * g.inner;
    for (int l = 0; l <= m; ++l) {
      const double c = coeff[static_cast<std::size_t>(l)];
      const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(l) * s;
      auto axpy = [&](std::ptrdiff_t j0, std::ptrdiff_t j1, std::ptrdiff_t src0) {
        if (j1 <= j0) return;
        double* dst = out.data() + base + static_cast<std::size_t>(j0) * g.inner;
        const double* src = in.data() + base + static_cast<std::size_t>(src0) * g.inner;
        const std::size_t len = static_cast<std::size_t>(j1 - j0) * g.inner;
        for (std::size_t t = 0; t < len; ++t) dst[t] += c * src[t];
      };
      if (ext == Extension::zero) {
        // rows j with 0 <= j + off < n
        std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, -off);
        std::ptrdiff_t j1 = std::min<std::ptrdiff_t>(n, n - off);
        axpy(j0, j1, j0 + off);
      } else {
        std::ptrdiff_t r = ((off % n) + n) % n;
        axpy(0, n - r, r);
        axpy(n - r, n, 0);
      }
    }
  }
}

// Value of a grid buffer at idx + delta under the extension rule.
inline double fetch_shifted(const GridFunction& u, std::span<const double> buf, std::size_t flat,
                            std::span<const std::ptrdiff_t> delta) {
  auto idx = u.unflatten(flat);
  std::size_t out = 0;
  for (std::size_t a = 0; a < u.dim(); ++a) {
    auto n = static_cast<std::ptrdiff_t>(u.shape()[a]);
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(idx[a]) + delta[a];
    if (j < 0 || j >= n) {
      if (u.extension() == Extension::zero) return 0.0;
      j = ((j % n) + n) % n;
    }
    out += static_cast<std::size_t>(j) * u.stride(a);
  }
  return buf[out];
}

inline std::ptrdiff_t snap_to_cells(double h, double dx) {
  return static_cast<std::ptrdiff_t>(std::llround(h / dx));
}

}  // namespace detail

/// Difference together with the whole-cell steps actually used.
struct DifferenceResult {
  GridFunction function;
  std::vector<std::ptrdiff_t> cells;  // per axis, 0 off the direction set
  bool degenerate = false;            // some step snapped to zero cells
};

/// sum_{l=0}^{m} (-1)^(m-l) C(m,l) u(x + l h e_axis), h snapped to whole cells.
inline DifferenceResult directional_difference(const GridFunction& u, std::size_t axis, int m, double h) {
  require(axis < u.dim(), "axis", "out of range");
  require(m >= 1, "m", "difference order must be at least 1");
  DifferenceResult r;
  r.cells.assign(u.dim(), 0);
  const auto s = detail::snap_to_cells(h, u.spacing(axis));
  r.cells[axis] = s;
  if (s == 0) {
    r.degenerate = true;
    r.function = GridFunction::zeros(u.box(), u.shape(), u.extension());
    return r;
  }
  std::vector<double> out(u.size());
  detail::apply_difference(u.values(), out, u.shape(), axis, m, s, u.extension());
  r.function = u.with_values(std::move(out));
  return r;
}

/// Product of directional differences over the axes in e, applied in
/// ascending axis order so the result does not depend on how e was listed.
/// Orders of zero are allowed and act as the identity.
inline DifferenceResult mixed_difference(const GridFunction& u, DirectionSet e, const MixedOrder& m,
                                         std::span<const double> h) {
  require(m.size() == u.dim() && h.size() == u.dim(), "m", "one order and one step per axis required");
  DifferenceResult r;
  r.cells.assign(u.dim(), 0);
  std::vector<double> cur(u.values().begin(), u.values().end());
  std::vector<double> next(u.size());
  for (std::size_t a = 0; a < u.dim(); ++a) {
    if (!e.contains(a)) continue;
    require(m[a] >= 0, "m", "difference orders must be nonnegative");
    if (m[a] == 0) continue;
    const auto s = detail::snap_to_cells(h[a], u.spacing(a));
    r.cells[a] = s;
    if (s == 0) {
      r.degenerate = true;
      std::fill(cur.begin(), cur.end(), 0.0);
      continue;
    }
    detail::apply_difference(cur, next, u.shape(), a, m[a], s, u.extension());
    cur.swap(next);
  }
  r.function = u.with_values(std::move(cur));
  return r;
}

// ---------------------------------------------------------------------------
// Shift lattice and difference-norm tables

/// Whole-cell probe shifts for one axis.
class ShiftLattice {
public:
  ShiftLattice() = default;

  ShiftLattice(double dx, double t_max) : dx_(dx), t_max_(t_max) {
    require(dx > 0 && t_max > 0, "t_max", "scales must be positive");
    k_max_ = static_cast<int>(std::floor(std::log2(t_max / dx))) - 1;
    for (int k = 0;; ++k) {
      const double scale = std::ldexp(t_max, -k);
      if (scale < dx) break;
      for (double c : {0.25, 0.5, 0.75, 1.0}) add(detail::snap_to_cells(c * scale, dx));
      add(static_cast<std::ptrdiff_t>(std::ceil(scale / dx - 1e-9)) - 1);
    }
    std::sort(shifts_.begin(), shifts_.end());
    shifts_.erase(std::unique(shifts_.begin(), shifts_.end()), shifts_.end());
  }

  double spacing() const { return dx_; }
  double t_max() const { return t_max_; }
  /// floor(log2(t_max/dx)) - 1: the finest dyadic level, spanning >= 2 cells.
  int k_max() const { return k_max_; }
  const std::vector<std::ptrdiff_t>& shifts() const { return shifts_; }

  /// Number of leading lattice shifts admissible at scale t (s <= round(t/dx)).
  std::size_t admissible(double t) const {
    const auto limit = detail::snap_to_cells(t, dx_);
    return static_cast<std::size_t>(std::upper_bound(shifts_.begin(), shifts_.end(), limit) - shifts_.begin());
  }

  std::size_t index_of(std::ptrdiff_t s) const {
    auto it = std::lower_bound(shifts_.begin(), shifts_.end(), s);
    require(it != shifts_.end() && *it == s, "shift", "not a lattice shift");
    return static_cast<std::size_t>(it - shifts_.begin());
  }

  double scale(int k) const { return std::ldexp(t_max_, -k); }

private:
  void add(std::ptrdiff_t s) {
    if (s >= 1 && static_cast<double>(s) * dx_ <= t_max_ * (1 + 1e-12)) shifts_.push_back(s);
  }

  double dx_ = 1.0, t_max_ = 1.0;
  int k_max_ = 0;
  std::vector<std::ptrdiff_t> shifts_;
};

/// Which nodes enter the L_p sums of differences.
enum class NodeRegion {
  all,       ///< every node of the box
  interior,  ///< nodes whose whole stencil lies inside the box
};

/// ||Delta_s^{m,e} u||_p for every combination of lattice shifts on the axes
/// of e, plus its running maximum (the modulus) over lattice prefixes.
class DifferenceTable {
public:
  DifferenceTable(const GridFunction& u, DirectionSet e, const MixedOrder& m, double p,
                  std::span<const ShiftLattice> lattices, NodeRegion region = NodeRegion::all)
      : axes_(e.axes()), p_(p) {
    require_exponent(p);
    require(!e.empty(), "e", "direction set must be nonempty");
    require(m.size() == u.dim() && lattices.size() == u.dim(), "m", "one order and lattice per axis required");
    for (auto a : axes_) {
      require(a < u.dim(), "e", "axis out of range");
      require(m[a] >= 1, "m", "orders on e must be at least 1");
      lattices_.push_back(lattices[a]);
      dims_.push_back(lattices[a].shifts().size());
    }
    std::size_t total = 1;
    for (auto n : dims_) total *= n;
    norms_.assign(total, 0.0);
    if (total == 0) return;

    // one scratch buffer per nesting depth
    std::vector<std::vector<double>> bufs(axes_.size() + 1, std::vector<double>(u.size()));
    std::copy(u.values().begin(), u.values().end(), bufs[0].begin());
    std::vector<std::ptrdiff_t> cells(u.dim(), 0);
    const double vol = u.cell_volume();

    auto leaf = [&](std::span<const double> buf) {
      double s;
      if (detail::is_inf_exponent(p)) {
        s = region == NodeRegion::all ? detail::max_abs(buf) : region_reduce(u, buf, m, cells, p);
        return s;
      }
      s = region == NodeRegion::all ? detail::sum_abs_pow(buf, p) : region_reduce(u, buf, m, cells, p);
      s *= vol;
      return p == 1.0 ? s : p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
    };

    auto recurse = [&](auto&& self, std::size_t depth, std::size_t flat) -> void {
      const std::size_t a = axes_[depth];
      const auto& lat = lattices_[depth];
      for (std::size_t i = 0; i < dims_[depth]; ++i) {
        const auto s = lat.shifts()[i];
        cells[a] = s;
        detail::apply_difference(bufs[depth], bufs[depth + 1], u.shape(), a, m[a], s, u.extension());
        const std::size_t f = flat * dims_[depth] + i;
        if (depth + 1 == axes_.size())
          norms_[f] = leaf(bufs[depth + 1]);
        else
          self(self, depth + 1, f);
      }
      cells[a] = 0;
    };
    recurse(recurse, 0, 0);

    // running maximum over prefixes: cummax along each table axis in turn
    running_max_ = norms_;
    std::size_t inner = 1;
    for (std::size_t t = axes_.size(); t-- > 0;) {
      const std::size_t n = dims_[t];
      const std::size_t outer = total / (n * inner);
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t j = 1; j < n; ++j)
          for (std::size_t i = 0; i < inner; ++i) {
            auto& cur = running_max_[(o * n + j) * inner + i];
            cur = std::max(cur, running_max_[(o * n + j - 1) * inner + i]);
          }
      inner *= n;
    }
  }

  const std::vector<std::size_t>& axes() const { return axes_; }
  const ShiftLattice& lattice(std::size_t slot) const { return lattices_[slot]; }

  /// Norm of the difference for lattice indices (one per axis of e).
  double norm(std::span<const std::size_t> index) const { return norms_[flatten(index)]; }

  /// Maximum over all lattice shifts admissible at scales t (one per axis of
  /// e). Returns {0, true} when some scale admits no shift.
  std::pair<double, bool> modulus(std::span<const double> t) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t s = 0; s < axes_.size(); ++s) {
      auto n = lattices_[s].admissible(t[s]);
      if (n == 0) return {0.0, true};
      idx[s] = n - 1;
    }
    return {running_max_[flatten(std::span<const std::size_t>(idx.data(), axes_.size()))], false};
  }

private:
  std::size_t flatten(std::span<const std::size_t> index) const {
    std::size_t f = 0;
    for (std::size_t s = 0; s < axes_.size(); ++s) f = f * dims_[s] + index[s];
    return f;
  }

  static double region_reduce(const GridFunction& u, std::span<const double> buf, const MixedOrder& m,
                              std::span<const std::ptrdiff_t> cells, double p) {
    std::array<std::size_t, kMaxDim> hi{};
    std::size_t count = 1;
    for (std::size_t a = 0; a < u.dim(); ++a) {
      auto reach = static_cast<std::ptrdiff_t>(cells[a] == 0 ? 0 : m[a]) * cells[a];
      auto n = static_cast<std::ptrdiff_t>(u.shape()[a]);
      hi[a] = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, n - reach));
      count *= hi[a];
    }
    auto flat_of = [&](std::size_t k) {
      std::size_t f = 0;
      for (std::size_t a = u.dim(); a-- > 0;) {
        f += (k % hi[a]) * u.stride(a);
        k /= hi[a];
      }
      return f;
    };
    if (detail::is_inf_exponent(p)) {
      double mx = 0.0;
      for (std::size_t k = 0; k < count; ++k) mx = std::max(mx, std::abs(buf[flat_of(k)]));
      return mx;
    }
    return detail::pairwise_sum(count, [&](std::size_t k) { return std::pow(std::abs(buf[flat_of(k)]), p); });
  }

  std::vector<std::size_t> axes_;
  std::vector<ShiftLattice> lattices_;
  std::vector<std::size_t> dims_;
  std::vector<double> norms_, running_max_;
  double p_;
};

/// Options shared by the difference-based norms.
struct DifferenceOptions {
  double t_max = 1.0;                 ///< largest scale (t in [0, t_max]^d)
  NodeRegion region = NodeRegion::all;
};

inline std::vector<ShiftLattice> make_lattices(const GridFunction& u, double t_max) {
  std::vector<ShiftLattice> out;
  for (std::size_t a = 0; a < u.dim(); ++a) out.emplace_back(u.spacing(a), t_max);
  return out;
}

struct ModulusResult {
  double value = 0.0;
  bool degenerate = false;
};

/// omega_m^e(u, t)_p. For e empty this is ||u||_p.
inline ModulusResult modulus(const GridFunction& u, DirectionSet e, const MixedOrder& m,
                             std::span<const double> t, double p, const DifferenceOptions& opt = {}) {
  require_exponent(p);
  require(t.size() == u.dim(), "t", "one scale per axis required");
  if (e.empty()) return {lp_norm(u, p), false};
  for (auto a : e.axes()) require(t[a] > 0 && t[a] <= opt.t_max * (1 + 1e-12), "t", "scales must lie in (0, t_max]");
  auto lat = make_lattices(u, opt.t_max);
  DifferenceTable table(u, e, m, p, lat, opt.region);
  std::array<double, kMaxDim> te{};
  auto axes = e.axes();
  for (std::size_t s = 0; s < axes.size(); ++s) te[s] = t[axes[s]];
  auto [v, deg] = table.modulus(std::span<const double>(te.data(), axes.size()));
  return {v, deg};
}

/// Per-direction-set contributions of a Besov norm.
struct BesovBreakdown {
  double total = 0.0;
  std::vector<double> terms;  // indexed by DirectionSet::mask
};

namespace detail {

inline void validate_besov(const GridFunction& u, double r, double p, int m_diff, double t_max) {
  require(r > 0, "r", "smoothness must be positive");
  require_exponent(p);
  require(static_cast<double>(m_diff) > r, "m_diff", "difference order must exceed r");
  for (std::size_t a = 0; a < u.dim(); ++a)
    require(ShiftLattice(u.spacing(a), t_max).k_max() >= 1, "resolution",
            "grid too coarse: fewer than two dyadic levels on axis " + std::to_string(a));
}

inline double finish_lp(double sum, double p) {
  if (is_inf_exponent(p)) return sum;
  return p == 1.0 ? sum : p == 2.0 ? std::sqrt(sum) : std::pow(sum, 1.0 / p);
}

// Iterates k over [0, k_max_1] x ... for the axes of a table.
template <class Body>
void for_each_level(const DifferenceTable& table, Body&& body) {
  const std::size_t q = table.axes().size();
  std::array<int, kMaxDim> k{};
  std::array<int, kMaxDim> kmax{};
  for (std::size_t s = 0; s < q; ++s) kmax[s] = table.lattice(s).k_max();
  while (true) {
    body(std::span<const int>(k.data(), q));
    std::size_t s = q;
    while (s > 0) {
      --s;
      if (++k[s] <= kmax[s]) break;
      k[s] = 0;
      if (s == 0) return;
    }
    if (q == 0) return;
  }
}

inline double besov_e_term(const DifferenceTable& table, double r, double p) {
  const bool inf = is_inf_exponent(p);
  const std::size_t q = table.axes().size();
  double acc = 0.0;
  for_each_level(table, [&](std::span<const int> k) {
    std::array<double, kMaxDim> t{};
    int k1 = 0;
    for (std::size_t s = 0; s < q; ++s) {
      t[s] = table.lattice(s).scale(k[s]);
      k1 += k[s];
    }
    double w = table.modulus(std::span<const double>(t.data(), q)).first;
    if (inf)
      acc = std::max(acc, std::exp2(r * k1) * w);
    else
      acc += std::exp2(r * k1 * p) * std::pow(w, p);
  });
  return finish_lp(acc, p);
}

inline double integral_e_term(const DifferenceTable& table, double r, double p) {
  const bool inf = is_inf_exponent(p);
  const std::size_t q = table.axes().size();
  double acc = 0.0;
  for_each_level(table, [&](std::span<const int> k) {
    std::array<std::size_t, kMaxDim> idx{};
    double weight = 1.0;
    for (std::size_t s = 0; s < q; ++s) {
      const auto& lat = table.lattice(s);
      const double width = 0.5 * lat.scale(k[s]);
      const double mid = 0.75 * lat.scale(k[s]);
      idx[s] = lat.index_of(detail::snap_to_cells(mid, lat.spacing()));
      // panel of |h| in [2^-k-1, 2^-k] for both signs of h
      weight *= inf ? std::pow(mid, -r) : 2.0 * width * std::pow(mid, -r * p - 1.0);
    }
    double v = table.norm(std::span<const std::size_t>(idx.data(), q));
    if (inf)
      acc = std::max(acc, weight * v);
    else
      acc += weight * std::pow(v, p);
  });
  return finish_lp(acc, p);
}

template <class Term>
BesovBreakdown assemble_besov(const GridFunction& u, double p, int m_diff, const DifferenceOptions& opt,
                              Term&& e_term) {
  const std::size_t d = u.dim();
  BesovBreakdown out;
  out.terms.assign(std::size_t{1} << d, 0.0);
  auto lat = make_lattices(u, opt.t_max);
  MixedOrder m(d, m_diff);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    double term;
    if (mask == 0) {
      term = lp_norm(u, p);
    } else {
      DifferenceTable table(u, DirectionSet{mask}, m, p, lat, opt.region);
      term = e_term(table);
    }
    out.terms[mask] = term;
    out.total += term;
  }
  return out;
}

}  // namespace detail

/// sum_e ( sum_{k in N_0^d(e), k <= K_max} 2^{r|k|_1 p} omega^e_{m_diff}(u, 2^-k)_p^p )^{1/p},
/// with maxima in place of the l_p sums when p = inf.
inline BesovBreakdown besov_breakdown_diff(const GridFunction& u, double r, double p, int m_diff,
                                           const DifferenceOptions& opt = {}) {
  detail::validate_besov(u, r, p, m_diff, opt.t_max);
  return detail::assemble_besov(u, p, m_diff, opt,
                                [&](const DifferenceTable& t) { return detail::besov_e_term(t, r, p); });
}

inline double besov_norm_diff(const GridFunction& u, double r, double p, int m_diff,
                              const DifferenceOptions& opt = {}) {
  return besov_breakdown_diff(u, r, p, m_diff, opt).total;
}

/// One-dimensional Besov norm ||u||_p + (sum_j (2^{jr} omega_m(u, 2^-j))^p)^{1/p}.
inline double isotropic_besov_norm(const GridFunction& u, double r, double p, int m_diff,
                                   const DifferenceOptions& opt = {}) {
  require(u.dim() == 1, "dimension", "isotropic Besov norm takes a 1-d function");
  return besov_norm_diff(u, r, p, m_diff, opt);
}

/// ||u||_p + sum_{e != 0} T_e where T_e integrates |h|^{-rp} ||Delta_h^{m,e} u||_p^p dh/|h|
/// over [-1, 1]^|e| with a midpoint rule on the dyadic panels [2^-k-1, 2^-k].
inline BesovBreakdown besov_breakdown_integral(const GridFunction& u, double r, double p, int m_diff,
                                               const DifferenceOptions& opt = {}) {
  detail::validate_besov(u, r, p, m_diff, opt.t_max);
  return detail::assemble_besov(u, p, m_diff, opt,
                                [&](const DifferenceTable& t) { return detail::integral_e_term(t, r, p); });
}

inline double besov_norm_integral(const GridFunction& u, double r, double p, int m_diff,
                                  const DifferenceOptions& opt = {}) {
  return besov_breakdown_integral(u, r, p, m_diff, opt).total;
}

/// Both difference characterisations from one pass over the shift tables.
inline std::pair<double, double> besov_norms_diff_and_integral(const GridFunction& u, double r, double p,
                                                               int m_diff, const DifferenceOptions& opt = {}) {
  detail::validate_besov(u, r, p, m_diff, opt.t_max);
  const std::size_t d = u.dim();
  auto lat = make_lattices(u, opt.t_max);
  MixedOrder m(d, m_diff);
  double diff = lp_norm(u, p), integral = diff;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    DifferenceTable table(u, DirectionSet{mask}, m, p, lat, opt.region);
    diff += detail::besov_e_term(table, r, p);
    integral += detail::integral_e_term(table, r, p);
  }
  return {diff, integral};
}

// Cross-norm forms on factored inputs.
inline double besov_norm_diff(const TensorGridFunction& u, double r, double p, int m_diff,
                              const DifferenceOptions& opt = {}) {
  return cross_norm(u, [&](const GridFunction& f) { return besov_norm_diff(f, r, p, m_diff, opt); });
}

inline double besov_norm_integral(const TensorGridFunction& u, double r, double p, int m_diff,
                                  const DifferenceOptions& opt = {}) {
  return cross_norm(u, [&](const GridFunction& f) { return besov_norm_integral(f, r, p, m_diff, opt); });
}

// ---------------------------------------------------------------------------
// Leibniz rules for differences of products

/// sum_{j=0}^{m} C(m,j) Delta_h^{m-j} psi(. + j h) Delta_h^j phi(.) along one axis;
/// equals the m-th difference of psi*phi.
inline GridFunction leibniz_difference(const GridFunction& psi, const GridFunction& phi, int m, double h,
                                       std::size_t axis) {
  require_same_grid(psi, phi);
  require(axis < psi.dim(), "axis", "out of range");
  require(m >= 1, "m", "difference order must be at least 1");
  const auto s = detail::snap_to_cells(h, psi.spacing(axis));
  const auto binom = binomial_row(m);
  std::vector<double> out(psi.size(), 0.0);
  std::vector<double> dpsi(psi.size()), dphi(psi.size());
  std::vector<std::ptrdiff_t> delta(psi.dim(), 0);
  for (int j = 0; j <= m; ++j) {
    if (m - j == 0)
      std::copy(psi.values().begin(), psi.values().end(), dpsi.begin());
    else
      detail::apply_difference(psi.values(), dpsi, psi.shape(), axis, m - j, s, psi.extension());
    if (j == 0)
      std::copy(phi.values().begin(), phi.values().end(), dphi.begin());
    else
      detail::apply_difference(phi.values(), dphi, phi.shape(), axis, j, s, phi.extension());
    delta[axis] = static_cast<std::ptrdiff_t>(j) * s;
    for (std::size_t x = 0; x < out.size(); ++x)
      out[x] += binom[static_cast<std::size_t>(j)] * detail::fetch_shifted(psi, dpsi, x, delta) * dphi[x];
  }
  return psi.with_values(std::move(out));
}

struct LeibnizTerm {
  std::vector<int> u;  // multi-index, zero off e
  GridFunction term;
};

/// Terms C(2m,u) Delta_h^{2m-u,e} f(. + u<>h) Delta_h^{u,e} g(.) for every
/// u in N_0^d(e) with |u|_inf <= 2m. Their sum is Delta_h^{2m,e}(f g).
inline std::vector<LeibnizTerm> mixed_leibniz_terms(const GridFunction& f, const GridFunction& g, DirectionSet e,
                                                     int m, std::span<const double> h) {
  require_same_grid(f, g);
  require(m >= 1, "m", "difference order must be at least 1");
  require(h.size() == f.dim(), "h", "one step per axis required");
  const std::size_t d = f.dim();
  const auto axes = e.axes();
  for (auto a : axes) require(a < d, "e", "axis out of range");
  const auto binom = binomial_row(2 * m);
  std::vector<std::ptrdiff_t> cells(d, 0);
  for (auto a : axes) cells[a] = detail::snap_to_cells(h[a], f.spacing(a));

  std::vector<LeibnizTerm> out;
  std::vector<int> u(d, 0);
  auto emit = [&] {
    MixedOrder mf(d, 0), mg(d, 0);
    std::vector<std::ptrdiff_t> delta(d, 0);
    std::vector<double> hv(h.begin(), h.end());
    double c = 1.0;
    for (auto a : axes) {
      mf[a] = 2 * m - u[a];
      mg[a] = u[a];
      delta[a] = static_cast<std::ptrdiff_t>(u[a]) * cells[a];
      c *= binom[static_cast<std::size_t>(u[a])];
    }
    auto df = mixed_difference(f, e, mf, hv).function;
    auto dg = mixed_difference(g, e, mg, hv).function;
    std::vector<double> t(f.size());
    for (std::size_t x = 0; x < t.size(); ++x) t[x] = c * detail::fetch_shifted(f, df.values(), x, delta) * dg[x];
    out.push_back({u, f.with_values(std::move(t))});
  };
  // odometer over u_a in [0, 2m] for a in e
  while (true) {
    emit();
    std::size_t s = axes.size();
    bool done = true;
    while (s > 0) {
      --s;
      if (++u[axes[s]] <= 2 * m) {
        done = false;
        break;
      }
      u[axes[s]] = 0;
    }
    if (done) break;
  }
  return out;
}

}  // namespace mixnorm
