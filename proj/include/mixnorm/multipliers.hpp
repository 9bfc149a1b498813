#pragma once

// Partitions of unity on a lattice, uniform (localised) norms and the ratio
// experiments for pointwise multiplication.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/core/parallel.hpp"
#include "mixnorm/grid.hpp"
#include "mixnorm/profiles.hpp"
#include "mixnorm/spaces.hpp"
#include "mixnorm/tensor_grid.hpp"

namespace mixnorm {

/// psi_mu(x) = prod_a psi(x_a - mu_a w) on a lattice of spacing w, anchored
/// at the lower box corner. psi is the bump exp(-1/(1-(t/w)^2)) divided by its
/// periodised translate sum, so each node sees two translates per axis.
/// Profiles are tabulated by cell offset, which makes every psi_mu an exact
/// whole-cell shift of psi_0.
class PartitionOfUnity {
public:
  PartitionOfUnity() = default;

  PartitionOfUnity(double width, Box box, std::vector<std::size_t> shape, Extension ext)
      : width_(width), box_(std::move(box)), shape_(std::move(shape)), ext_(ext) {
    require(width > 0, "width", "lattice spacing must be positive");
    require(shape_.size() == box_.dim(), "resolution", "one sample count per axis required");
    for (std::size_t a = 0; a < shape_.size(); ++a) {
      const double dx = box_.length(a) / static_cast<double>(shape_[a]);
      const double cells = width / dx;
      const auto W = static_cast<std::ptrdiff_t>(std::llround(cells));
      require(W >= 2 && std::abs(cells - static_cast<double>(W)) <= 1e-9 * cells, "width",
              "lattice spacing must be a whole number (>= 2) of cells on axis " + std::to_string(a));
      const auto n = static_cast<std::ptrdiff_t>(shape_[a]);
      if (ext_ == Extension::periodic)
        require(n % W == 0 && n / W >= 2, "width",
                "lattice spacing must divide the period at least twice on axis " + std::to_string(a));
      cells_.push_back(W);
      // translate counts: periodic wraps, zero keeps every center within reach of a node
      counts_.push_back(ext_ == Extension::periodic ? n / W : (n - 1) / W + 2);
    }
    // one profile table per distinct cell width
    for (auto W : cells_) profiles_.push_back(profile(W));
  }

  double width() const { return width_; }
  std::size_t dim() const { return shape_.size(); }
  std::ptrdiff_t cells(std::size_t axis) const { return cells_[axis]; }

  /// Number of active translates; mu is enumerated with the last axis fastest.
  std::size_t count() const {
    std::size_t c = 1;
    for (auto n : counts_) c *= static_cast<std::size_t>(n);
    return c;
  }
  std::vector<std::ptrdiff_t> index(std::size_t flat) const {
    std::vector<std::ptrdiff_t> mu(dim());
    for (std::size_t a = dim(); a-- > 0;) {
      const auto n = static_cast<std::size_t>(counts_[a]);
      mu[a] = static_cast<std::ptrdiff_t>(flat % n);
      flat /= n;
    }
    return mu;
  }

  /// 1-d factor of psi_mu along one axis at node j.
  double factor(std::size_t axis, std::ptrdiff_t mu, std::ptrdiff_t j) const {
    const auto W = cells_[axis];
    const auto n = static_cast<std::ptrdiff_t>(shape_[axis]);
    std::ptrdiff_t o = j - mu * W;
    if (ext_ == Extension::periodic) {
      o = ((o % n) + n) % n;
      if (o >= n - n / 2) o -= n;
    }
    if (o <= -W || o >= W) return 0.0;
    return profiles_[axis][static_cast<std::size_t>(o + W)];
  }

  /// psi_mu sampled on the grid.
  GridFunction member(std::span<const std::ptrdiff_t> mu) const {
    auto g = GridFunction::zeros(box_, shape_, ext_);
    std::vector<std::vector<double>> f(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
      f[a].resize(shape_[a]);
      for (std::size_t j = 0; j < shape_[a]; ++j) f[a][j] = factor(a, mu[a], static_cast<std::ptrdiff_t>(j));
    }
    std::vector<double> v(g.size());
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
      auto idx = g.unflatten(flat);
      double w = 1.0;
      for (std::size_t a = 0; a < dim(); ++a) w *= f[a][idx[a]];
      v[flat] = w;
    }
    return g.with_values(std::move(v));
  }

  GridFunction member(std::size_t flat) const {
    auto mu = index(flat);
    return member(mu);
  }

private:
  // psi at cell offsets -W..W (index o + W)
  static std::vector<double> profile(std::ptrdiff_t W) {
    auto raw = [W](std::ptrdiff_t o) { return profiles::mollifier(static_cast<double>(o) / static_cast<double>(W)); };
    std::vector<double> sum(static_cast<std::size_t>(W));  // by residue o mod W
    for (std::ptrdiff_t r = 0; r < W; ++r) sum[static_cast<std::size_t>(r)] = raw(r) + raw(r - W);
    std::vector<double> out(static_cast<std::size_t>(2 * W + 1), 0.0);
    for (std::ptrdiff_t o = -W + 1; o < W; ++o) {
      const std::ptrdiff_t r = ((o % W) + W) % W;
      const double s = sum[static_cast<std::size_t>(r)];
      if (!(s > 0.0)) throw NumericalAnomaly("partition translate sum vanishes");
      out[static_cast<std::size_t>(o + W)] = raw(o) / s;
    }
    return out;
  }

  double width_ = 1.0;
  Box box_;
  std::vector<std::size_t> shape_;
  Extension ext_ = Extension::zero;
  std::vector<std::ptrdiff_t> cells_, counts_;
  std::vector<std::vector<double>> profiles_;
};

inline PartitionOfUnity build_partition(double width, const Box& box, const std::vector<std::size_t>& shape,
                                        Extension ext = Extension::zero) {
  return PartitionOfUnity(width, box, shape, ext);
}

inline PartitionOfUnity build_partition(double width, const GridFunction& u) {
  return PartitionOfUnity(width, u.box(), u.shape(), u.extension());
}

/// Norms ||psi_mu u||_X for every active translate, in translate order.
inline std::vector<double> localized_norms(const GridFunction& u, const SpaceSpec& space,
                                           const PartitionOfUnity& pou) {
  std::vector<double> out(pou.count());
  parallel_for(out.size(), [&](std::size_t i) {
    auto piece = pointwise_multiply(pou.member(i), u);
    out[i] = std::all_of(piece.values().begin(), piece.values().end(), [](double v) { return v == 0.0; })
                 ? 0.0
                 : space_norm(piece, space);
  });
  return out;
}

/// sup_mu ||psi_mu u||_X
inline double uniform_norm(const GridFunction& u, const SpaceSpec& space, const PartitionOfUnity& pou) {
  auto n = localized_norms(u, space, pou);
  return n.empty() ? 0.0 : *std::max_element(n.begin(), n.end());
}

/// ||u||_B / (sum_mu ||psi_mu u||_B^p)^{1/p} in the difference-based Besov norm.
inline double localization_ratio(const GridFunction& u, double r, double p, int m_diff,
                                 const PartitionOfUnity& pou, const DifferenceOptions& opt = {}) {
  auto space = SpaceSpec::besov(r, p, m_diff);
  space.diff = opt;
  const double whole = space_norm(u, space);
  require(whole > 0.0, "u", "zero function has no localization ratio");
  auto n = localized_norms(u, space, pou);
  double agg;
  if (detail::is_inf_exponent(p)) {
    agg = *std::max_element(n.begin(), n.end());
  } else {
    for (auto& v : n) v = std::pow(v, p);
    agg = detail::finish_lp(detail::pairwise_sum(n), p);
  }
  return whole / agg;
}

namespace detail {

template <class F>
double algebra_ratio_impl(const F& f, const F& g, const SpaceSpec& s) {
  const double nf = space_norm(f, s), ng = space_norm(g, s);
  require(nf > 0.0 && ng > 0.0, "u", "algebra ratio needs nonzero norms");
  return space_norm(f * g, s) / (nf * ng);
}

template <class F>
double moser_ratio_impl(const F& f, const F& g, const SpaceSpec& s) {
  const double nf = space_norm(f, s), ng = space_norm(g, s);
  const double sf = sup_norm(f), sg = sup_norm(g);
  const double denom = nf * sg + sf * ng;
  require(denom > 0.0, "u", "Moser ratio has a zero denominator");
  return space_norm(f * g, s) / denom;
}

}  // namespace detail

/// ||f g||_X / (||f||_X ||g||_X)
inline double algebra_ratio(const GridFunction& f, const GridFunction& g, const SpaceSpec& s) {
  return detail::algebra_ratio_impl(f, g, s);
}
inline double algebra_ratio(const TensorGridFunction& f, const TensorGridFunction& g, const SpaceSpec& s) {
  return detail::algebra_ratio_impl(f, g, s);
}

/// ||f g||_X / (||f||_X ||g||_inf + ||f||_inf ||g||_X)
inline double moser_ratio(const GridFunction& f, const GridFunction& g, const SpaceSpec& s) {
  return detail::moser_ratio_impl(f, g, s);
}
inline double moser_ratio(const TensorGridFunction& f, const TensorGridFunction& g, const SpaceSpec& s) {
  return detail::moser_ratio_impl(f, g, s);
}

}  // namespace mixnorm
