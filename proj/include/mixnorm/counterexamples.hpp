#pragma once

// Explicit families that separate the Moser-type inequality from the algebra
// property, and least-squares rate fits for their norm growth.

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/core/parallel.hpp"
#include "mixnorm/grid.hpp"
#include "mixnorm/profiles.hpp"
#include "mixnorm/tensor_grid.hpp"

namespace mixnorm {

enum class FamilyKind { dilated_bump, oscillatory_linear, oscillatory_smooth, tensor_pair };

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::dilated_bump: return "dilated";
    case FamilyKind::oscillatory_linear: return "oscillatory_linear";
    case FamilyKind::oscillatory_smooth: return "oscillatory_smooth";
    case FamilyKind::tensor_pair: return "tensor_pair";
  }
  return "?";
}

/// Members f_n, n = n_min..n_max, all on one 1-d grid.
struct TestFamily {
  FamilyKind kind = FamilyKind::dilated_bump;
  int n_min = 0, n_max = 0;
  double epsilon = 0.0;  // oscillatory only
  std::vector<GridFunction> members;
  std::vector<std::string> notes;  // warnings and n_max reductions

  const GridFunction& member(int n) const { return members.at(static_cast<std::size_t>(n - n_min)); }
};

/// Pairs F_n = f_n (x) g (x) ..., G_n = g (x) f_n (x) ...
struct PairFamily {
  int n_min = 0, n_max = 0;
  std::size_t d = 2;
  GridFunction companion;
  std::vector<TensorGridFunction> F, G;
  std::vector<std::string> notes;
};

/// Base bump of the dilated family: 1 on [-1, 1], supported in (-2, 2).
inline double dilation_base(double t) { return profiles::plateau_bump(t, 1.0, 2.0); }

struct GridSpec1d {
  double lower, upper;
  std::size_t n;
};

inline constexpr GridSpec1d kDilatedGrid{-4.0, 4.0, std::size_t{1} << 16};
inline constexpr GridSpec1d kOscillatoryGrid{-2.5, 2.5, std::size_t{1} << 15};

/// f_n(t) = f(2^n t) sampled on the grid.
inline TestFamily dilated_family(int n_max, int n_min = 0, GridSpec1d grid = kDilatedGrid) {
  require(n_min >= 0 && n_max >= n_min, "n_max", "need 0 <= n_min <= n_max");
  require(grid.lower < -2.0 && grid.upper > 2.0, "box", "box must contain the base support [-2, 2]");
  const double dx = (grid.upper - grid.lower) / static_cast<double>(grid.n);
  require(4.0 * std::ldexp(1.0, -n_max) / dx >= 16.0, "resolution",
          "support of the finest member spans fewer than 16 cells");
  TestFamily fam;
  fam.kind = FamilyKind::dilated_bump;
  fam.n_min = n_min;
  fam.n_max = n_max;
  fam.members.resize(static_cast<std::size_t>(n_max - n_min + 1));
  parallel_for(fam.members.size(), [&](std::size_t i) {
    const double lambda = std::ldexp(1.0, n_min + static_cast<int>(i));
    fam.members[i] = sample_1d([lambda](double t) { return dilation_base(lambda * t); }, grid.lower, grid.upper, grid.n);
  });
  return fam;
}

enum class Ramp { linear, smooth };

/// Cut-off phi_n: 0 below 1/(2n), rising on [1/(2n), 1/n], 1 on [1/n, 1],
/// falling on [1, 3/2], 0 beyond.
inline double ramp_cutoff(double t, int n, Ramp ramp) {
  const double a = 0.5 / n, b = 1.0 / n;
  if (t <= a || t >= 1.5) return 0.0;
  if (t >= b && t <= 1.0) return 1.0;
  if (t < b) {
    const double s = (t - a) / (b - a);
    return ramp == Ramp::linear ? 2.0 * n * (t - a) : profiles::smoothstep_cubic(s);
  }
  return ramp == Ramp::linear ? 2.0 * (1.5 - t) : profiles::smoothstep_cubic(2.0 * (1.5 - t));
}

/// phi_n(t) t sin(t^-eps)
inline double oscillatory_member(double t, int n, double eps, Ramp ramp) {
  const double c = ramp_cutoff(t, n, ramp);
  return c == 0.0 ? 0.0 : c * t * std::sin(std::pow(t, -eps));
}

/// Largest n whose oscillation period near t = 1/(2n) is resolved:
/// dx <= (1/(2n))^(1+eps) / 8.
inline int oscillatory_resolution_limit(double dx, double eps) {
  int n = 0;
  while (dx <= std::pow(0.5 / (n + 1), 1.0 + eps) / 8.0) ++n;
  return n;
}

inline TestFamily oscillatory_family(int n_max, double eps, Ramp ramp, int n_min = 1, double p = 2.0,
                                     GridSpec1d grid = kOscillatoryGrid) {
  require(n_min >= 1 && n_max >= n_min, "n_max", "need 1 <= n_min <= n_max");
  require(eps > 0, "epsilon", "must be positive");
  require(grid.lower < 0.0 && grid.upper >= 1.5, "box", "box must contain [0, 3/2]");
  TestFamily fam;
  fam.kind = ramp == Ramp::linear ? FamilyKind::oscillatory_linear : FamilyKind::oscillatory_smooth;
  fam.epsilon = eps;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  if (!(eps > inv_p)) fam.notes.push_back("warning: epsilon <= 1/p");
  if (std::abs(eps - (1.0 + inv_p)) < 1e-12) fam.notes.push_back("warning: epsilon = 1 + 1/p is excluded");
  const double dx = (grid.upper - grid.lower) / static_cast<double>(grid.n);
  const int limit = oscillatory_resolution_limit(dx, eps);
  if (limit < n_max) {
    fam.notes.push_back("n_max reduced from " + std::to_string(n_max) + " to " + std::to_string(limit) +
                        ": oscillations unresolved at dx = " + std::to_string(dx));
    n_max = limit;
  }
  require(n_max >= n_min, "resolution", "grid resolves no member of the family");
  fam.n_min = n_min;
  fam.n_max = n_max;
  fam.members.resize(static_cast<std::size_t>(n_max - n_min + 1));
  parallel_for(fam.members.size(), [&](std::size_t i) {
    const int n = n_min + static_cast<int>(i);
    fam.members[i] = sample_1d([&](double t) { return oscillatory_member(t, n, eps, ramp); }, grid.lower, grid.upper, grid.n);
  });
  return fam;
}

/// Companion g: 1 on [-plateau, plateau], supported in (-plateau - 1/2, plateau + 1/2).
inline GridFunction companion_bump(const GridFunction& like, double plateau) {
  const auto& b = like.box();
  return sample_1d([plateau](double t) { return profiles::plateau_bump(t, plateau, plateau + 0.5); }, b.lower[0],
                   b.upper[0], like.size(), like.extension());
}

/// F_n = f_n (x) g (x) ... (x) g and G_n = g (x) f_n (x) g ..., d in {2, 3}.
/// The companion plateau must cover the support of every f_n, so f_n g = f_n.
inline PairFamily tensor_pair_family(const TestFamily& base, std::size_t d, double companion_plateau = 2.0) {
  require(d == 2 || d == 3, "d", "tensor pairs need d in {2, 3}");
  require(!base.members.empty(), "family", "empty base family");
  PairFamily out;
  out.n_min = base.n_min;
  out.n_max = base.n_max;
  out.d = d;
  out.notes = base.notes;
  out.companion = companion_bump(base.members.front(), companion_plateau);
  const auto& g = out.companion;
  for (const auto& f : base.members) {
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] != 0.0)
        require(g[i] == 1.0, "companion_width", "companion plateau does not cover the support of f_n");
    std::vector<GridFunction> F{f, g}, G{g, f};
    if (d == 3) {
      F.push_back(g);
      G.push_back(g);
    }
    out.F.emplace_back(std::move(F));
    out.G.emplace_back(std::move(G));
  }
  return out;
}

enum class RateModel { geometric, power };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |log value - fitted line|
};

/// Least-squares slope of log2(value) against n (geometric: value ~ 2^{cn})
/// or log(value) against log(n) (power: value ~ n^c).
inline RateFit rate_fit(const std::vector<double>& n, const std::vector<double>& value, RateModel model) {
  require(n.size() == value.size(), "series", "index and value counts differ");
  require(n.size() >= 4, "series", "at least 4 points required");
  std::vector<double> x(n.size()), y(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    require(value[i] > 0 && std::isfinite(value[i]), "series", "values must be positive and finite");
    if (model == RateModel::geometric) {
      x[i] = n[i];
      y[i] = std::log2(value[i]);
    } else {
      require(n[i] > 0, "series", "power model needs positive indices");
      x[i] = std::log(n[i]);
      y[i] = std::log(value[i]);
    }
  }
  const double k = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, "series", "indices must not all coincide");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
  return fit;
}

}  // namespace mixnorm
