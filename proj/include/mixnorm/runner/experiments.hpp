#pragma once

// Experiment drivers: each turns a validated configuration into a table whose
// rows carry the full parameter snapshot followed by experiment columns.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mixnorm/counterexamples.hpp"
#include "mixnorm/differences.hpp"
#include "mixnorm/fourier.hpp"
#include "mixnorm/multipliers.hpp"
#include "mixnorm/random_family.hpp"
#include "mixnorm/runner/config.hpp"
#include "mixnorm/runner/table.hpp"
#include "mixnorm/sobolev.hpp"
#include "mixnorm/spaces.hpp"

namespace mixnorm::runner {

/// Experiment-specific columns, after the parameter snapshot.
inline std::vector<std::string> result_columns(Experiment e) {
  switch (e) {
    case Experiment::norm:
      return {"member", "n", "lp", "sup", "besov_diff", "besov_integral", "besov_fourier", "sobolev_full",
              "sobolev_reduced", "cmix"};
    case Experiment::equiv:
      return {"member", "besov_diff", "besov_fourier", "besov_integral", "sobolev_full", "sobolev_reduced",
              "ratio_diff_fourier", "ratio_diff_integral", "ratio_full_reduced"};
    case Experiment::algebra:
    case Experiment::moser:
      return {"member", "n", "norm_f", "norm_g", "norm_fg", "sup_f", "sup_g", "ratio", "fit_slope", "fit_residual"};
    case Experiment::localize: return {"member", "space_norm", "uniform_norm", "local_aggregate", "ratio"};
    case Experiment::nikolskij: return {"member", "kmax_band", "b", "ratio"};
    case Experiment::peetre: return {"member", "kmax_band", "b", "peetre_ratio", "h", "difference_ratio"};
    case Experiment::trace: return {"member", "mixed_sup_lp", "sobolev_full", "ratio"};
    case Experiment::embed: return {"n", "sup", "space_norm", "ratio", "fit_slope", "fit_residual"};
    case Experiment::report: return {"quantity", "model", "predicted", "fitted", "residual"};
  }
  return {};
}

/// Column documentation for --describe.
inline std::string describe_columns() {
  std::string out = "Every row starts with the resolved configuration keys:\n ";
  for (const auto& [k, v] : config_keys())
    if (k != "output" && k != "format") out += " " + k;
  out += "\n\nExperiment columns:\n";
  for (const auto& [name, e] : experiment_names()) {
    out += "  " + name + ":";
    for (const auto& c : result_columns(e)) out += " " + c;
    out += "\n";
  }
  return out;
}

namespace detail {

inline double inverse_exponent(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

inline SpaceSpec space_of(const ExperimentConfig& c) {
  SpaceSpec s = c.space == "besov"     ? SpaceSpec::besov(c.r, c.p, c.m_diff)
                : c.space == "sobolev" ? SpaceSpec::sobolev(c.m, c.p)
                                       : SpaceSpec::cmix(c.m);
  s.realization = c.realization == "spectral" ? Realization::spectral : Realization::central_difference;
  s.diff.t_max = c.t_max;
  return s;
}

inline Box config_box(const ExperimentConfig& c) { return Box::cube(c.d, c.box_lower, c.box_upper); }
inline std::vector<std::size_t> config_shape(const ExperimentConfig& c) {
  return std::vector<std::size_t>(c.d, c.resolution);
}

inline std::vector<GridFunction> random_members(const ExperimentConfig& c, int kmax, std::size_t count) {
  return random_family(c.seed, count, std::vector<int>(c.d, kmax), config_box(c), config_shape(c), c.extension);
}

/// Tensor power of the dilation base bump, shrunk to fit the configured box.
inline GridFunction bump_member(const ExperimentConfig& c) {
  const double mid = 0.5 * (c.box_lower + c.box_upper), scale = 8.0 / (c.box_upper - c.box_lower);
  return sample(
      [&](std::span<const double> x) {
        double v = 1.0;
        for (double t : x) v *= dilation_base(scale * (t - mid));
        return v;
      },
      config_box(c), config_shape(c), c.extension);
}

inline TestFamily line_family(const ExperimentConfig& c) {
  if (c.family == "dilated")
    return dilated_family(c.n_max, c.n_min, {kDilatedGrid.lower, kDilatedGrid.upper, c.resolution});
  return oscillatory_family(c.n_max, c.epsilon, c.ramp == "linear" ? Ramp::linear : Ramp::smooth, c.n_min, c.p,
                            {kOscillatoryGrid.lower, kOscillatoryGrid.upper, c.resolution});
}

struct Members {
  std::vector<GridFunction> functions;
  std::vector<long long> index;  // family index n, or member id
  std::vector<std::string> notes;
};

inline Members members_of(const ExperimentConfig& c) {
  Members m;
  if (c.family == "random") {
    m.functions = random_members(c, c.kmax, c.count);
  } else if (c.family == "zero") {
    m.functions.push_back(GridFunction::zeros(config_box(c), config_shape(c), c.extension));
  } else if (c.family == "bump") {
    m.functions.push_back(bump_member(c));
  } else {
    auto fam = line_family(c);
    m.functions = fam.members;
    m.notes = fam.notes;
    for (int n = fam.n_min; n <= fam.n_max; ++n) m.index.push_back(n);
    return m;
  }
  for (std::size_t i = 0; i < m.functions.size(); ++i) m.index.push_back(static_cast<long long>(i));
  return m;
}

inline Cell opt(bool ok, double v) { return ok ? Cell(v) : Cell(std::monostate{}); }

struct Builder {
  const ExperimentConfig& cfg;
  Table table;

  explicit Builder(const ExperimentConfig& c) : cfg(c) {
    table.experiment = to_string(c.experiment);
    for (const auto& [k, v] : c.snapshot)
      if (k != "output" && k != "format") table.columns.push_back(k);
    for (const auto& col : result_columns(c.experiment)) table.columns.push_back(col);
  }

  void add(std::vector<Cell> values) {
    std::vector<Cell> row;
    for (const auto& [k, v] : cfg.snapshot)
      if (k != "output" && k != "format") row.emplace_back(v);
    for (auto& v : values) row.push_back(std::move(v));
    table.rows.push_back(std::move(row));
  }
};

inline Table run_norm(const ExperimentConfig& c) {
  Builder out(c);
  auto mem = members_of(c);
  out.table.notes = mem.notes;
  const bool sob = c.p > 1.0 && !std::isinf(c.p) && c.m >= 0 && c.m <= kMaxSpectralOrder;
  const auto how = space_of(c).realization;
  DifferenceOptions dopt;
  dopt.t_max = c.t_max;
  std::vector<std::vector<Cell>> rows(mem.functions.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& u = mem.functions[i];
    auto sys = build_system(c.system == "smooth" ? SystemKind::smooth : SystemKind::sharp, u);
    auto [bd, bi] = besov_norms_diff_and_integral(u, c.r, c.p, c.m_diff, dopt);
    rows[i] = {static_cast<long long>(i),
               mem.index[i],
               lp_norm(u, c.p),
               sup_norm(u),
               bd,
               bi,
               besov_norm_fourier(u, c.r, c.p, sys),
               opt(sob, sob ? sobolev_norm_full(u, c.m, c.p, how) : 0.0),
               opt(sob, sob ? sobolev_norm_reduced(u, c.m, c.p, how) : 0.0),
               cmix_norm(u, std::clamp(c.m, 0, kMaxSpectralOrder), how)};
  });
  for (auto& r : rows) out.add(std::move(r));
  return out.table;
}

inline Table run_equiv(const ExperimentConfig& c) {
  Builder out(c);
  auto mem = members_of(c);
  DifferenceOptions dopt;
  dopt.t_max = c.t_max;
  const auto how = space_of(c).realization;
  std::vector<std::vector<Cell>> rows(mem.functions.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& u = mem.functions[i];
    auto sys = build_system(c.system == "smooth" ? SystemKind::smooth : SystemKind::sharp, u);
    auto [bd, bi] = besov_norms_diff_and_integral(u, c.r, c.p, c.m_diff, dopt);
    const double bf = besov_norm_fourier(u, c.r, c.p, sys);
    const double sf = sobolev_norm_full(u, c.m, c.p, how), sr = sobolev_norm_reduced(u, c.m, c.p, how);
    rows[i] = {static_cast<long long>(i), bd, bf, bi, sf, sr, bd / bf, bd / bi, sf / sr};
  });
  for (auto& r : rows) out.add(std::move(r));
  return out.table;
}

inline Table run_ratio(const ExperimentConfig& c, bool moser) {
  Builder out(c);
  const auto space = space_of(c);
  if (c.family == "random") {
    auto fs = random_members(c, c.kmax, 2 * c.count);
    std::vector<std::vector<Cell>> rows(c.count);
    parallel_for(c.count, [&](std::size_t i) {
      const auto &f = fs[2 * i], &g = fs[2 * i + 1];
      const double nf = space_norm(f, space), ng = space_norm(g, space), nfg = space_norm(f * g, space);
      const double sf = sup_norm(f), sg = sup_norm(g);
      const double ratio = moser ? nfg / (nf * sg + sf * ng) : nfg / (nf * ng);
      rows[i] = {static_cast<long long>(i), std::monostate{}, nf, ng, nfg, sf, sg, ratio, std::monostate{},
                 std::monostate{}};
    });
    for (auto& r : rows) out.add(std::move(r));
    return out.table;
  }
  auto fam = line_family(c);
  auto pairs = tensor_pair_family(fam, c.d, c.companion_plateau);
  out.table.notes = pairs.notes;
  const std::size_t count = pairs.F.size();
  std::vector<double> nf(count), ng(count), nfg(count), sf(count), sg(count), ratio(count);
  // cross-norm route: norms of factors, products taken factorwise
  parallel_for(count, [&](std::size_t i) {
    nf[i] = space_norm(pairs.F[i], space);
    ng[i] = space_norm(pairs.G[i], space);
    nfg[i] = space_norm(pairs.F[i] * pairs.G[i], space);
    sf[i] = sup_norm(pairs.F[i]);
    sg[i] = sup_norm(pairs.G[i]);
    ratio[i] = moser ? nfg[i] / (nf[i] * sg[i] + sf[i] * ng[i]) : nfg[i] / (nf[i] * ng[i]);
  });
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = pairs.n_min + static_cast<int>(i);
    if (n >= c.fit_min) {
      xs.push_back(n);
      ys.push_back(ratio[i]);
    }
  }
  Cell slope, resid;
  if (xs.size() >= 4) {
    auto fit = rate_fit(xs, ys, c.family == "dilated" ? RateModel::geometric : RateModel::power);
    slope = fit.slope;
    resid = fit.residual;
  }
  for (std::size_t i = 0; i < count; ++i)
    out.add({static_cast<long long>(i), static_cast<long long>(pairs.n_min + static_cast<int>(i)), nf[i], ng[i], nfg[i],
             sf[i], sg[i], ratio[i], slope, resid});
  return out.table;
}

inline Table run_localize(const ExperimentConfig& c) {
  Builder out(c);
  auto mem = members_of(c);
  auto space = space_of(c);
  std::vector<std::vector<Cell>> rows(mem.functions.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& u = mem.functions[i];
    auto pou = build_partition(c.width, u);
    const double whole = space_norm(u, space);
    auto local = localized_norms(u, space, pou);
    double uniform = 0.0, agg = 0.0;
    for (double v : local) {
      uniform = std::max(uniform, v);
      agg = std::isinf(c.p) ? std::max(agg, v) : agg + std::pow(v, c.p);
    }
    if (!std::isinf(c.p)) agg = std::pow(agg, 1.0 / c.p);
    rows[i] = {static_cast<long long>(i), whole, uniform, agg, whole / agg};
  }
  for (auto& r : rows) out.add(std::move(r));
  return out.table;
}

inline std::vector<int> band_sweep(const ExperimentConfig& c) {
  std::vector<int> ks;
  for (int k = c.kmax; k <= c.kmax_max; k *= 2) ks.push_back(k);
  return ks;
}

inline Table run_nikolskij(const ExperimentConfig& c) {
  Builder out(c);
  const double L = c.box_upper - c.box_lower;
  std::vector<int> alpha(c.d, 0);
  alpha[0] = c.alpha;
  for (int K : band_sweep(c)) {
    auto fs = random_members(c, K, c.count);
    const double b = 2.0 * std::numbers::pi * K / L;
    std::vector<double> bv(c.d, b);
    std::vector<double> ratio(fs.size());
    parallel_for(fs.size(), [&](std::size_t i) { ratio[i] = nikolskij_ratio(fs[i], alpha, c.p0, c.p, bv); });
    for (std::size_t i = 0; i < fs.size(); ++i) out.add({static_cast<long long>(i), static_cast<long long>(K), b, ratio[i]});
  }
  return out.table;
}

inline Table run_peetre(const ExperimentConfig& c) {
  Builder out(c);
  const double L = c.box_upper - c.box_lower;
  MixedOrder m(c.d, 0);
  m[0] = c.m_diff;
  for (int K : band_sweep(c)) {
    auto fs = random_members(c, K, c.count);
    const double b = 2.0 * std::numbers::pi * K / L;
    std::vector<double> bv(c.d, b);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& u = fs[i];
      const double pr = lp_norm(peetre_maximal(u, bv, c.a), c.p) / lp_norm(u, c.p);
      for (int j = 0; j <= c.h_octaves; ++j) {
        std::vector<double> h(c.d, 0.0);
        h[0] = std::ldexp(c.h_min, j);
        const double dr = difference_maximal_check(u, DirectionSet::of({0}), m, h, bv, c.a);
        out.add({static_cast<long long>(i), static_cast<long long>(K), b, pr, h[0], dr});
      }
    }
  }
  return out.table;
}

inline Table run_trace(const ExperimentConfig& c) {
  Builder out(c);
  auto mem = members_of(c);
  const auto how = space_of(c).realization;
  std::vector<std::vector<Cell>> rows(mem.functions.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& u = mem.functions[i];
    const double t = mixed_sup_lp(u, c.beta, c.split, c.p, how);
    const double s = sobolev_norm_full(u, c.m, c.p, how);
    rows[i] = {static_cast<long long>(i), t, s, t / s};
  });
  for (auto& r : rows) out.add(std::move(r));
  return out.table;
}

inline Table run_embed(const ExperimentConfig& c) {
  Builder out(c);
  auto fam = line_family(c);
  out.table.notes = fam.notes;
  auto space = space_of(c);
  const std::size_t count = fam.members.size();
  std::vector<double> sup(count), norm(count);
  parallel_for(count, [&](std::size_t i) {
    sup[i] = sup_norm(fam.members[i]);
    norm[i] = space_norm(fam.members[i], space);
  });
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < count; ++i)
    if (fam.n_min + static_cast<int>(i) >= c.fit_min) {
      xs.push_back(fam.n_min + static_cast<int>(i));
      ys.push_back(sup[i] / norm[i]);
    }
  Cell slope, resid;
  if (xs.size() >= 4) {
    auto fit = rate_fit(xs, ys, RateModel::geometric);
    slope = fit.slope;
    resid = fit.residual;
  }
  for (std::size_t i = 0; i < count; ++i)
    out.add({static_cast<long long>(fam.n_min + static_cast<int>(i)), sup[i], norm[i], sup[i] / norm[i], slope, resid});
  return out.table;
}

/// Fitted growth rates of the explicit families next to their predictions.
inline Table run_report(const ExperimentConfig& c) {
  Builder out(c);
  const double ip = inverse_exponent(c.p);
  DifferenceOptions dopt;
  dopt.t_max = c.t_max;
  auto fit_of = [&](const std::vector<double>& n, const std::vector<double>& v, RateModel model) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n.size(); ++i)
      if (n[i] >= c.fit_min) {
        xs.push_back(n[i]);
        ys.push_back(v[i]);
      }
    return rate_fit(xs, ys, model);
  };

  {
    ExperimentConfig dc = c;
    dc.family = "dilated";
    auto fam = line_family(dc);
    std::vector<double> n, v, e;
    for (int k = fam.n_min; k <= fam.n_max; ++k) {
      n.push_back(k);
      v.push_back(besov_norm_diff(fam.member(k), c.r, c.p, c.m_diff, dopt));
      e.push_back(sup_norm(fam.member(k)) / v.back());
    }
    auto f = fit_of(n, v, RateModel::geometric);
    out.add({std::string("dilated_besov_norm"), std::string("geometric"), c.r - ip, f.slope, f.residual});
    auto pairs = tensor_pair_family(fam, 2, c.companion_plateau);
    auto space = SpaceSpec::besov(c.r, c.p, c.m_diff);
    space.diff = dopt;
    std::vector<double> mo(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mo[i] = moser_ratio(pairs.F[i], pairs.G[i], space);
    auto fm = fit_of(n, mo, RateModel::geometric);
    out.add({std::string("dilated_moser_ratio"), std::string("geometric"), c.r - ip, fm.slope, fm.residual});
    auto fe = fit_of(n, e, RateModel::geometric);
    out.add({std::string("dilated_embedding_ratio"), std::string("geometric"), ip - c.r, fe.slope,
             fe.residual});
  }
  {
    ExperimentConfig oc = c;
    oc.family = "oscillatory";
    oc.n_min = std::max(1, c.n_min);
    auto fam = line_family(oc);
    std::vector<double> n, v;
    for (int k = fam.n_min; k <= fam.n_max; ++k) {
      n.push_back(k);
      v.push_back(besov_norm_diff(fam.member(k), c.r, c.p, c.m_diff, dopt));
    }
    auto f = fit_of(n, v, RateModel::power);
    out.add({std::string("oscillatory_besov_norm"), std::string("power"), (c.epsilon - ip) * c.r, f.slope,
             f.residual});
  }
  return out.table;
}

}  // namespace detail

inline Table run(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::norm: return detail::run_norm(c);
    case Experiment::equiv: return detail::run_equiv(c);
    case Experiment::algebra: return detail::run_ratio(c, false);
    case Experiment::moser: return detail::run_ratio(c, true);
    case Experiment::localize: return detail::run_localize(c);
    case Experiment::nikolskij: return detail::run_nikolskij(c);
    case Experiment::peetre: return detail::run_peetre(c);
    case Experiment::trace: return detail::run_trace(c);
    case Experiment::embed: return detail::run_embed(c);
    case Experiment::report: return detail::run_report(c);
  }
  throw ValidationError("experiment", "unhandled experiment");
}

}  // namespace mixnorm::runner
