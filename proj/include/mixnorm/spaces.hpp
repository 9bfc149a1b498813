#pragma once

// Closed selection of the function spaces the ratio experiments measure in.

#include <cstdio>
#include <string>

#include "mixnorm/differences.hpp"
#include "mixnorm/grid.hpp"
#include "mixnorm/sobolev.hpp"
#include "mixnorm/tensor_grid.hpp"

namespace mixnorm {

struct SpaceSpec {
  enum class Kind { sobolev, besov, cmix };

  Kind kind = Kind::besov;
  int m = 1;          // Sobolev / C^m_mix order
  double r = 1.0;     // Besov smoothness
  double p = 2.0;
  int m_diff = 2;     // Besov difference order
  Realization realization = Realization::spectral;
  DifferenceOptions diff{};

  static SpaceSpec sobolev(int m, double p) {
    SpaceSpec s;
    s.kind = Kind::sobolev;
    s.m = m;
    s.p = p;
    return s;
  }
  static SpaceSpec besov(double r, double p, int m_diff) {
    SpaceSpec s;
    s.kind = Kind::besov;
    s.r = r;
    s.p = p;
    s.m_diff = m_diff;
    return s;
  }
  static SpaceSpec cmix(int m) {
    SpaceSpec s;
    s.kind = Kind::cmix;
    s.m = m;
    s.p = kInf;
    return s;
  }

  std::string describe() const {
    char buf[96];
    switch (kind) {
      case Kind::sobolev: std::snprintf(buf, sizeof buf, "sobolev(m=%d,p=%g)", m, p); break;
      case Kind::besov: std::snprintf(buf, sizeof buf, "besov(r=%g,p=%g,m_diff=%d)", r, p, m_diff); break;
      case Kind::cmix: std::snprintf(buf, sizeof buf, "cmix(m=%d)", m); break;
    }
    return buf;
  }
};

/// Besov spaces use the difference characterisation, Sobolev the full
/// derivative sum.
inline double space_norm(const GridFunction& u, const SpaceSpec& s) {
  switch (s.kind) {
    case SpaceSpec::Kind::sobolev: return sobolev_norm_full(u, s.m, s.p, s.realization);
    case SpaceSpec::Kind::besov: return besov_norm_diff(u, s.r, s.p, s.m_diff, s.diff);
    case SpaceSpec::Kind::cmix: return cmix_norm(u, s.m, s.realization);
  }
  return 0.0;
}

inline double space_norm(const TensorGridFunction& u, const SpaceSpec& s) {
  return cross_norm(u, [&](const GridFunction& f) { return space_norm(f, s); });
}

/// sup |u| / ||u||_X
inline double embedding_ratio(const GridFunction& u, const SpaceSpec& s) {
  const double n = space_norm(u, s);
  require(n > 0.0, "u", "zero function has no embedding ratio");
  return sup_norm(u) / n;
}

}  // namespace mixnorm
