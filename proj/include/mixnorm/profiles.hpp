#pragma once

// Smooth compactly supported profiles shared by the frequency windows, the
// partitions of unity and the test families.

#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace mixnorm::profiles {

/// exp(-1/(1-t^2)) on (-1, 1), zero elsewhere.
inline double mollifier(double t) {
  double q = 1.0 - t * t;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

namespace detail {

// Cumulative integral of the mollifier from -1, tabulated on uniform panels;
// queries add a fixed Gauss-Legendre rule over the partial panel.
class MollifierCdf {
public:
  static constexpr int kPanels = 256;

  MollifierCdf() {
    cum_[0] = 0.0;
    for (int i = 0; i < kPanels; ++i) cum_[i + 1] = cum_[i] + panel(node(i), node(i + 1));
  }

  double operator()(double x) const {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return cum_[kPanels];
    int i = static_cast<int>((x + 1.0) / width());
    if (i >= kPanels) i = kPanels - 1;
    return cum_[i] + panel(node(i), x);
  }

  double mass() const { return cum_[kPanels]; }

private:
  static double width() { return 2.0 / kPanels; }
  static double node(int i) { return -1.0 + i * width(); }
  static double panel(double a, double b) {
    return b > a ? boost::math::quadrature::gauss<double, 20>::integrate(mollifier, a, b) : 0.0;
  }
  std::array<double, kPanels + 1> cum_{};
};

inline const MollifierCdf& mollifier_cdf() {
  static const MollifierCdf cdf;
  return cdf;
}

}  // namespace detail

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, the normalised integral of
/// the mollifier in between. Satisfies step(s) + step(1-s) = 1 exactly.
inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  if (s > 0.5) return 1.0 - smooth_step(1.0 - s);
  const auto& cdf = detail::mollifier_cdf();
  return cdf(2.0 * s - 1.0) / cdf.mass();
}

/// Even bump equal to 1 on [-plateau, plateau], vanishing outside
/// (-support, support), with range [0, 1].
inline double plateau_bump(double t, double plateau, double support) {
  double a = std::abs(t);
  if (a <= plateau) return 1.0;
  if (a >= support) return 0.0;
  return smooth_step((support - a) / (support - plateau));
}

/// Cubic Hermite step 3s^2 - 2s^3 clamped to [0, 1]; its derivative is Lipschitz.
inline double smoothstep_cubic(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * (3.0 - 2.0 * s);
}

}  // namespace mixnorm::profiles
