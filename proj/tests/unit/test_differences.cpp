#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mixnorm/differences.hpp"

using namespace mixnorm;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction random_smooth(std::mt19937_64& rng, std::size_t d, std::size_t n, Extension ext) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::array<double, 6> c{};
  for (auto& x : c) x = N(rng);
  return sample(
      [&](std::span<const double> x) {
        double v = c[0];
        for (std::size_t a = 0; a < x.size(); ++a)
          v += c[1 + a] * std::sin(2 * kPi * (a + 1) * x[a] + c[4]) + c[5] * std::cos(2 * kPi * x[a]) * x[a];
        return v;
      },
      Box::cube(d, 0.0, 1.0), std::vector<std::size_t>(d, n), ext);
}

// Direct finite-difference oracle: sum_l (-1)^(m-l) C(m,l) u(x + l s) read node by node.
GridFunction naive_difference(const GridFunction& u, std::size_t axis, int m, std::ptrdiff_t s) {
  std::vector<double> out(u.size());
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    auto idx = u.unflatten(flat);
    std::array<std::ptrdiff_t, kMaxDim> j{};
    for (std::size_t a = 0; a < u.dim(); ++a) j[a] = static_cast<std::ptrdiff_t>(idx[a]);
    double acc = 0.0;
    double binom = 1.0;
    for (int l = 0; l <= m; ++l) {
      auto k = j;
      k[axis] += l * s;
      const double sign = ((m - l) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binom * u.at(std::span<const std::ptrdiff_t>(k.data(), u.dim()));
      binom = binom * (m - l) / (l + 1);
    }
    out[flat] = acc;
  }
  return u.with_values(std::move(out));
}

double max_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Stencil, AlternatingBinomials) {
  EXPECT_EQ(binomial_row(4), (std::vector<double>{1, 4, 6, 4, 1}));
  EXPECT_EQ(difference_stencil(3), (std::vector<double>{-1, 3, -3, 1}));
}

TEST(DirectionSet, AxesAscending) {
  auto e = DirectionSet::of({2, 0});
  EXPECT_EQ(e.axes(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(DirectionSet::all(3).size(), 3u);
  EXPECT_TRUE(DirectionSet::none().empty());
}

TEST(DirectionalDifference, MatchesNaiveOracle) {
  std::mt19937_64 rng(1);
  for (auto ext : {Extension::zero, Extension::periodic}) {
    auto u = random_smooth(rng, 2, 32, ext);
    for (int m = 1; m <= 3; ++m)
      for (std::size_t axis = 0; axis < 2; ++axis)
        for (std::ptrdiff_t s : {1, 3, 7, 20}) {
          auto r = directional_difference(u, axis, m, s / 32.0);
          EXPECT_EQ(r.cells[axis], s);
          EXPECT_LT(max_diff(r.function, naive_difference(u, axis, m, s)), 1e-12);
        }
  }
}

TEST(DirectionalDifference, NegativeStepsAndDegenerate) {
  std::mt19937_64 rng(2);
  auto u = random_smooth(rng, 1, 64, Extension::zero);
  auto r = directional_difference(u, 0, 2, -5.0 / 64);
  EXPECT_LT(max_diff(r.function, naive_difference(u, 0, 2, -5)), 1e-12);
  auto z = directional_difference(u, 0, 2, 0.2 / 64);
  EXPECT_TRUE(z.degenerate);
  EXPECT_EQ(sup_norm(z.function), 0.0);
}

TEST(DirectionalDifference, SineClosedForm) {
  // Delta_h^m sin(w x) = (2 sin(w h / 2))^m sin(w x + m (w h + pi) / 2)
  const double w = 2 * kPi * 3;
  auto u = sample_1d([&](double x) { return std::sin(w * x); }, 0.0, 1.0, 128, Extension::periodic);
  for (int m = 1; m <= 4; ++m) {
    const double h = 5.0 / 128;
    auto r = directional_difference(u, 0, m, h).function;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double x = u.node(0, static_cast<std::ptrdiff_t>(j));
      const double expect = std::pow(2 * std::sin(w * h / 2), m) * std::sin(w * x + m * (w * h + kPi) / 2);
      ASSERT_NEAR(r[j], expect, 1e-12);
    }
  }
}

TEST(MixedDifference, IsCompositionOfDirectional) {
  std::mt19937_64 rng(3);
  auto u = random_smooth(rng, 3, 12, Extension::zero);
  MixedOrder m{2, 1, 3};
  double h[3] = {2.0 / 12, 1.0 / 12, 3.0 / 12};
  auto mixed = mixed_difference(u, DirectionSet::of({0, 2}), m, h).function;
  auto ref = naive_difference(naive_difference(u, 2, 3, 3), 0, 2, 2);
  EXPECT_LT(max_diff(mixed, ref), 1e-12);
  auto ident = mixed_difference(u, DirectionSet::none(), m, h).function;
  EXPECT_EQ(max_diff(ident, u), 0.0);
}

// Leibniz identities: 100 seeded samples, d in {1, 2}, m in {1, 2, 3}.
TEST(Leibniz, OneAxisReproducesProductDifference) {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<int> S(1, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 2;
    const auto ext = trial % 3 == 0 ? Extension::periodic : Extension::zero;
    auto psi = random_smooth(rng, d, 24, ext), phi = random_smooth(rng, d, 24, ext);
    const int m = 1 + trial % 3;
    const std::size_t axis = static_cast<std::size_t>(trial) % d;
    const double h = S(rng) / 24.0;
    auto lhs = directional_difference(psi * phi, axis, m, h).function;
    auto rhs = leibniz_difference(psi, phi, m, h, axis);
    ASSERT_LE(max_diff(lhs, rhs), 1e-12 * std::max(1.0, sup_norm(lhs))) << trial;
  }
}

TEST(Leibniz, MixedTermsSumToDoubleOrderDifference) {
  std::mt19937_64 rng(200);
  std::uniform_int_distribution<int> S(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 2;
    const auto ext = trial % 4 == 0 ? Extension::periodic : Extension::zero;
    auto f = random_smooth(rng, d, 16, ext), g = random_smooth(rng, d, 16, ext);
    const int m = 1 + trial % 3;
    const DirectionSet e = d == 1 ? DirectionSet::all(1) : DirectionSet{static_cast<unsigned>(1 + trial % 3)};
    std::vector<double> h(d);
    for (auto& x : h) x = S(rng) / 16.0;
    auto terms = mixed_leibniz_terms(f, g, e, m, h);
    std::size_t expected = 1;
    for (std::size_t a = 0; a < e.size(); ++a) expected *= static_cast<std::size_t>(2 * m + 1);
    ASSERT_EQ(terms.size(), expected);
    std::vector<double> sum(f.size(), 0.0);
    for (const auto& t : terms)
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += t.term[i];
    auto lhs = mixed_difference(f * g, e, MixedOrder(d, 2 * m), h).function;
    ASSERT_LE(max_diff(lhs, f.with_values(sum)), 1e-12 * std::max(1.0, sup_norm(lhs))) << trial;
  }
}

// Axis-wise polynomials of degree < m are annihilated on interior nodes.
TEST(Modulus, PolynomialAnnihilation) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N(0.0, 1.0);
  for (std::size_t d = 1; d <= 3; ++d) {
    const std::size_t n = d == 3 ? 16 : 64;
    for (int m = 1; m <= 3; ++m) {
      // product of per-axis polynomials of degree m - 1 plus lower-dimensional terms
      std::vector<std::vector<double>> coef(d, std::vector<double>(static_cast<std::size_t>(m)));
      for (auto& c : coef)
        for (auto& x : c) x = N(rng);
      auto u = sample(
          [&](std::span<const double> x) {
            double prod = 1.0;
            for (std::size_t a = 0; a < d; ++a) {
              double v = 0.0;
              for (int k = m - 1; k >= 0; --k) v = v * x[a] + coef[a][static_cast<std::size_t>(k)];
              prod *= v;
            }
            return prod;
          },
          Box::cube(d, 0.0, 1.0), std::vector<std::size_t>(d, n));
      for (unsigned mask = 1; mask < (1u << d); ++mask) {
        std::vector<double> t(d, 0.5);
        DifferenceOptions opt;
        opt.region = NodeRegion::interior;
        opt.t_max = 0.5;
        auto w = modulus(u, DirectionSet{mask}, MixedOrder(d, m), t, 2.0, opt);
        EXPECT_LE(w.value, 1e-14) << "d=" << d << " m=" << m << " e=" << mask;
        auto wi = modulus(u, DirectionSet{mask}, MixedOrder(d, m), t, kInf, opt);
        EXPECT_LE(wi.value, 1e-14);
      }
    }
  }
}

TEST(ShiftLattice, ContainsProbesAndIsSorted) {
  ShiftLattice lat(1.0 / 256, 1.0);
  EXPECT_EQ(lat.k_max(), 7);
  const auto& s = lat.shifts();
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  for (int k = 0; k <= lat.k_max(); ++k) {
    const auto top = static_cast<std::ptrdiff_t>(std::llround(std::ldexp(256.0, -k)));
    EXPECT_NO_THROW((void)lat.index_of(top));
    EXPECT_EQ(s[lat.admissible(lat.scale(k)) - 1], top);
  }
  EXPECT_EQ(lat.admissible(0.1 / 256), 0u);
}

TEST(Modulus, PropertyMonotoneInScale) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto u = random_smooth(rng, 2, 32, Extension::zero);
    for (double p : {1.0, 2.0, kInf}) {
      double prev = 0.0;
      for (int i = 1; i <= 32; ++i) {
        double t[2] = {i / 32.0, 0.5};
        double w = modulus(u, DirectionSet::all(2), MixedOrder{2, 2}, t, p).value;
        ASSERT_GE(w, prev);
        prev = w;
      }
    }
  }
}

TEST(Modulus, BoundedByExhaustiveSearchAndLargestProbe) {
  std::mt19937_64 rng(6);
  auto u = random_smooth(rng, 1, 128, Extension::zero);
  for (double t : {1.0, 0.3, 0.125, 0.05}) {
    double tt[1] = {t};
    const double w = modulus(u, DirectionSet::all(1), MixedOrder{2}, tt, 2.0).value;
    double exhaustive = 0.0;
    const auto top = static_cast<std::ptrdiff_t>(std::llround(t * 128));
    for (std::ptrdiff_t s = 1; s <= top; ++s) exhaustive = std::max(exhaustive, lp_norm(naive_difference(u, 0, 2, s), 2.0));
    EXPECT_LE(w, exhaustive * (1 + 1e-12));
    // at dyadic scales the full step round(t/dx) is always probed
    if (std::exp2(std::round(std::log2(t))) == t) {
      EXPECT_GE(w, lp_norm(naive_difference(u, 0, 2, top), 2.0) * (1 - 1e-12));
    }
  }
}

TEST(BesovDiff, SineClosedForm) {
  // u = sin(2 pi x) periodic on [0,1): ||Delta_s^m u||_2 = |2 sin(pi s dx)|^m / sqrt 2 exactly.
  const std::size_t n = 256;
  auto u = sample_1d([](double x) { return std::sin(2 * kPi * x); }, 0.0, 1.0, n, Extension::periodic);
  for (int m : {2, 3})
    for (double r : {0.5, 1.0, 1.7}) {
      if (m <= r) continue;
      double acc = 0.0;
      for (int k = 0; k <= 7; ++k) {
        double w = 0.0;
        const auto top = static_cast<std::ptrdiff_t>(std::ldexp(static_cast<double>(n), -k));
        for (std::ptrdiff_t s = 1; s <= top; ++s)
          w = std::max(w, std::pow(std::abs(2 * std::sin(kPi * s / n)), m) / std::sqrt(2.0));
        acc += std::exp2(2 * r * k) * w * w;
      }
      const double oracle = std::sqrt(0.5) + std::sqrt(acc);
      EXPECT_NEAR(besov_norm_diff(u, r, 2.0, m), oracle, 1e-12 * oracle);
      EXPECT_NEAR(isotropic_besov_norm(u, r, 2.0, m), oracle, 1e-12 * oracle);
    }
}

TEST(BesovIntegral, CloseToContinuousIntegralForSine) {
  // continuous: ||u||_2 + ( int_{-1}^{1} |h|^{-rp-1} ||Delta_h^m u||_2^p dh )^{1/p}
  const std::size_t n = 1024;
  auto u = sample_1d([](double x) { return std::sin(2 * kPi * x); }, 0.0, 1.0, n, Extension::periodic);
  const double r = 1.0, m = 2;
  double integral = 0.0;
  const int panels = 200000;
  for (int i = 0; i < panels; ++i) {
    const double h = (i + 0.5) / panels;
    const double w = std::pow(std::abs(2 * std::sin(kPi * h)), m) / std::sqrt(2.0);
    integral += 2.0 / panels * std::pow(h, -2 * r - 1) * w * w;
  }
  const double oracle = std::sqrt(0.5) + std::sqrt(integral);
  const double v = besov_norm_integral(u, r, 2.0, static_cast<int>(m));
  EXPECT_NEAR(v / oracle, 1.0, 0.15);
}

TEST(BesovDiff, DiffAndIntegralSharedTablesAgreeWithSeparateCalls) {
  std::mt19937_64 rng(8);
  auto u = random_smooth(rng, 2, 64, Extension::periodic);
  auto [a, b] = besov_norms_diff_and_integral(u, 1.0, 2.0, 2);
  EXPECT_DOUBLE_EQ(a, besov_norm_diff(u, 1.0, 2.0, 2));
  EXPECT_DOUBLE_EQ(b, besov_norm_integral(u, 1.0, 2.0, 2));
}

TEST(BesovDiff, CrossNormFactorizes) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_smooth(rng, 1, 64, Extension::zero);
    auto g = random_smooth(rng, 1, 64, Extension::zero);
    const double dense = besov_norm_diff(tensor_product(f, g), 1.0, 2.0, 2);
    const double factored = besov_norm_diff(f, 1.0, 2.0, 2) * besov_norm_diff(g, 1.0, 2.0, 2);
    EXPECT_NEAR(dense, factored, 1e-10 * factored);
    const double viaTensor = besov_norm_diff(TensorGridFunction({f, g}), 1.0, 2.0, 2);
    EXPECT_NEAR(viaTensor, factored, 1e-14 * factored);
  }
}

TEST(BesovDiff, PropertyTranslationInvariantWhenPeriodic) {
  std::mt19937_64 rng(10);
  auto u = random_smooth(rng, 2, 32, Extension::periodic);
  std::ptrdiff_t c[2] = {5, -3};
  EXPECT_NEAR(besov_norm_diff(shift_cells(u, c), 0.8, 2.0, 2), besov_norm_diff(u, 0.8, 2.0, 2), 1e-12);
}

TEST(BesovDiff, PInfinityUsesMaxima) {
  auto u = sample_1d([](double x) { return std::sin(2 * kPi * x); }, 0.0, 1.0, 64, Extension::periodic);
  const double v = besov_norm_diff(u, 1.0, kInf, 2);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 1.0);
}

TEST(BesovDiff, Validation) {
  auto u = sample_1d([](double x) { return x; }, 0.0, 1.0, 2);
  auto expect_field = [](auto&& fn, const std::string& field) {
    try {
      fn();
      ADD_FAILURE() << "no throw";
    } catch (const ValidationError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  expect_field([&] { besov_norm_diff(u, 1.0, 2.0, 2); }, "resolution");
  auto v = sample_1d([](double x) { return x; }, 0.0, 1.0, 64);
  expect_field([&] { besov_norm_diff(v, 2.0, 2.0, 2); }, "m_diff");
  expect_field([&] { besov_norm_diff(v, -1.0, 2.0, 2); }, "r");
  expect_field([&] { besov_norm_diff(v, 1.0, 0.5, 2); }, "p");
}

TEST(BesovDiff, ZeroFunctionHasZeroNorm) {
  auto z = GridFunction::zeros(Box::cube(2, 0.0, 1.0), {32, 32});
  EXPECT_EQ(besov_norm_diff(z, 1.0, 2.0, 2), 0.0);
  EXPECT_EQ(besov_norm_integral(z, 1.0, 2.0, 2), 0.0);
}
