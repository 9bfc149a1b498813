#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mixnorm/counterexamples.hpp"

using namespace mixnorm;

namespace {

constexpr GridSpec1d kSmallDilated{-4.0, 4.0, std::size_t{1} << 12};

}  // namespace

TEST(RateFit, ExactGeometricAndPower) {
  std::vector<double> n{2, 3, 4, 5, 6, 7}, g, p;
  for (double k : n) {
    g.push_back(3.0 * std::exp2(0.7 * k));
    p.push_back(5.0 * std::pow(k, -1.3));
  }
  auto fg = rate_fit(n, g, RateModel::geometric);
  EXPECT_NEAR(fg.slope, 0.7, 1e-12);
  EXPECT_NEAR(fg.intercept, std::log2(3.0), 1e-12);
  EXPECT_LT(fg.residual, 1e-12);
  auto fp = rate_fit(n, p, RateModel::power);
  EXPECT_NEAR(fp.slope, -1.3, 1e-12);
  EXPECT_LT(fp.residual, 1e-12);
}

TEST(RateFit, NoisyResidualIsMaxDeviation) {
  std::vector<double> n{0, 1, 2, 3}, v{1.0, 2.0, 4.0, 16.0};
  auto f = rate_fit(n, v, RateModel::geometric);
  // y = 0,1,2,4: least squares slope 1.3, intercept -0.2
  EXPECT_NEAR(f.slope, 1.3, 1e-12);
  EXPECT_NEAR(f.intercept, -0.2, 1e-12);
  EXPECT_NEAR(f.residual, 0.4, 1e-12);
}

TEST(RateFit, Validation) {
  EXPECT_THROW(rate_fit({1, 2, 3}, {1, 2, 3}, RateModel::geometric), ValidationError);
  EXPECT_THROW(rate_fit({1, 2, 3, 4}, {1, 0, 3, 4}, RateModel::geometric), ValidationError);
  EXPECT_THROW(rate_fit({0, 1, 2, 3}, {1, 2, 3, 4}, RateModel::power), ValidationError);
  EXPECT_THROW(rate_fit({1, 1, 1, 1}, {1, 2, 3, 4}, RateModel::geometric), ValidationError);
}

TEST(DilatedFamily, LpScaling) {
  auto fam = dilated_family(6, 0, kSmallDilated);
  ASSERT_EQ(fam.members.size(), 7u);
  for (double p : {1.0, 2.0, 3.0}) {
    const double base = lp_norm(fam.member(0), p);
    for (int n = 1; n <= 6; ++n) EXPECT_NEAR(lp_norm(fam.member(n), p), std::exp2(-n / p) * base, 1e-5 * base) << n;
  }
  for (int n = 0; n <= 6; ++n) EXPECT_EQ(sup_norm(fam.member(n)), 1.0);
}

TEST(DilatedFamily, SelfSimilarUnderDyadicDilation) {
  auto fam = dilated_family(5, 0, kSmallDilated);
  for (int n = 1; n <= 5; ++n) {
    auto d = dyadic_dilate(fam.member(0), n);
    for (std::size_t i = 0; i < d.size(); ++i) ASSERT_NEAR(d[i], fam.member(n)[i], 1e-12);
  }
}

TEST(DilatedFamily, SupportAndValidation) {
  auto fam = dilated_family(3, 0, kSmallDilated);
  const auto& u = fam.member(3);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.node(0, static_cast<std::ptrdiff_t>(i));
    if (std::abs(t) >= 2.0 / 8) {
      EXPECT_EQ(u[i], 0.0);
    }
    if (std::abs(t) <= 1.0 / 8) {
      EXPECT_EQ(u[i], 1.0);
    }
  }
  EXPECT_THROW(dilated_family(8, 0, kSmallDilated), ValidationError);
  EXPECT_THROW(dilated_family(2, 0, {-1.0, 1.0, 1024}), ValidationError);
}

TEST(Oscillatory, CutoffShape) {
  for (int n : {1, 3, 8})
    for (auto ramp : {Ramp::linear, Ramp::smooth}) {
      EXPECT_EQ(ramp_cutoff(0.5 / n, n, ramp), 0.0);
      EXPECT_EQ(ramp_cutoff(1.0 / n, n, ramp), 1.0);
      EXPECT_EQ(ramp_cutoff(1.0, n, ramp), 1.0);
      EXPECT_EQ(ramp_cutoff(1.5, n, ramp), 0.0);
      EXPECT_NEAR(ramp_cutoff(1.25, n, ramp), 0.5, 1e-15);
      if (n > 1) {
        EXPECT_NEAR(ramp_cutoff(0.75 / n, n, ramp), 0.5, 1e-14);
      }
    }
  EXPECT_NEAR(ramp_cutoff(0.3, 2, Ramp::linear), 4 * (0.3 - 0.25), 1e-15);
}

TEST(Oscillatory, MemberValuesAndBounds) {
  const double eps = 1.6;
  for (int n : {2, 4}) {
    for (double t : {1.0 / n, 0.6, 1.0}) EXPECT_DOUBLE_EQ(oscillatory_member(t, n, eps, Ramp::linear), t * std::sin(std::pow(t, -eps)));
    EXPECT_EQ(oscillatory_member(0.4 / n, n, eps, Ramp::linear), 0.0);
    EXPECT_EQ(oscillatory_member(-0.1, n, eps, Ramp::linear), 0.0);
    EXPECT_EQ(oscillatory_member(1.6, n, eps, Ramp::smooth), 0.0);
  }
  auto fam = oscillatory_family(4, eps, Ramp::linear);
  for (const auto& u : fam.members) EXPECT_LE(sup_norm(u), 1.0);
}

TEST(Oscillatory, ResolutionLimitReducesNMax) {
  const double dx = 5.0 / (1 << 15), eps = 1.6;
  const int limit = oscillatory_resolution_limit(dx, eps);
  EXPECT_LE(dx, std::pow(0.5 / limit, 1 + eps) / 8);
  EXPECT_GT(dx, std::pow(0.5 / (limit + 1), 1 + eps) / 8);
  auto fam = oscillatory_family(limit + 5, eps, Ramp::smooth);
  EXPECT_EQ(fam.n_max, limit);
  ASSERT_FALSE(fam.notes.empty());
  EXPECT_NE(fam.notes.back().find("n_max reduced"), std::string::npos);
}

TEST(Oscillatory, WarningsForExcludedEpsilon) {
  auto low = oscillatory_family(2, 0.4, Ramp::linear, 1, 2.0);
  EXPECT_NE(low.notes.front().find("epsilon <= 1/p"), std::string::npos);
  auto edge = oscillatory_family(2, 1.5, Ramp::linear, 1, 2.0);
  EXPECT_NE(edge.notes.front().find("excluded"), std::string::npos);
  EXPECT_THROW(oscillatory_family(2, -1.0, Ramp::linear), ValidationError);
}

TEST(TensorPairs, CompanionCoversSupport) {
  auto fam = dilated_family(4, 0, kSmallDilated);
  for (std::size_t d : {2u, 3u}) {
    auto pairs = tensor_pair_family(fam, d);
    ASSERT_EQ(pairs.F.size(), fam.members.size());
    for (std::size_t i = 0; i < pairs.F.size(); ++i) {
      auto prod = pairs.F[i] * pairs.G[i];
      ASSERT_EQ(prod.dim(), d);
      // f_n g = f_n, so each factor of F_n G_n is f_n or g^2 = g on the support of f_n
      for (std::size_t k = 0; k < prod.factor(0).size(); ++k) {
        ASSERT_EQ(prod.factor(0)[k], fam.members[i][k]);
        ASSERT_EQ(prod.factor(1)[k], fam.members[i][k]);
      }
    }
  }
  EXPECT_THROW(tensor_pair_family(fam, 2, 0.5), ValidationError);
  EXPECT_THROW(tensor_pair_family(fam, 1), ValidationError);
}
