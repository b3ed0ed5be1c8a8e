#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "helpers.hpp"
#include "hfjump/jumptest.hpp"
#include "hfjump/stats.hpp"

using namespace hfjump;
using namespace hfjump::jumptest;
using namespace hfjump::testing_support;

namespace {

std::vector<double> noisy_path(std::uint64_t seed, double jump = 0.0) {
  std::mt19937_64 rng(seed);
  auto p = brownian_path(23400, 0.16, rng);
  if (jump != 0.0)
    for (std::size_t i = 11700; i < p.size(); ++i) p[i] += jump;
  add_gaussian_noise(p, 25.0 * 0.16 / 23400, rng);
  return p;
}

}  // namespace

TEST(SubsampleCovariance, SymmetricPsd) {
  EstimatorConfig cfg;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto p = noisy_path(seed, seed % 2 ? 0.05 : 0.0);
    auto pre = preavg::preaveraged_returns(p, cfg);
    double u = preavg::truncation_threshold(pre, cfg).value;
    auto s = subsample_covariance(pre, u, cfg);
    EXPECT_GE(s.a11, 0.0);
    EXPECT_GE(s.a22, 0.0);
    EXPECT_GE(s.a11 * s.a22 - s.a12 * s.a12, -1e-12 * s.a11 * s.a22);
    for (double a : {-1.0, 0.3, 2.0}) EXPECT_GE(s.quadform(1.0, a), -1e-15);
  }
}

TEST(SubsampleCovariance, HomogeneousOfDegreeFour) {
  EstimatorConfig cfg;
  auto p = noisy_path(6);
  auto q = p;
  const double s = 2.0;
  for (auto& x : q) x *= s;
  auto pa = preavg::preaveraged_returns(p, cfg);
  auto pb = preavg::preaveraged_returns(q, cfg);
  auto a = subsample_covariance(pa, preavg::truncation_threshold(pa, cfg).value, cfg);
  auto b = subsample_covariance(pb, preavg::truncation_threshold(pb, cfg).value, cfg);
  EXPECT_NEAR(b.a11, std::pow(s, 4) * a.a11, 1e-9 * b.a11);
  EXPECT_NEAR(b.a22, std::pow(s, 4) * a.a22, 1e-9 * b.a22);
  EXPECT_NEAR(b.a12, std::pow(s, 4) * a.a12, 1e-9 * std::abs(b.a11));
}

TEST(SubsampleCovariance, NeedsOneBlockPerSubsample) {
  EstimatorConfig cfg;
  std::mt19937_64 rng(7);
  auto p = brownian_path(5000, 0.16, rng);  // k = 35, L p k = 3500 fits
  auto pre = preavg::preaveraged_returns(p, cfg);
  EXPECT_NO_THROW(subsample_covariance(pre, INFINITY, cfg));
  cfg.subsample_L = 20;  // 7000 > 5000
  EXPECT_THROW(subsample_covariance(pre, INFINITY, cfg), InsufficientData);
}

TEST(JumpStatistic, ShortSeriesNamesTheBound) {
  std::vector<double> p(300, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = 1e-3 * std::sin(i * 1.3);
  try {
    jump_statistic(p, EstimatorConfig{});
    FAIL() << "expected InsufficientData";
  } catch (const InsufficientData& e) {
    EXPECT_NE(std::string(e.what()).find("L p k_n"), std::string::npos) << e.what();
  }
  std::vector<double> tiny(6, 0.0);
  EXPECT_THROW(jump_statistic(tiny, EstimatorConfig{}), InsufficientData);
}

TEST(JumpStatistic, ResultFieldsConsistent) {
  auto p = noisy_path(8);
  auto r = jump_statistic(p, EstimatorConfig{});
  EXPECT_EQ(r.n, 23400u);
  EXPECT_EQ(r.k_n, 76u);
  EXPECT_FALSE(r.degenerate);
  EXPECT_GT(r.sigma_quadform, 0.0);
  EXPECT_NEAR(r.statistic, std::pow(23400.0, 0.25) * (r.rv_star - r.bv_star_trunc) / std::sqrt(r.sigma_quadform),
              1e-9 * std::abs(r.statistic) + 1e-12);
  EXPECT_NEAR(r.p_value, stats::norm_sf(r.statistic), 1e-14);
  EXPECT_EQ(r.reject, r.statistic > stats::norm_quantile(0.95));
}

TEST(JumpStatistic, LargeJumpIsDetected) {
  auto r = jump_statistic(noisy_path(9, 0.3), EstimatorConfig{});
  EXPECT_TRUE(r.reject);
  EXPECT_LT(r.p_value, 1e-3);
}

TEST(JumpStatistic, ShiftInvariance) {
  auto p = noisy_path(10, 0.02);
  auto q = p;
  for (auto& x : q) x += std::log(137.0);
  auto a = jump_statistic(p, EstimatorConfig{});
  auto b = jump_statistic(q, EstimatorConfig{});
  EXPECT_NEAR(a.statistic, b.statistic, 1e-6 * std::max(1.0, std::abs(a.statistic)));
}

TEST(JumpStatistic, OrderPreservingRelabelingOfTimes) {
  auto p = noisy_path(11, 0.03);
  std::vector<double> prices(p.size()), t1(p.size()), t2(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    prices[i] = 40.0 * std::exp(p[i]);
    t1[i] = 34200.0 + i;
    t2[i] = 34200.0 + 0.001 * i * i / 10.0 + 0.01 * i;
  }
  TickSeries a("X", Date{}, t1, prices), b("X", Date{}, t2, prices);
  EXPECT_EQ(jump_statistic(a, EstimatorConfig{}).statistic, jump_statistic(b, EstimatorConfig{}).statistic);
}

TEST(JumpStatistic, ConstantPriceIsDegenerate) {
  std::vector<double> p(23401, std::log(20.0));
  auto r = jump_statistic(p, EstimatorConfig{});
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.reject);
  EXPECT_TRUE(std::isnan(r.statistic));
}

TEST(JumpStatistic, PrecomputedOverloadMatches) {
  EstimatorConfig cfg;
  auto p = noisy_path(12, 0.01);
  auto pre = preavg::preaveraged_returns(p, cfg);
  double w = preavg::noise_variance(p, cfg);
  EXPECT_EQ(jump_statistic(pre, w, cfg).statistic, jump_statistic(p, cfg).statistic);
}

TEST(DecideJump, SingleTestCriticalValue) {
  EXPECT_NEAR(bonferroni_critical_value(0.05, 1), 1.6449, 1e-4);
}

TEST(DecideJump, BonferroniHundredTests) {
  EXPECT_NEAR(bonferroni_critical_value(0.01, 100), stats::norm_quantile(0.9999), 1e-12);
  EXPECT_NEAR(bonferroni_critical_value(0.01, 100), 3.719, 1e-3);
}

TEST(DecideJump, StrictInequalityAtTheBoundary) {
  JumpTestResult r;
  r.statistic = bonferroni_critical_value(0.05, 1);
  std::vector<JumpTestResult> v{r};
  EXPECT_FALSE(decide_jump(v, 0.05)[0]);
  v[0].statistic = std::nextafter(r.statistic, INFINITY);
  EXPECT_TRUE(decide_jump(v, 0.05)[0]);
}

TEST(DecideJump, SingleTestReducesToTheLevelRule) {
  for (std::uint64_t seed : {13, 14, 15}) {
    auto r = jump_statistic(noisy_path(seed, 0.01 * static_cast<double>(seed % 3)), EstimatorConfig{}, 0.05);
    std::vector<JumpTestResult> v{r};
    EXPECT_EQ(decide_jump(v, 0.05)[0], r.reject);
  }
}

TEST(DecideJump, DegenerateNeverFlagged) {
  JumpTestResult r;
  r.degenerate = true;
  r.statistic = NAN;
  std::vector<JumpTestResult> v{r};
  EXPECT_FALSE(decide_jump(v, 0.5)[0]);
}

TEST(Bns, ConstantPricesGiveZero) {
  std::vector<double> p(79, std::log(10.0));
  auto r = bns_test(p);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.reject);
}

TEST(Bns, NeedsTenReturns) {
  std::vector<double> p(10, 0.0);
  EXPECT_THROW(bns_test(p), InsufficientData);
  std::vector<double> q{0, 0.1, 0.0, 0.2, 0.1, 0.0, 0.1, 0.3, 0.2, 0.1, 0.2};
  EXPECT_NO_THROW(bns_test(q));
}

TEST(Bns, RealizedMeasures) {
  std::vector<double> p{0.0, 0.01, -0.01, 0.02, 0.0, 0.01, 0.015, 0.0, -0.005, 0.01, 0.02, 0.01};
  auto r = bns_test(p);
  const std::size_t n = p.size() - 1;
  double rv = 0.0, bv = 0.0;
  for (std::size_t i = 1; i <= n; ++i) rv += std::pow(p[i] - p[i - 1], 2);
  for (std::size_t i = 2; i <= n; ++i) bv += std::abs(p[i] - p[i - 1]) * std::abs(p[i - 1] - p[i - 2]);
  bv *= M_PI / 2 * n / (n - 1.0);
  EXPECT_NEAR(r.rv_star, rv, 1e-15);
  EXPECT_NEAR(r.bv_star_trunc, bv, 1e-15);
}

TEST(Bns, VariantsAgreeInSign) {
  std::mt19937_64 rng(16);
  auto p = brownian_path(78, 0.16, rng);
  for (std::size_t i = 40; i < p.size(); ++i) p[i] += 0.4;
  auto a = bns_test(p, BnsVariant::kLinear);
  auto b = bns_test(p, BnsVariant::kRatio);
  auto c = bns_test(p, BnsVariant::kLog);
  EXPECT_GT(a.statistic, 0);
  EXPECT_GT(b.statistic, 0);
  EXPECT_GT(c.statistic, 0);
}

namespace {

double null_rejection(std::size_t days, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 0.02);
  std::vector<double> r(days);
  for (auto& x : r) x = z(rng);
  std::vector<bool> flags(days, false);
  auto zs = close_open_test(r, flags, L);
  const double q = stats::norm_quantile(0.995);
  std::size_t scored = 0, rejected = 0;
  for (const auto& v : zs) {
    if (!v) continue;
    ++scored;
    rejected += std::abs(*v) > q;
  }
  EXPECT_EQ(scored, days - L);
  return static_cast<double>(rejected) / scored;
}

}  // namespace

// The normal limit needs a long estimation window.
TEST(CloseOpen, IidNullRejectionAtOnePercent) {
  EXPECT_NEAR(null_rejection(100000, 250, 17), 0.01, 0.005);
}

// With L = 22 the statistic is exactly Student t with 22 degrees of freedom.
TEST(CloseOpen, IidNullMatchesStudentTAtOneMonth) {
  boost::math::students_t t22(22.0);
  const double exact = 2.0 * boost::math::cdf(boost::math::complement(t22, stats::norm_quantile(0.995)));
  const double rate = null_rejection(100000, 22, 21);
  EXPECT_NEAR(rate, exact, 3.0 * std::sqrt(exact * (1 - exact) / 100000));
}

TEST(CloseOpen, MissingUntilEnoughCleanDays) {
  std::vector<double> r(40);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (i % 2 ? 0.01 : -0.01) * (1 + i % 3);
  std::vector<bool> flags(40, false);
  flags[3] = flags[10] = true;
  auto zs = close_open_test(r, flags, 5);
  // Day t needs five earlier non-announcement days: 0, 1, 2, 4, 5 serve t = 6.
  for (std::size_t t = 0; t < 6; ++t) EXPECT_FALSE(zs[t].has_value()) << t;
  ASSERT_TRUE(zs[6].has_value());
  double ss = 0.0;
  for (std::size_t t : {0u, 1u, 2u, 4u, 5u}) ss += r[t] * r[t];
  EXPECT_NEAR(*zs[6], r[6] / std::sqrt(ss / 5.0), 1e-12);
  // Day 12 skips announcement day 10: window 6, 7, 8, 9, 11.
  ss = 0.0;
  for (std::size_t t : {6u, 7u, 8u, 9u, 11u}) ss += r[t] * r[t];
  EXPECT_NEAR(*zs[12], r[12] / std::sqrt(ss / 5.0), 1e-12);
}

TEST(CloseOpen, ZeroScaleIsMissing) {
  std::vector<double> r(30, 0.0);
  std::vector<bool> flags(30, false);
  for (const auto& v : close_open_test(r, flags, 22)) EXPECT_FALSE(v.has_value());
}

TEST(CloseOpen, RobustScaleIsNormalConsistent) {
  std::mt19937_64 rng(18);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> r(20000);
  for (auto& x : r) x = z(rng);
  std::vector<bool> flags(r.size(), false);
  auto zs = close_open_test(r, flags, 200, true);
  std::vector<double> v;
  for (const auto& x : zs)
    if (x) v.push_back(*x);
  EXPECT_NEAR(sample_sd(v), 1.0, 0.03);
}

TEST(BrownForsythe, IdenticalGroups) {
  std::vector<double> a{1.0, 2.5, 3.0, 4.2, 5.1, 0.3};
  auto r = brown_forsythe(a, a);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_NEAR(r.p_value, 1.0, 1e-9);
}

TEST(BrownForsythe, DetectsVarianceRatioFour) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> z(0.0, 1.0);
  int rejections = 0;
  const int sims = 400;
  for (int s = 0; s < sims; ++s) {
    std::vector<double> a(200), b(200);
    for (auto& x : a) x = z(rng);
    for (auto& x : b) x = 2.0 * z(rng);
    rejections += brown_forsythe(a, b).p_value < 0.01;
  }
  EXPECT_GT(rejections, 0.95 * sims);
}

TEST(BrownForsythe, ConstantsVersusNoise) {
  std::vector<double> a(50, 3.0), b(50);
  std::mt19937_64 rng(20);
  std::normal_distribution<double> z(0.0, 1.0);
  for (auto& x : b) x = z(rng);
  auto r = brown_forsythe(a, b);
  EXPECT_GT(r.statistic, 50.0);
  EXPECT_LT(r.p_value, 1e-10);
}

TEST(BrownForsythe, NeedsTwoPerGroup) {
  std::vector<double> a{1.0}, b{1.0, 2.0};
  EXPECT_THROW(brown_forsythe(a, b), InsufficientData);
}
