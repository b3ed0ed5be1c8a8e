#include "hfjump/jumptest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hfjump/kernels.hpp"
#include "hfjump/stats.hpp"

namespace hfjump::jumptest {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

JumpTestResult finish(JumpTestResult r, double numerator, double variance, double alpha) {
  r.sigma_quadform = variance;
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(numerator)) {
    r.degenerate = true;
    r.statistic = std::nan("");
    r.p_value = std::nan("");
    r.reject = false;
    return r;
  }
  r.statistic = numerator / std::sqrt(variance);
  r.p_value = stats::norm_sf(r.statistic);
  r.reject = r.statistic > stats::norm_quantile(1.0 - alpha);
  return r;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("significance level must lie in (0, 1)");
}

}  // namespace

CovMatrix2 subsample_covariance(const preavg::PreAvgReturns& pre, double u_n,
                                const EstimatorConfig& config) {
  config.validate();
  const std::size_t L = static_cast<std::size_t>(config.subsample_L);
  const std::size_t p = static_cast<std::size_t>(config.subsample_p);
  const std::size_t k = pre.k_n;
  const std::size_t block = p * k;
  if (pre.n < L * block)
    throw InsufficientData("subsampler: n = " + std::to_string(pre.n) + " < L p k_n = " +
                           std::to_string(L * block));

  const std::size_t m = pre.n / (L * block);
  const std::size_t pairs = block - 2 * k + 2;
  const double sqrt_n = std::sqrt(static_cast<double>(pre.n));
  const double* v = pre.values.data();

  std::vector<double> sub20(L, 0.0), sub11(L, 0.0);
  for (std::size_t b = 0; b < m * L; ++b) {
    const std::size_t start = b * block;
    std::span<const double> sq(v + start, pairs);
    std::span<const double> bp(v + start, pairs + k);
    const double v20 = sqrt_n * kernels::truncated_sum_squares(sq, u_n) / static_cast<double>(pairs);
    const double v11 =
        sqrt_n * kernels::truncated_lagged_abs_product(bp, k, u_n) / static_cast<double>(pairs);
    sub20[b % L] += v20;
    sub11[b % L] += v11;
  }

  const double full20 = preavg::normalized_power_variation(pre, 2, 0, u_n);
  const double full11 = preavg::normalized_power_variation(pre, 1, 1, u_n);
  const double scale2 = sqrt_n / static_cast<double>(L);  // (n^{1/4}/sqrt(L))^2

  CovMatrix2 tilde;
  for (std::size_t l = 0; l < L; ++l) {
    const double d20 = sub20[l] / static_cast<double>(m) - full20;
    const double d11 = sub11[l] / static_cast<double>(m) - full11;
    tilde.a11 += scale2 * d20 * d20;
    tilde.a12 += scale2 * d20 * d11;
    tilde.a22 += scale2 * d11 * d11;
  }
  const double c = sqrt_n * pre.c1_n;
  const double c2 = c * c / static_cast<double>(L);
  return {c2 * tilde.a11, c2 * kHalfPi * tilde.a12, c2 * kHalfPi * kHalfPi * tilde.a22};
}

JumpTestResult jump_statistic(std::span<const double> log_prices, const EstimatorConfig& config,
                              double alpha) {
  check_alpha(alpha);
  config.validate();
  if (log_prices.size() < 2) throw InsufficientData("jump test: fewer than two prices");
  const std::size_t n = log_prices.size() - 1;
  const std::size_t k = preavg::window_length(n, config.theta);
  if (k < 2)
    throw InsufficientData("jump test: window k_n = " + std::to_string(k) + " < 2 at n = " +
                           std::to_string(n));
  if (n < 2 * k + 1)
    throw InsufficientData("jump test: n = " + std::to_string(n) + " < 2 k_n + 1 = " +
                           std::to_string(2 * k + 1));
  const std::size_t lpk = static_cast<std::size_t>(config.subsample_L) *
                          static_cast<std::size_t>(config.subsample_p) * k;
  if (n < lpk)
    throw InsufficientData("jump test: n = " + std::to_string(n) + " < L p k_n = " +
                           std::to_string(lpk));

  const preavg::PreAvgReturns pre = preavg::preaveraged_returns(log_prices, config);
  return jump_statistic(pre, preavg::noise_variance(log_prices, config), config, alpha);
}

JumpTestResult jump_statistic(const preavg::PreAvgReturns& pre, double noise_var,
                              const EstimatorConfig& config, double alpha) {
  check_alpha(alpha);
  JumpTestResult r;
  r.n = pre.n;
  r.k_n = pre.k_n;
  r.noise_var = noise_var;
  r.u_n = preavg::truncation_threshold(pre, config).value;
  r.rv_star = preavg::preavg_rv(pre, r.noise_var);
  r.bv_star_trunc = preavg::preavg_bv(pre, r.noise_var, r.u_n);
  const CovMatrix2 sigma = subsample_covariance(pre, r.u_n, config);
  const double numerator =
      std::pow(static_cast<double>(pre.n), 0.25) * (r.rv_star - r.bv_star_trunc);
  return finish(r, numerator, sigma.quadform(1.0, -1.0), alpha);
}

JumpTestResult jump_statistic(const TickSeries& ticks, const EstimatorConfig& config, double alpha) {
  const std::vector<double> lp = ticks.log_prices();
  return jump_statistic(lp, config, alpha);
}

double bonferroni_critical_value(double family_alpha, std::size_t m) {
  check_alpha(family_alpha);
  if (m == 0) throw DomainError("Bonferroni family must be nonempty");
  return stats::norm_quantile(1.0 - family_alpha / static_cast<double>(m));
}

std::vector<bool> decide_jump(std::span<const JumpTestResult> results, double family_alpha) {
  if (results.empty()) return {};
  const double q = bonferroni_critical_value(family_alpha, results.size());
  std::vector<bool> out(results.size());
  for (std::size_t i = 0; i < results.size(); ++i)
    out[i] = !results[i].degenerate && results[i].statistic > q;
  return out;
}

JumpTestResult bns_test(std::span<const double> log_prices, BnsVariant variant, double alpha) {
  check_alpha(alpha);
  if (log_prices.size() < 11)
    throw InsufficientData("BNS test: fewer than 10 returns (n = " +
                           std::to_string(log_prices.empty() ? 0 : log_prices.size() - 1) + ")");
  const std::size_t n = log_prices.size() - 1;
  std::vector<double> a(n);
  double rv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ret = log_prices[i + 1] - log_prices[i];
    rv += ret * ret;
    a[i] = std::fabs(ret);
  }
  double bp = 0.0;
  for (std::size_t i = 1; i < n; ++i) bp += a[i] * a[i - 1];
  double qp = 0.0;
  for (std::size_t i = 3; i < n; ++i) qp += a[i] * a[i - 1] * a[i - 2] * a[i - 3];

  const double nd = static_cast<double>(n);
  const double bv = kHalfPi * (nd / (nd - 1.0)) * bp;
  const double quarticity = nd * kHalfPi * kHalfPi * (nd / (nd - 3.0)) * qp;
  const double vartheta = std::numbers::pi * std::numbers::pi / 4.0 + std::numbers::pi - 5.0;

  JumpTestResult r;
  r.n = n;
  r.rv_star = rv;
  r.bv_star_trunc = bv;
  if (rv == 0.0) {
    r.statistic = 0.0;
    r.p_value = 0.5;
    return r;
  }

  switch (variant) {
    case BnsVariant::kLinear:
      return finish(r, rv - bv, vartheta * quarticity / nd, alpha);
    case BnsVariant::kRatio:
    case BnsVariant::kLog: {
      if (!(bv > 0.0)) return finish(r, 0.0, 0.0, alpha);
      const double num = variant == BnsVariant::kRatio ? 1.0 - bv / rv : std::log(rv / bv);
      const double var = vartheta / nd * std::max(1.0, quarticity / (bv * bv));
      return finish(r, num, var, alpha);
    }
  }
  return r;
}

std::vector<std::optional<double>> close_open_test(std::span<const double> co_returns,
                                                   const std::vector<bool>& announcement_flags,
                                                   int L, bool robust) {
  if (L < 5) throw DomainError("close-to-open test requires L >= 5");
  if (announcement_flags.size() != co_returns.size())
    throw DomainError("close-to-open test: returns and flags differ in length");
  const std::size_t window = static_cast<std::size_t>(L);
  std::vector<std::optional<double>> z(co_returns.size());
  std::vector<double> history;  // non-announcement returns seen so far
  history.reserve(co_returns.size());
  for (std::size_t t = 0; t < co_returns.size(); ++t) {
    if (history.size() >= window) {
      double scale = 0.0;
      if (robust) {
        double s = 0.0;
        for (std::size_t i = history.size() - window; i < history.size(); ++i)
          s += std::fabs(history[i]);
        scale = std::sqrt(kHalfPi) * s / static_cast<double>(window);
      } else {
        double s = 0.0;
        for (std::size_t i = history.size() - window; i < history.size(); ++i)
          s += history[i] * history[i];
        scale = std::sqrt(s / static_cast<double>(window));
      }
      if (scale > 0.0) z[t] = co_returns[t] / scale;
    }
    if (!announcement_flags[t]) history.push_back(co_returns[t]);
  }
  return z;
}

BrownForsytheResult brown_forsythe(std::span<const double> group_a, std::span<const double> group_b) {
  if (group_a.size() < 2 || group_b.size() < 2)
    throw InsufficientData("Brown-Forsythe test requires at least two observations per group");
  auto deviations = [](std::span<const double> g) {
    const double med = stats::median(std::vector<double>(g.begin(), g.end()));
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = std::fabs(g[i] - med);
    return d;
  };
  const std::vector<double> za = deviations(group_a);
  const std::vector<double> zb = deviations(group_b);
  const double na = static_cast<double>(za.size());
  const double nb = static_cast<double>(zb.size());
  const double ma = stats::mean(za);
  const double mb = stats::mean(zb);
  const double grand = (na * ma + nb * mb) / (na + nb);
  const double between = na * (ma - grand) * (ma - grand) + nb * (mb - grand) * (mb - grand);
  double within = 0.0;
  for (double v : za) within += (v - ma) * (v - ma);
  for (double v : zb) within += (v - mb) * (v - mb);
  const double df2 = na + nb - 2.0;

  if (within == 0.0) {
    if (between == 0.0) return {0.0, 1.0};
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  const double f = between / (within / df2);
  return {f, stats::f_sf(f, 1.0, df2)};
}

}  // namespace hfjump::jumptest
