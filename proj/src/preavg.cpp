#include "hfjump/preavg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hfjump/kernels.hpp"

namespace hfjump::preavg {

double weight(WeightFunction w, double x) {
  switch (w) {
    case WeightFunction::kMinX1MinusX:
      return std::min(x, 1.0 - x);
  }
  return 0.0;
}

namespace {

struct WeightLimits {
  double psi1;
  double psi2;
};

WeightLimits weight_limits(WeightFunction w) {
  switch (w) {
    case WeightFunction::kMinX1MinusX:
      return {1.0, 1.0 / 12.0};
  }
  return {0.0, 0.0};
}

std::size_t ceil_power(std::size_t n, double exponent) {
  return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), exponent)));
}

}  // namespace

std::size_t window_length(std::size_t n, double theta) {
  return static_cast<std::size_t>(std::floor(theta * std::sqrt(static_cast<double>(n))));
}

PreAvgReturns preaveraged_returns(std::span<const double> log_prices, const EstimatorConfig& config) {
  config.validate();
  if (log_prices.size() < 2) throw InsufficientData("pre-averaging needs at least two prices");
  const std::size_t n = log_prices.size() - 1;
  const std::size_t k = window_length(n, config.theta);
  if (k < 2)
    throw InsufficientData("pre-averaging window k_n = " + std::to_string(k) +
                           " < 2 (n = " + std::to_string(n) + ")");
  if (n < 2 * k)
    throw InsufficientData("n = " + std::to_string(n) + " < 2 k_n = " + std::to_string(2 * k));

  PreAvgReturns out;
  out.k_n = k;
  out.n = n;
  out.theta = config.theta;

  const double kd = static_cast<double>(k);
  std::vector<double> g(k + 1);
  for (std::size_t j = 0; j <= k; ++j) g[j] = weight(config.weight, static_cast<double>(j) / kd);

  double d2 = 0.0;
  for (std::size_t j = 0; j < k; ++j) d2 += (g[j + 1] - g[j]) * (g[j + 1] - g[j]);
  double s2 = 0.0;
  for (std::size_t j = 1; j <= k; ++j) s2 += g[j] * g[j];
  out.psi1_n = kd * d2;
  out.psi2_n = s2 / kd;
  const auto lim = weight_limits(config.weight);
  out.psi1 = lim.psi1;
  out.psi2 = lim.psi2;
  out.c1_n = 1.0 / (kd * out.psi2_n);
  out.c2_n = out.psi1_n / (out.psi2_n * config.theta * config.theta);

  std::vector<double> returns(n);
  for (std::size_t m = 0; m < n; ++m) returns[m] = log_prices[m + 1] - log_prices[m];

  // values[i] = sum_{j=1}^{k-1} g_j returns[i + j - 1]
  std::span<const double> w(g.data() + 1, k - 1);
  out.values.resize(n - k + 2);
  kernels::weighted_window(returns, w, out.values);
  return out;
}

double noise_variance_raw(std::span<const double> log_prices, const EstimatorConfig& config) {
  if (log_prices.size() < 2) throw InsufficientData("noise variance needs at least two prices");
  const std::size_t n = log_prices.size() - 1;
  const std::size_t h = ceil_power(n, config.noise_h_exponent);
  const std::size_t ell = ceil_power(n, config.noise_l_exponent);
  if (n < 5 * h + 1)
    throw InsufficientData("noise variance: n = " + std::to_string(n) + " < 5 h_n + 1 = " +
                           std::to_string(5 * h + 1));

  // Shift by p_0 for conditioning; the estimator is shift invariant.
  const double p0 = log_prices[0];
  std::vector<double> q(log_prices.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = log_prices[i] - p0;

  std::vector<double> prefix(q.size() + 1, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) prefix[i + 1] = prefix[i] + q[i];
  const double hd = static_cast<double>(h);
  auto local_mean = [&](std::size_t j) { return (prefix[j + h] - prefix[j]) / hd; };

  const std::size_t count = n - 5 * h + 1;
  std::vector<double> a(count), late(count);
  for (std::size_t i = 0; i < count; ++i) {
    a[i] = q[i] - local_mean(i + 2 * h);
    late[i] = local_mean(i + 4 * h);
  }
  const double a_late = kernels::dot(a, late);
  const double denom = static_cast<double>(count);

  double omega2 = 0.0;
  for (std::size_t m = 0; m <= ell; ++m) {
    const std::size_t avail = std::min(count, q.size() - m);
    std::span<const double> shifted(q.data() + m, avail);
    const double rho = (kernels::dot(std::span<const double>(a).first(avail), shifted) - a_late) / denom;
    omega2 += (m == 0 ? 1.0 : 2.0) * rho;
  }
  return omega2;
}

double noise_variance(std::span<const double> log_prices, const EstimatorConfig& config) {
  return std::max(0.0, noise_variance_raw(log_prices, config));
}

double preavg_rv(const PreAvgReturns& pre, double noise_var) {
  if (pre.sum_count() == 0) throw InsufficientData("realized variance: no pre-averaged returns");
  return pre.c1_n * kernels::truncated_sum_squares(pre.summed()) - pre.c2_n * noise_var;
}

double preavg_bv(const PreAvgReturns& pre, double noise_var, std::optional<double> truncation) {
  const std::size_t count = pre.sum_count();
  if (count == 0 || pre.values.size() < pre.k_n + 1 || pre.values.size() < count + pre.k_n)
    throw InsufficientData("bipower variation: fewer than k_n + 1 pre-averaged returns");
  const double thr = truncation.value_or(kernels::kNoTruncation);
  std::span<const double> span(pre.values.data(), count + pre.k_n);
  const double cross = kernels::truncated_lagged_abs_product(span, pre.k_n, thr);
  return pre.c1_n * (std::numbers::pi / 2.0) * cross - pre.c2_n * noise_var;
}

double normalized_power_variation(const PreAvgReturns& pre, int q, int r, double threshold) {
  const std::size_t count = pre.sum_count();
  if (count == 0) throw InsufficientData("power variation: no pre-averaged returns");
  const double sqrt_n = std::sqrt(static_cast<double>(pre.n));
  const double inv_n = 1.0 / static_cast<double>(pre.n);
  if (q == 2 && r == 0) {
    return inv_n * sqrt_n * kernels::truncated_sum_squares(pre.summed(), threshold);
  }
  if (q == 1 && r == 1) {
    if (pre.values.size() < count + pre.k_n)
      throw InsufficientData("power variation: fewer than k_n + 1 pre-averaged returns");
    std::span<const double> span(pre.values.data(), count + pre.k_n);
    return inv_n * sqrt_n * kernels::truncated_lagged_abs_product(span, pre.k_n, threshold);
  }
  throw DomainError("power variation supports (q, r) in {(2, 0), (1, 1)}");
}

Threshold truncation_threshold(const PreAvgReturns& pre, const EstimatorConfig& config) {
  const double bv11 = normalized_power_variation(pre, 1, 1);
  if (!(bv11 > 0.0)) return {std::numeric_limits<double>::infinity(), true};
  const double alpha = config.trunc_c * std::sqrt(bv11);
  return {alpha * std::pow(static_cast<double>(pre.n), -config.trunc_omega_bar), false};
}

SpectrumEstimates spectrum(std::span<const double> log_prices, const EstimatorConfig& config) {
  const PreAvgReturns pre = preaveraged_returns(log_prices, config);
  SpectrumEstimates s;
  s.noise_var = noise_variance(log_prices, config);
  s.u_n = truncation_threshold(pre, config).value;
  s.rv_star = preavg_rv(pre, s.noise_var);
  s.bv_star = preavg_bv(pre, s.noise_var);
  s.bv_star_trunc = preavg_bv(pre, s.noise_var, s.u_n);
  s.jump_var = std::max(0.0, s.rv_star - s.bv_star_trunc);
  return s;
}

}  // namespace hfjump::preavg
