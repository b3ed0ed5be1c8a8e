#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hfjump/core.hpp"

namespace hfjump::preavg {

/// g(x) for the configured weight function.
double weight(WeightFunction w, double x);

/// Pre-averaged log-returns of an observed log-price path p_0..p_n and the
/// normalizing constants of the weight function at window length k_n.
///
/// values[i] = sum_{j=1}^{k_n-1} g(j/k_n) (p_{i+j} - p_{i+j-1}) for every i
/// whose window fits in the sample, i = 0..n-k_n+1. The realized variance
/// sums the first n-2k_n+2 of them (see sum_count()); the bipower sum pairs
/// each of those with the value k_n positions later.
struct PreAvgReturns {
  std::vector<double> values;
  std::size_t k_n = 0;
  std::size_t n = 0;  // number of underlying returns
  double theta = 0.0;
  double psi1_n = 0.0;  // k_n sum_{j=0}^{k_n-1} (g_{j+1} - g_j)^2
  double psi2_n = 0.0;  // (1/k_n) sum_{j=1}^{k_n} g_j^2
  double psi1 = 0.0;    // int g'(x)^2 dx
  double psi2 = 0.0;    // int g(x)^2 dx
  double c1_n = 0.0;    // 1 / (k_n psi2_n)
  double c2_n = 0.0;    // psi1_n / (psi2_n theta^2)

  std::size_t sum_count() const noexcept {
    if (k_n == 0 || n < 2 * k_n) return 0;
    return std::min(n - 2 * k_n + 2, values.size());
  }
  std::span<const double> summed() const noexcept {
    return std::span<const double>(values).first(sum_count());
  }
};

/// k_n = floor(theta sqrt(n)).
std::size_t window_length(std::size_t n, double theta);

/// Throws InsufficientData when k_n < 2 or n < 2 k_n.
PreAvgReturns preaveraged_returns(std::span<const double> log_prices, const EstimatorConfig& config);

/// Long-run noise variance from local-average-demeaned log-prices, floored at 0.
///
/// h_n = ceil(n^h_exponent) and l_n = ceil(n^l_exponent). Throws
/// InsufficientData when n < 5 h_n + 1.
double noise_variance(std::span<const double> log_prices, const EstimatorConfig& config);

/// Unfloored autocovariance sum before flooring; exposed for diagnostics.
double noise_variance_raw(std::span<const double> log_prices, const EstimatorConfig& config);

/// c1_n sum |r_i|^2 - c2_n noise_var. Not floored.
double preavg_rv(const PreAvgReturns& pre, double noise_var);

/// c1_n (pi/2) sum |r_i||r_{i+k_n}| - c2_n noise_var, each return zeroed when
/// its magnitude exceeds the truncation threshold (if one is given).
double preavg_bv(const PreAvgReturns& pre, double noise_var,
                 std::optional<double> truncation = std::nullopt);

/// BV_n(q, r) = (1/n) sum |n^{1/4} r_i|^q |n^{1/4} r_{i+k_n}|^r over the
/// summed range, for (q, r) in {(2, 0), (1, 1)}, with optional truncation.
double normalized_power_variation(const PreAvgReturns& pre, int q, int r,
                                  double threshold = std::numeric_limits<double>::infinity());

struct Threshold {
  double value = 0.0;       // +inf when degenerate
  bool degenerate = false;  // BV_n(1,1) == 0
};

/// u_n = c sqrt(BV_n(1,1)) n^{-omega_bar} from the untruncated returns.
Threshold truncation_threshold(const PreAvgReturns& pre, const EstimatorConfig& config);

struct SpectrumEstimates {
  double rv_star = 0.0;
  double bv_star = 0.0;
  double bv_star_trunc = 0.0;
  double noise_var = 0.0;
  double u_n = 0.0;
  double jump_var = 0.0;  // max(rv_star - bv_star_trunc, 0)
};

SpectrumEstimates spectrum(std::span<const double> log_prices, const EstimatorConfig& config);

}  // namespace hfjump::preavg
