#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hfjump/core.hpp"
#include "hfjump/preavg.hpp"

namespace hfjump::jumptest {

/// Symmetric 2x2 matrix, ordered as (RV-type, BV-type).
struct CovMatrix2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  /// v' A v for v = (v1, v2).
  double quadform(double v1, double v2) const noexcept {
    return v1 * v1 * a11 + 2.0 * v1 * v2 * a12 + v2 * v2 * a22;
  }
};

struct JumpTestResult {
  double statistic = 0.0;  // NaN when degenerate
  double rv_star = 0.0;
  double bv_star_trunc = 0.0;
  double noise_var = 0.0;
  double sigma_quadform = 0.0;
  double p_value = 1.0;
  bool reject = false;
  bool degenerate = false;  // non-positive variance estimate; never rejects
  std::size_t n = 0;
  std::size_t k_n = 0;
  double u_n = 0.0;
};

/// Subsampled covariance of the truncated (2,0) and (1,1) power variations,
/// rescaled to the scale of n^{1/4}(RV*, BV*).
///
/// Blocks of p k_n returns start at index 0; subsample l holds blocks
/// l, l + L, l + 2L, ...; data past the last full round of L blocks is
/// discarded. Throws InsufficientData when n < L p k_n.
CovMatrix2 subsample_covariance(const preavg::PreAvgReturns& pre, double u_n,
                                const EstimatorConfig& config);

/// Noise-robust jump test on a log-price path (one observation per tick).
JumpTestResult jump_statistic(std::span<const double> log_prices, const EstimatorConfig& config,
                              double alpha = 0.05);

JumpTestResult jump_statistic(const TickSeries& ticks, const EstimatorConfig& config,
                              double alpha = 0.05);

/// The same test from pre-averaged returns and a noise variance already
/// computed for the sample; lets callers vary the truncation and subsampling
/// settings without repeating the shared work.
JumpTestResult jump_statistic(const preavg::PreAvgReturns& pre, double noise_var,
                              const EstimatorConfig& config, double alpha = 0.05);

/// Bonferroni decision over a family: statistic > Phi^{-1}(1 - alpha / M).
/// Degenerate results are never flagged.
std::vector<bool> decide_jump(std::span<const JumpTestResult> results, double family_alpha);

/// Critical value used by decide_jump for a family of size m.
double bonferroni_critical_value(double family_alpha, std::size_t m);

enum class BnsVariant { kLinear, kRatio, kLog };

/// Classical bipower jump test on sparsely sampled log-prices (one-sided).
/// The result reuses JumpTestResult: rv_star holds RV, bv_star_trunc holds
/// BV, and sigma_quadform the variance of the numerator.
JumpTestResult bns_test(std::span<const double> log_prices, BnsVariant variant = BnsVariant::kLinear,
                        double alpha = 0.05);

/// Standardized close-to-open returns. The scale for day t uses the L most
/// recent earlier days without an announcement; Z is missing until L such
/// days exist or when the scale is zero.
std::vector<std::optional<double>> close_open_test(std::span<const double> co_returns,
                                                   const std::vector<bool>& announcement_flags,
                                                   int L = 22, bool robust = false);

struct BrownForsytheResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Equality-of-variance test on absolute deviations from group medians.
BrownForsytheResult brown_forsythe(std::span<const double> group_a, std::span<const double> group_b);

}  // namespace hfjump::jumptest
