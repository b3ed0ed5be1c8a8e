#pragma once

#include <span>
#include <vector>

namespace hfjump::stats {

double norm_cdf(double x);
/// Upper tail 1 - Phi(x), accurate far in the tail.
double norm_sf(double x);
double norm_quantile(double p);

/// Survival function of the F(d1, d2) distribution.
double f_sf(double x, double d1, double d2);

double mean(std::span<const double> x);
/// Sample variance with n - 1 denominator.
double variance(std::span<const double> x);
double median(std::vector<double> x);

/// Two-sided one-sample Kolmogorov-Smirnov test against N(0, 1).
struct KsResult {
  double statistic;
  double p_value;
};
KsResult ks_test_normal(std::vector<double> sample);

/// Asymptotic Kolmogorov distribution: P(sqrt(n) D_n > x).
double kolmogorov_sf(double x);

}  // namespace hfjump::stats
