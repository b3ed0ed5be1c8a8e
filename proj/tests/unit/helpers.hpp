#pragma once

#include <cmath>
#include <random>
#include <vector>

namespace hfjump::testing_support {

/// Brownian log-price path p_0 = 0, ..., p_n with integrated variance iv on [0, 1].
inline std::vector<double> brownian_path(std::size_t n, double iv, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, std::sqrt(iv / static_cast<double>(n)));
  std::vector<double> p(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) p[i] = p[i - 1] + z(rng);
  return p;
}

inline void add_gaussian_noise(std::vector<double>& p, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, std::sqrt(variance));
  for (auto& x : p) x += z(rng);
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  double m = sample_mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double standard_error(const std::vector<double>& v) {
  return sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace hfjump::testing_support
