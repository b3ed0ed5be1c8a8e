#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hfjump::sim {

using Rng = std::mt19937_64;

struct HestonParams {
  double kappa = 5.0;
  double sigma_sq_bar = 0.16;
  double xi = 0.5;
  double rho = -0.70710678118654752440;  // -sqrt(0.5)

  bool feller() const noexcept { return xi * xi < 2.0 * kappa * sigma_sq_bar; }
  void validate() const;
};

struct HestonPath {
  std::vector<double> variance;  // v_0..v_n, floored at zero
  std::vector<double> returns;   // n continuous log-returns
  double integrated_variance = 0.0;
};

/// Euler scheme on [0, 1] with step 1/n and full truncation of the variance.
/// v_0 is drawn from the stationary Gamma law (shape 2 kappa s2 / xi^2, rate
/// 2 kappa / xi^2), or set to sigma_sq_bar when xi = 0.
HestonPath simulate_heston(const HestonParams& params, std::size_t n, Rng& rng);

/// Draw from the stationary law of the variance process.
double draw_initial_variance(const HestonParams& params, Rng& rng);

struct JumpParams {
  double beta = 0.5;
  double lambda = 3.0;
  double tau = 0.0;
  /// When set, tau is calibrated so that jumps carry this share of expected
  /// quadratic variation given the Heston long-run variance.
  std::optional<double> target_jump_share;

  void validate() const;
};

/// tau such that two independent one-sided processes with Levy density
/// tau e^{-lambda x} x^{-1-beta} have expected jump variation `target` per
/// unit time.
double calibrate_tau(double beta, double lambda, double target_jump_variation);

/// Expected jump variation per unit time, 2 tau Gamma(2 - beta) lambda^{beta - 2}.
double expected_jump_variation(double beta, double lambda, double tau);

/// Increments of a one-sided tempered stable subordinator over a fixed
/// horizon: exponential tilting by rejection from a totally skewed stable
/// draw, or a compound Poisson approximation for very small beta.
class TemperedStableSampler {
 public:
  TemperedStableSampler(double beta, double lambda, double tau, double horizon);
  /// One increment, up to a deterministic location that is the same for
  /// every draw.
  double operator()(Rng& rng) const;
  bool uses_rejection() const noexcept { return rejection_; }

 private:
  double stable_unit(Rng& rng) const;

  double alpha_;
  double lambda_;
  double tau_;
  double horizon_;
  double scale_ = 0.0;
  double shift_ = 0.0;  // proposals below -shift_ (unit scale) are rejected
  double cms_b_ = 0.0;
  double cms_s_ = 1.0;
  bool rejection_ = true;
  // Compound Poisson fallback.
  double cut_ = 0.0;
  double large_rate_ = 0.0;
  double small_sd_ = 0.0;
  std::vector<double> grid_x_;
  std::vector<double> grid_cdf_;
};

struct JumpPath {
  std::vector<double> increments;  // length n
  double jump_variation = 0.0;     // sum of squared increments
};

/// Difference of two independent one-sided tempered stable processes on an
/// n-step grid of [0, 1].
JumpPath simulate_jumps(const JumpParams& params, std::size_t n, Rng& rng);

enum class NoiseKind { kGaussian, kTDist, kAutocorrelated, kHeteroscedastic };

std::string noise_kind_name(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& text);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kGaussian;
  double gamma = 5.0;
  double eta = 2.5;
  double phi = -0.77;

  void validate() const;
};

/// Noise at the n + 1 grid points. `variance_path` holds v_0..v_n and is
/// only read by the heteroscedastic kind.
std::vector<double> simulate_noise(const NoiseSpec& spec, const std::vector<double>& variance_path,
                                   double integrated_variance, std::size_t n, Rng& rng);

struct ScenarioSpec {
  std::size_t n = 23400;
  HestonParams heston;
  std::optional<JumpParams> jumps;
  NoiseSpec noise;
  std::uint64_t seed = 1;

  void validate() const;
  /// Resolved jump intensity (0 when there are no jumps).
  double tau() const;

  std::string to_json() const;
  static ScenarioSpec from_json(const std::string& text);
};

struct ScenarioTruth {
  double integrated_variance = 0.0;
  double jump_variation = 0.0;
};

struct Scenario {
  std::vector<double> observed;   // n + 1 noisy log-prices
  std::vector<double> efficient;  // n + 1 latent log-prices
  ScenarioTruth truth;
};

Scenario simulate_scenario(const ScenarioSpec& spec);

/// Stream seed for replication `index` of a cell; a pure function of its
/// arguments.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

}  // namespace hfjump::sim
