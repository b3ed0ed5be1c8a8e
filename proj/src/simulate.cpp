#include "hfjump/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "hfjump/errors.hpp"

namespace hfjump::sim {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform_open(Rng& rng) {
  // (0, 1): 53 random bits offset by half a unit.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t z = splitmix64(master);
  z = splitmix64(z ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  return splitmix64(z ^ splitmix64(index + 0x85157af5ULL));
}

void HestonParams::validate() const {
  if (!(kappa > 0.0)) throw DomainError("heston: kappa must be positive");
  if (!(sigma_sq_bar > 0.0)) throw DomainError("heston: sigma_sq_bar must be positive");
  if (!(xi >= 0.0)) throw DomainError("heston: xi must be nonnegative");
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("heston: rho must lie in [-1, 1]");
}

double draw_initial_variance(const HestonParams& params, Rng& rng) {
  if (params.xi == 0.0) return params.sigma_sq_bar;
  const double xi2 = params.xi * params.xi;
  const double shape = 2.0 * params.kappa * params.sigma_sq_bar / xi2;
  const double rate = 2.0 * params.kappa / xi2;
  std::gamma_distribution<double> gamma(shape, 1.0 / rate);
  return gamma(rng);
}

HestonPath simulate_heston(const HestonParams& params, std::size_t n, Rng& rng) {
  params.validate();
  if (n < 2) throw DomainError("heston: n must be at least 2");
  const double dt = 1.0 / static_cast<double>(n);
  const double sdt = std::sqrt(dt);
  const double rho_perp = std::sqrt(std::max(0.0, 1.0 - params.rho * params.rho));
  std::normal_distribution<double> normal;

  HestonPath path;
  path.variance.resize(n + 1);
  path.returns.resize(n);
  double v = draw_initial_variance(params, rng);
  path.variance[0] = std::max(v, 0.0);
  double iv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double vp = std::max(v, 0.0);
    const double zb = normal(rng);
    const double zw = params.rho * zb + rho_perp * normal(rng);
    const double vol = std::sqrt(vp);
    path.returns[i] = vol * sdt * zw;
    iv += vp * dt;
    v = v + params.kappa * (params.sigma_sq_bar - vp) * dt + params.xi * vol * sdt * zb;
    path.variance[i + 1] = std::max(v, 0.0);
  }
  path.integrated_variance = iv;
  return path;
}

void JumpParams::validate() const {
  if (!(beta >= 0.0 && beta < 2.0)) throw DomainError("jumps: beta must lie in [0, 2)");
  if (!(lambda > 0.0)) throw DomainError("jumps: lambda must be positive");
  if (target_jump_share) {
    if (!(*target_jump_share > 0.0 && *target_jump_share < 1.0))
      throw DomainError("jumps: target_jump_share must lie in (0, 1)");
  } else if (!(tau >= 0.0)) {
    throw DomainError("jumps: tau must be nonnegative");
  }
}

double expected_jump_variation(double beta, double lambda, double tau) {
  return 2.0 * tau * std::tgamma(2.0 - beta) * std::pow(lambda, beta - 2.0);
}

double calibrate_tau(double beta, double lambda, double target_jump_variation) {
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("calibrate_tau: beta must lie in (0, 2)");
  if (!(lambda > 0.0)) throw DomainError("calibrate_tau: lambda must be positive");
  if (!(target_jump_variation >= 0.0))
    throw DomainError("calibrate_tau: target must be nonnegative");
  return target_jump_variation / (2.0 * std::tgamma(2.0 - beta) * std::pow(lambda, beta - 2.0));
}

TemperedStableSampler::TemperedStableSampler(double beta, double lambda, double tau, double horizon)
    : alpha_(beta), lambda_(lambda), tau_(tau), horizon_(horizon) {
  if (!(beta >= 0.0 && beta < 2.0)) throw DomainError("tempered stable: beta must lie in [0, 2)");
  if (!(lambda > 0.0) || !(tau >= 0.0) || !(horizon > 0.0))
    throw DomainError("tempered stable: lambda, horizon must be positive and tau nonnegative");
  if (tau == 0.0) return;

  if (beta < 0.1) {
    // Jumps above cut_ as compound Poisson, the rest as a Gaussian.
    rejection_ = false;
    cut_ = 1e-6;
    small_sd_ = std::sqrt(tau * std::pow(cut_, 2.0 - beta) / (2.0 - beta));
    const double upper = cut_ + 60.0 / lambda;
    const std::size_t points = 4001;
    const double u0 = std::log(cut_), u1 = std::log(upper);
    const double du = (u1 - u0) / static_cast<double>(points - 1);
    grid_x_.resize(points);
    grid_cdf_.assign(points, 0.0);
    auto mass = [&](double u) {  // nu(e^u) e^u
      const double x = std::exp(u);
      return tau * std::pow(x, -beta) * std::exp(-lambda * x);
    };
    grid_x_[0] = cut_;
    double prev = mass(u0);
    for (std::size_t i = 1; i < points; ++i) {
      const double u = u0 + du * static_cast<double>(i);
      const double cur = mass(u);
      grid_x_[i] = std::exp(u);
      grid_cdf_[i] = grid_cdf_[i - 1] + 0.5 * (prev + cur) * du;
      prev = cur;
    }
    large_rate_ = grid_cdf_.back();
    for (double& c : grid_cdf_) c /= large_rate_;
    return;
  }

  const double a = beta;
  if (std::fabs(a - 1.0) < 1e-12) {
    scale_ = kPi / 2.0 * tau * horizon;
    shift_ = 10.0;
  } else {
    const double sa = tau * horizon * std::tgamma(1.0 - a) * std::cos(kPi * a / 2.0) / a;
    scale_ = std::pow(sa, 1.0 / a);
    const double t = std::tan(kPi * a / 2.0);
    cms_b_ = std::atan(t) / a;
    cms_s_ = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
    shift_ = a < 1.0 ? 0.0 : 10.0;
  }
}

double TemperedStableSampler::stable_unit(Rng& rng) const {
  // Chambers-Mallows-Stuck, skewness 1, unit scale.
  const double v = kPi * (uniform_open(rng) - 0.5);
  const double w = -std::log(uniform_open(rng));
  const double a = alpha_;
  if (std::fabs(a - 1.0) < 1e-12) {
    const double hv = kPi / 2.0 + v;
    return 2.0 / kPi * (hv * std::tan(v) - std::log((kPi / 2.0) * w * std::cos(v) / hv));
  }
  const double av = a * (v + cms_b_);
  return cms_s_ * std::sin(av) / std::pow(std::cos(v), 1.0 / a) *
         std::pow(std::cos(v - av) / w, (1.0 - a) / a);
}

double TemperedStableSampler::operator()(Rng& rng) const {
  if (tau_ == 0.0) return 0.0;
  if (!rejection_) {
    std::poisson_distribution<int> count(large_rate_ * horizon_);
    std::normal_distribution<double> normal;
    double sum = small_sd_ * std::sqrt(horizon_) * normal(rng);
    const int k = count(rng);
    for (int j = 0; j < k; ++j) {
      const double u = uniform_open(rng);
      const auto it = std::lower_bound(grid_cdf_.begin(), grid_cdf_.end(), u);
      const std::size_t hi = std::clamp<std::size_t>(it - grid_cdf_.begin(), 1, grid_cdf_.size() - 1);
      const double c0 = grid_cdf_[hi - 1], c1 = grid_cdf_[hi];
      const double f = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
      sum += grid_x_[hi - 1] + f * (grid_x_[hi] - grid_x_[hi - 1]);
    }
    return sum;
  }
  for (;;) {
    const double x = stable_unit(rng);
    if (!(x > -shift_)) continue;
    const double u = uniform_open(rng);
    if (u <= std::exp(-lambda_ * scale_ * (x + shift_))) return scale_ * x;
  }
}

JumpPath simulate_jumps(const JumpParams& params, std::size_t n, Rng& rng) {
  params.validate();
  if (params.target_jump_share)
    throw DomainError("simulate_jumps: resolve target_jump_share to tau first");
  JumpPath path;
  path.increments.assign(n, 0.0);
  if (params.tau == 0.0 || n == 0) return path;
  const TemperedStableSampler sampler(params.beta, params.lambda, params.tau,
                                      1.0 / static_cast<double>(n));
  double jv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double up = sampler(rng);
    const double down = sampler(rng);
    const double d = up - down;
    path.increments[i] = d;
    jv += d * d;
  }
  path.jump_variation = jv;
  return path;
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kTDist:
      return "t";
    case NoiseKind::kAutocorrelated:
      return "autocorrelated";
    case NoiseKind::kHeteroscedastic:
      return "heteroscedastic";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& text) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "gaussian") return NoiseKind::kGaussian;
  if (s == "t" || s == "t_dist" || s == "t-distributed") return NoiseKind::kTDist;
  if (s == "autocorrelated") return NoiseKind::kAutocorrelated;
  if (s == "heteroscedastic") return NoiseKind::kHeteroscedastic;
  throw DomainError("unknown noise kind '" + text + "'");
}

void NoiseSpec::validate() const {
  if (!(gamma >= 0.0)) throw DomainError("noise: gamma must be nonnegative");
  if (kind == NoiseKind::kTDist && !(eta > 2.0))
    throw DomainError("noise: t degrees of freedom must exceed 2");
}

std::vector<double> simulate_noise(const NoiseSpec& spec, const std::vector<double>& variance_path,
                                   double integrated_variance, std::size_t n, Rng& rng) {
  spec.validate();
  std::vector<double> eps(n + 1, 0.0);
  if (spec.gamma == 0.0) return eps;
  const double dt = 1.0 / static_cast<double>(n);
  const double scale = spec.gamma * std::sqrt(integrated_variance * dt);
  std::normal_distribution<double> normal;
  switch (spec.kind) {
    case NoiseKind::kGaussian:
      for (double& e : eps) e = scale * normal(rng);
      break;
    case NoiseKind::kTDist: {
      std::student_t_distribution<double> t(spec.eta);
      const double unit = std::sqrt((spec.eta - 2.0) / spec.eta);
      for (double& e : eps) e = scale * unit * t(rng);
      break;
    }
    case NoiseKind::kAutocorrelated: {
      double prev = normal(rng);
      const double norm = 1.0 + spec.phi * spec.phi;
      for (double& e : eps) {
        const double cur = normal(rng);
        e = scale * (cur + spec.phi * prev) / norm;
        prev = cur;
      }
      break;
    }
    case NoiseKind::kHeteroscedastic: {
      if (variance_path.size() != n + 1)
        throw DomainError("noise: heteroscedastic kind needs a variance path of length n + 1");
      const double sdt = std::sqrt(dt);
      for (std::size_t i = 0; i <= n; ++i)
        eps[i] = spec.gamma * std::sqrt(std::max(variance_path[i], 0.0)) * sdt * normal(rng);
      break;
    }
  }
  return eps;
}

void ScenarioSpec::validate() const {
  if (n < 100) throw DomainError("scenario: n must be at least 100");
  heston.validate();
  if (jumps) jumps->validate();
  noise.validate();
}

double ScenarioSpec::tau() const {
  if (!jumps) return 0.0;
  if (jumps->target_jump_share) {
    const double share = *jumps->target_jump_share;
    const double target = share / (1.0 - share) * heston.sigma_sq_bar;
    return calibrate_tau(jumps->beta, jumps->lambda, target);
  }
  return jumps->tau;
}

Scenario simulate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const HestonPath hp = simulate_heston(spec.heston, spec.n, rng);
  JumpPath jp;
  if (spec.jumps) {
    JumpParams jparams = *spec.jumps;
    jparams.tau = spec.tau();
    jparams.target_jump_share.reset();
    jp = simulate_jumps(jparams, spec.n, rng);
  } else {
    jp.increments.assign(spec.n, 0.0);
  }
  Scenario out;
  out.efficient.resize(spec.n + 1);
  out.efficient[0] = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i)
    out.efficient[i + 1] = out.efficient[i] + hp.returns[i] + jp.increments[i];
  const std::vector<double> eps =
      simulate_noise(spec.noise, hp.variance, hp.integrated_variance, spec.n, rng);
  out.observed.resize(spec.n + 1);
  for (std::size_t i = 0; i <= spec.n; ++i) out.observed[i] = out.efficient[i] + eps[i];
  out.truth = {hp.integrated_variance, jp.jump_variation};
  return out;
}

std::string ScenarioSpec::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["seed"] = seed;
  j["heston"] = {{"kappa", heston.kappa},
                 {"sigma_sq_bar", heston.sigma_sq_bar},
                 {"xi", heston.xi},
                 {"rho", heston.rho}};
  if (jumps) {
    nlohmann::ordered_json jj = {{"beta", jumps->beta}, {"lambda", jumps->lambda}};
    if (jumps->target_jump_share)
      jj["target_jump_share"] = *jumps->target_jump_share;
    else
      jj["tau"] = jumps->tau;
    j["jumps"] = jj;
  } else {
    j["jumps"] = nullptr;
  }
  j["noise"] = {{"kind", noise_kind_name(noise.kind)},
                {"gamma", noise.gamma},
                {"eta", noise.eta},
                {"phi", noise.phi}};
  return j.dump(2) + "\n";
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what(), 0);
  }
  ScenarioSpec s;
  try {
    s.n = j.value("n", s.n);
    s.seed = j.value("seed", s.seed);
    if (j.contains("heston")) {
      const auto& h = j["heston"];
      s.heston.kappa = h.value("kappa", s.heston.kappa);
      s.heston.sigma_sq_bar = h.value("sigma_sq_bar", s.heston.sigma_sq_bar);
      s.heston.xi = h.value("xi", s.heston.xi);
      s.heston.rho = h.value("rho", s.heston.rho);
    }
    if (j.contains("jumps") && !j["jumps"].is_null()) {
      const auto& jj = j["jumps"];
      JumpParams jp;
      jp.beta = jj.value("beta", jp.beta);
      jp.lambda = jj.value("lambda", jp.lambda);
      jp.tau = jj.value("tau", jp.tau);
      if (jj.contains("target_jump_share"))
        jp.target_jump_share = jj["target_jump_share"].get<double>();
      s.jumps = jp;
    }
    if (j.contains("noise")) {
      const auto& nn = j["noise"];
      if (nn.contains("kind")) s.noise.kind = parse_noise_kind(nn["kind"].get<std::string>());
      s.noise.gamma = nn.value("gamma", s.noise.gamma);
      s.noise.eta = nn.value("eta", s.noise.eta);
      s.noise.phi = nn.value("phi", s.noise.phi);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what(), 0);
  }
  s.validate();
  return s;
}

}  // namespace hfjump::sim
