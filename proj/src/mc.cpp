#include "hfjump/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "hfjump/jumptest.hpp"
#include "hfjump/preavg.hpp"
#include "hfjump/stats.hpp"

namespace hfjump::mc {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt_param(double v) { return fmt("%.6g", v); }
std::string fmt_rate(double v) { return fmt("%.4f", v); }

std::uint64_t cell_stream(const Cell& cell) {
  return cell.beta ? 1 + static_cast<std::uint64_t>(std::llround(*cell.beta * 1000.0)) : 0;
}

std::string cell_name(const Cell& cell) {
  return sim::noise_kind_name(cell.noise) + "/" + cell.label();
}

}  // namespace

std::string Cell::label() const { return beta ? fmt("%.2f", *beta) : "null"; }

void StudyGrid::validate() const {
  if (scenarios.empty()) throw DomainError("study grid has no scenarios");
  if (thetas.empty() || cs.empty()) throw DomainError("study grid needs thetas and cs");
  if (replications < 100) throw DomainError("study grid needs at least 100 replications");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("study alpha must lie in (0, 1)");
  if (!(jump_share > 0.0 && jump_share < 1.0)) throw DomainError("jump share must lie in (0, 1)");
  if (bns_stride == 0) throw DomainError("bns stride must be positive");
  for (double t : thetas)
    if (!(t > 0.0)) throw DomainError("theta must be positive");
  for (double c : cs)
    if (!(c > 0.0)) throw DomainError("c must be positive");
  heston.validate();
  estimator.validate();
}

StudyGrid StudyGrid::paper_default() {
  StudyGrid g;
  for (auto kind : {sim::NoiseKind::kGaussian, sim::NoiseKind::kTDist,
                    sim::NoiseKind::kAutocorrelated, sim::NoiseKind::kHeteroscedastic}) {
    g.scenarios.push_back({kind, std::nullopt});
    for (double b : {1.75, 1.50, 1.00, 0.50}) g.scenarios.push_back({kind, b});
  }
  return g;
}

sim::ScenarioSpec StudyGrid::scenario(const Cell& cell, std::size_t rep) const {
  sim::ScenarioSpec s;
  s.n = n;
  s.heston = heston;
  if (cell.beta) {
    sim::JumpParams j;
    j.beta = *cell.beta;
    j.lambda = lambda;
    j.target_jump_share = jump_share;
    s.jumps = j;
  }
  s.noise = noise;
  s.noise.kind = cell.noise;
  s.seed = sim::derive_seed(master_seed, cell_stream(cell), rep);
  return s;
}

std::string StudyGrid::to_json() const {
  nlohmann::ordered_json j;
  j["replications"] = replications;
  j["alpha"] = alpha;
  j["master_seed"] = master_seed;
  j["n"] = n;
  j["thetas"] = thetas;
  j["cs"] = cs;
  j["L"] = estimator.subsample_L;
  j["p"] = estimator.subsample_p;
  j["omega_bar"] = estimator.trunc_omega_bar;
  j["lambda"] = lambda;
  j["jump_share"] = jump_share;
  j["noise"] = {{"gamma", noise.gamma}, {"eta", noise.eta}, {"phi", noise.phi}};
  j["bns"] = run_bns;
  j["bns_stride"] = bns_stride;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : scenarios) {
    nlohmann::ordered_json cj;
    cj["noise"] = sim::noise_kind_name(c.noise);
    if (c.beta)
      cj["beta"] = *c.beta;
    else
      cj["beta"] = nullptr;
    cells.push_back(cj);
  }
  j["scenarios"] = cells;
  return j.dump(2) + "\n";
}

StudyGrid StudyGrid::from_json(const std::string& text) {
  StudyGrid g = paper_default();
  try {
    const auto j = nlohmann::json::parse(text);
    g.replications = j.value("replications", g.replications);
    g.alpha = j.value("alpha", g.alpha);
    g.master_seed = j.value("master_seed", g.master_seed);
    g.n = j.value("n", g.n);
    if (j.contains("thetas")) g.thetas = j["thetas"].get<std::vector<double>>();
    if (j.contains("cs")) g.cs = j["cs"].get<std::vector<double>>();
    g.estimator.subsample_L = j.value("L", g.estimator.subsample_L);
    g.estimator.subsample_p = j.value("p", g.estimator.subsample_p);
    g.estimator.trunc_omega_bar = j.value("omega_bar", g.estimator.trunc_omega_bar);
    g.lambda = j.value("lambda", g.lambda);
    g.jump_share = j.value("jump_share", g.jump_share);
    if (j.contains("noise")) {
      const auto& nn = j["noise"];
      g.noise.gamma = nn.value("gamma", g.noise.gamma);
      g.noise.eta = nn.value("eta", g.noise.eta);
      g.noise.phi = nn.value("phi", g.noise.phi);
    }
    g.run_bns = j.value("bns", g.run_bns);
    g.bns_stride = j.value("bns_stride", g.bns_stride);
    if (j.contains("scenarios")) {
      g.scenarios.clear();
      for (const auto& cj : j["scenarios"]) {
        Cell c;
        c.noise = sim::parse_noise_kind(cj.value("noise", std::string("gaussian")));
        if (cj.contains("beta") && !cj["beta"].is_null()) c.beta = cj["beta"].get<double>();
        g.scenarios.push_back(c);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("study grid: ") + e.what(), 0);
  }
  g.validate();
  return g;
}

double CellResult::rate(std::size_t index) const {
  return static_cast<double>(rejections.at(index)) / static_cast<double>(replications);
}

const CellResult& RejectionTable::find(const Cell& cell) const {
  for (const auto& c : cells)
    if (c.cell == cell) return c;
  throw DomainError("no such cell in rejection table: " + cell_name(cell));
}

double binomial_se(double rate, std::size_t reps) {
  if (reps == 0) return std::nan("");
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

Replication run_replication(const StudyGrid& grid, const Cell& cell, std::size_t rep) {
  const sim::Scenario sc = sim::simulate_scenario(grid.scenario(cell, rep));
  Replication out;
  out.integrated_variance = sc.truth.integrated_variance;
  out.jump_variation = sc.truth.jump_variation;
  const std::size_t nc = grid.cs.size();
  out.statistic.resize(grid.thetas.size() * nc);
  out.rv_star.resize(grid.thetas.size());
  out.bv_star_trunc.resize(grid.thetas.size() * nc);

  EstimatorConfig cfg = grid.estimator;
  const double noise_var = preavg::noise_variance(sc.observed, cfg);
  for (std::size_t t = 0; t < grid.thetas.size(); ++t) {
    cfg.theta = grid.thetas[t];
    const preavg::PreAvgReturns pre = preavg::preaveraged_returns(sc.observed, cfg);
    for (std::size_t c = 0; c < nc; ++c) {
      cfg.trunc_c = grid.cs[c];
      const auto r = jumptest::jump_statistic(pre, noise_var, cfg, grid.alpha);
      out.statistic[t * nc + c] = r.statistic;
      out.bv_star_trunc[t * nc + c] = r.bv_star_trunc;
      out.rv_star[t] = r.rv_star;
    }
  }
  if (grid.run_bns) {
    std::vector<double> e, o;
    for (std::size_t i = 0; i < sc.efficient.size(); i += grid.bns_stride) {
      e.push_back(sc.efficient[i]);
      o.push_back(sc.observed[i]);
    }
    out.bns_p = jumptest::bns_test(e, jumptest::BnsVariant::kLinear, grid.alpha).statistic;
    out.bns_pstar = jumptest::bns_test(o, jumptest::BnsVariant::kLinear, grid.alpha).statistic;
  }
  return out;
}

RejectionTable run_study(const StudyGrid& grid, std::size_t workers) {
  grid.validate();
  if (workers == 0) workers = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t reps = grid.replications;
  const std::size_t total = grid.scenarios.size() * reps;

  std::vector<std::vector<Replication>> results(grid.scenarios.size(),
                                                std::vector<Replication>(reps));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_index = total;
  std::string error_message;

  auto work = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total || failed.load()) return;
      const std::size_t cell = idx / reps;
      const std::size_t rep = idx % reps;
      try {
        results[cell][rep] = run_replication(grid, grid.scenarios[cell], rep);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (idx < error_index) {
          error_index = idx;
          error_message = e.what();
        }
        failed.store(true);
      }
    }
  };
  const std::size_t nthreads = std::min(workers, total);
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < nthreads; ++i) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (failed.load()) {
    const Cell& c = grid.scenarios[error_index / reps];
    throw Error("study cell " + cell_name(c) + ", replication " +
                std::to_string(error_index % reps) + ": " + error_message);
  }

  RejectionTable table;
  table.thetas = grid.thetas;
  table.cs = grid.cs;
  table.has_bns = grid.run_bns;
  table.workers = nthreads;
  const double crit = stats::norm_quantile(1.0 - grid.alpha);
  const std::size_t ncols = grid.thetas.size() * grid.cs.size();
  for (std::size_t ci = 0; ci < grid.scenarios.size(); ++ci) {
    CellResult cr;
    cr.cell = grid.scenarios[ci];
    cr.replications = reps;
    cr.rejections.assign(ncols, 0);
    cr.degenerate.assign(ncols, 0);
    for (const Replication& r : results[ci]) {
      for (std::size_t k = 0; k < ncols; ++k) {
        if (std::isnan(r.statistic[k]))
          ++cr.degenerate[k];
        else if (r.statistic[k] > crit)
          ++cr.rejections[k];
      }
      if (grid.run_bns) {
        cr.bns_p_rejections += r.bns_p > crit;
        cr.bns_pstar_rejections += r.bns_pstar > crit;
      }
    }
    if (grid.keep_draws) cr.draws = std::move(results[ci]);
    table.cells.push_back(std::move(cr));
  }
  table.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return table;
}

std::string emit_table(const RejectionTable& table, Format format) {
  const std::size_t nc = table.cs.size();
  std::string out;
  if (format == Format::kCsv) {
    out = "panel,beta_or_null,theta,c,rate,se,reps\n";
    for (const auto& cell : table.cells) {
      const std::string head = sim::noise_kind_name(cell.cell.noise) + "," + cell.cell.label() + ",";
      const std::string reps = std::to_string(cell.replications);
      auto row = [&](const std::string& theta, const std::string& c, std::size_t hits) {
        const double r = static_cast<double>(hits) / static_cast<double>(cell.replications);
        out += head + theta + "," + c + "," + fmt_rate(r) + "," +
               fmt_rate(binomial_se(r, cell.replications)) + "," + reps + "\n";
      };
      for (std::size_t t = 0; t < table.thetas.size(); ++t)
        for (std::size_t c = 0; c < nc; ++c)
          row(fmt_param(table.thetas[t]), fmt_param(table.cs[c]), cell.rejections[t * nc + c]);
      if (table.has_bns) {
        row("bns", "p", cell.bns_p_rejections);
        row("bns", "p*", cell.bns_pstar_rejections);
      }
    }
    return out;
  }

  std::vector<sim::NoiseKind> panels;
  for (const auto& cell : table.cells)
    if (std::find(panels.begin(), panels.end(), cell.cell.noise) == panels.end())
      panels.push_back(cell.cell.noise);
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    if (pi) out += "\n";
    out += "### " + sim::noise_kind_name(panels[pi]) + "\n\n| beta_or_null |";
    std::string rule = "|---|";
    for (double t : table.thetas)
      for (double c : table.cs) {
        out += " theta=" + fmt_param(t) + " c=" + fmt_param(c) + " |";
        rule += "---|";
      }
    if (table.has_bns) {
      out += " p | p* |";
      rule += "---|---|";
    }
    out += "\n" + rule + "\n";
    for (const auto& cell : table.cells) {
      if (cell.cell.noise != panels[pi]) continue;
      out += "| " + cell.cell.label() + " |";
      for (std::size_t k = 0; k < cell.rejections.size(); ++k) out += " " + fmt_rate(cell.rate(k)) + " |";
      if (table.has_bns) {
        const double reps = static_cast<double>(cell.replications);
        out += " " + fmt_rate(cell.bns_p_rejections / reps) + " |";
        out += " " + fmt_rate(cell.bns_pstar_rejections / reps) + " |";
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace hfjump::mc
