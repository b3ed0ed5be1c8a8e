#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfjump/core.hpp"
#include "hfjump/simulate.hpp"

namespace hfjump::mc {

/// One panel row: a noise model and either the null (no beta) or a jump
/// activity index with calibrated jump share.
struct Cell {
  sim::NoiseKind noise = sim::NoiseKind::kGaussian;
  std::optional<double> beta;

  std::string label() const;  // "null" or "%.2f" of beta
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct StudyGrid {
  std::vector<Cell> scenarios;
  std::vector<double> thetas{1.0 / 3.0, 0.5, 1.0};
  std::vector<double> cs{4.0, 5.0, 6.0};
  std::size_t replications = 2000;
  double alpha = 0.05;
  std::uint64_t master_seed = 7;

  std::size_t n = 23400;
  sim::HestonParams heston;
  double lambda = 3.0;
  double jump_share = 0.2;
  sim::NoiseSpec noise;       // gamma, eta, phi; kind comes from the cell
  EstimatorConfig estimator;  // theta and trunc_c are overridden per column
  std::size_t bns_stride = 300;
  bool run_bns = true;
  bool keep_draws = false;  // retain per-replication records in the table

  void validate() const;

  /// Four noise panels, each with the null and beta in {1.75, 1.50, 1.00, 0.50}.
  static StudyGrid paper_default();

  std::string to_json() const;
  static StudyGrid from_json(const std::string& text);

  /// Scenario for replication `rep` of `cell`. Efficient paths depend on the
  /// cell's jump setting and the replication index only, so noise panels
  /// share them.
  sim::ScenarioSpec scenario(const Cell& cell, std::size_t rep) const;
};

/// Outcome of one replication across the theta x c columns.
struct Replication {
  double integrated_variance = 0.0;
  double jump_variation = 0.0;
  std::vector<double> statistic;  // [theta index * cs.size() + c index]
  std::vector<double> rv_star;        // per theta (independent of c)
  std::vector<double> bv_star_trunc;  // same layout as statistic
  double bns_p = 0.0;  // BNS statistics on efficient and observed prices
  double bns_pstar = 0.0;
};

struct CellResult {
  Cell cell;
  std::size_t replications = 0;
  std::vector<std::size_t> rejections;  // [theta index * cs.size() + c index]
  std::vector<std::size_t> degenerate;
  std::size_t bns_p_rejections = 0;
  std::size_t bns_pstar_rejections = 0;
  std::vector<Replication> draws;  // filled when keep_draws

  double rate(std::size_t index) const;
};

struct RejectionTable {
  std::vector<double> thetas;
  std::vector<double> cs;
  bool has_bns = true;
  std::vector<CellResult> cells;
  // Runtime metadata; not part of emitted documents.
  double elapsed_seconds = 0.0;
  std::size_t workers = 1;

  const CellResult& find(const Cell& cell) const;
};

/// Binomial standard error sqrt(r (1 - r) / reps).
double binomial_se(double rate, std::size_t reps);

/// Runs every replication of every cell. Results do not depend on `workers`.
/// Replications that cannot be evaluated abort the study with an error
/// naming the cell.
RejectionTable run_study(const StudyGrid& grid, std::size_t workers = 1);

/// Evaluates a single replication; exposed for tests and custom harnesses.
Replication run_replication(const StudyGrid& grid, const Cell& cell, std::size_t rep);

enum class Format { kCsv, kMarkdown };

std::string emit_table(const RejectionTable& table, Format format);

}  // namespace hfjump::mc
