#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hfjump/core.hpp"
#include "hfjump/ingest.hpp"

namespace hfjump::analyze {

/// (actual - mean) / std. Throws DegenerateSigma when std < 0.001.
double surprise_z(const Announcement& a);

/// 1 - bv / rv, unclipped. Throws ZeroRV when rv == 0.
double jump_proportion(double rv, double bv);

/// Common leading digits of two 4-digit SIC codes, divided by 4.
double industry_proximity(const std::string& sic_a, const std::string& sic_b);

/// Cumulative weighted price contribution across intervals. Each inner
/// vector holds one announcement's interval log-returns (equal lengths).
/// Throws ZeroTotalReturn naming the announcement whose returns sum to 0.
std::vector<double> wpc(const std::vector<std::vector<double>>& event_returns);

double logistic(double x);

struct RegressionFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  double fit = 0.0;  // adjusted R^2 (OLS) or 1 - L1/L0 (logit)
  std::size_t observations = 0;
  bool robust = false;
  // Logit only.
  double log_likelihood = 0.0;
  double null_log_likelihood = 0.0;
  int iterations = 0;

  double t_stat(Eigen::Index i) const { return coefficients(i) / standard_errors(i); }
};

/// Logistic regression by Newton-Raphson (IRLS) until the score norm drops
/// below 1e-8. Standard errors from the inverse observed information.
/// Throws RankDeficient or Separation.
RegressionFit logit_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Least squares with classical or HC1 standard errors. The fit metric is
/// adjusted R^2 (the design is expected to contain an intercept).
RegressionFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool robust = false);

/// Log-price at the last tick in [t0, t0 + horizon] minus the log-price at
/// the last tick before t0. Throws NoPreTick / NoPostTick.
double event_return(const TickSeries& ticks, Seconds t0, double horizon_sec);

enum class EntryMode { kTrade, kMidquote, kBbo };

std::string entry_mode_name(EntryMode mode);
EntryMode parse_entry_mode(const std::string& text);

struct Termination {
  enum class Kind { kEod, kMinutes, kTicks };
  Kind kind = Kind::kEod;
  double minutes = 0.0;
  int ticks = 0;

  static Termination eod() { return {}; }
  static Termination after_minutes(double m) { return {Kind::kMinutes, m, 0}; }
  static Termination after_ticks(int k) { return {Kind::kTicks, 0.0, k}; }
  /// "eod", "<m>m" or "<k>t".
  static Termination parse(const std::string& text);
  std::string str() const;
};

struct StrategyConfig {
  EntryMode mode = EntryMode::kTrade;
  double latency_sec = 0.0;
  Termination termination;
  double threshold = 0.0075;       // absolute forecast needed to trade
  double signal_horizon_sec = 60;  // return the forecast model is fit on
  Seconds end_of_day = sessions::kExtended.end();
};

struct TradeRecord {
  std::string symbol;
  std::size_t announcement = 0;  // index into the announcement list
  Date date;
  int direction = 0;  // +1 long, -1 short
  EntryMode mode = EntryMode::kTrade;
  double latency_sec = 0.0;
  Termination termination;
  double forecast = 0.0;
  Seconds entry_time = 0.0;
  double entry_price = 0.0;
  Seconds exit_time = 0.0;
  double exit_price = 0.0;
  double log_return = 0.0;
};

struct SkippedEvent {
  std::size_t announcement = 0;
  std::string reason;
};

struct BacktestSummary {
  std::size_t n_trades = 0;
  double mean_return_pct = 0.0;  // NaN without trades
  double t_stat = 0.0;           // NaN with fewer than two trades
};

struct BacktestResult {
  std::vector<TradeRecord> trades;
  std::vector<SkippedEvent> skipped;
  BacktestSummary summary;
};

/// Same-day tick and quote data keyed by (symbol, YYYY-MM-DD).
struct MarketData {
  std::map<std::pair<std::string, std::string>, TickSeries> ticks;
  std::map<std::pair<std::string, std::string>, QuoteSeries> quotes;

  void add(TickSeries t);
  void add(QuoteSeries q);
  const TickSeries* find_ticks(const std::string& symbol, const Date& date) const;
  const QuoteSeries* find_quotes(const std::string& symbol, const Date& date) const;
};

/// Called before each post-warm-up forecast with the event index and the
/// number of training rows the forecast was fit on.
using TrainingHook = std::function<void(std::size_t event, std::size_t training_rows)>;

/// Recursive earnings-surprise strategy. Announcements must be ordered by
/// (date, time). Events in the first calendar month only train the model.
BacktestResult backtest(const std::vector<Announcement>& announcements, const MarketData& data,
                        const StrategyConfig& config, const TrainingHook& hook = {});

BacktestSummary summarize(const std::vector<TradeRecord>& trades);

/// mode,latency,termination,n_trades,mean_return_pct,t_stat
std::string summary_csv(const StrategyConfig& config, const BacktestSummary& summary);

std::string trades_csv(const std::vector<TradeRecord>& trades);
std::vector<TradeRecord> parse_trades_csv(std::string_view document);

/// Weekdays in a calendar month.
int weekdays_in_month(int year, int month);

struct MonthlyPerformance {
  std::vector<std::string> months;  // YYYY-MM, contiguous
  std::vector<double> returns;      // r_m, decimal
  std::vector<double> trading;      // trade component of r_m
  std::vector<double> risk_free;    // monthly risk-free rate, decimal
  std::vector<double> excess;       // r_m - rf_m
  double sharpe = 0.0;              // annualized
  RegressionFit factor_fit;         // excess on [1, mkt, hml, smb, rmw, cma, mom]
};

/// Monthly strategy returns: the daily risk-free rate (monthly rf / weekdays)
/// on weekdays without a trade plus the log-returns of trades. Covers every
/// month from the first to the last trade. Throws MissingFactorMonth.
MonthlyPerformance monthly_perf(const std::vector<TradeRecord>& trades,
                                const std::map<std::string, ingest::FactorMonth>& factors,
                                bool robust = true);

/// Annualized Sharpe ratio of monthly excess returns: mean / sd * sqrt(12).
double sharpe_ratio(const std::vector<double>& monthly_excess);

}  // namespace hfjump::analyze
