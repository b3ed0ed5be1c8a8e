#include "hfjump/analyze.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

namespace hfjump::analyze {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool valid_sic(const std::string& s) {
  return s.size() == 4 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Index of the last element of `times` that is <= t, or npos.
constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::size_t last_at_or_before(std::span<const Seconds> times, Seconds t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return npos;
  return static_cast<std::size_t>(it - times.begin() - 1);
}

std::size_t last_before(std::span<const Seconds> times, Seconds t) {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return npos;
  return static_cast<std::size_t>(it - times.begin() - 1);
}

std::size_t first_at_or_after(std::span<const Seconds> times, Seconds t) {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return npos;
  return static_cast<std::size_t>(it - times.begin());
}

void check_design(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw DomainError("design and outcome lengths differ");
  if (x.cols() == 0) throw DomainError("design has no columns");
  if (x.rows() <= x.cols()) throw InsufficientData("regression needs more observations than columns");
  if (!x.allFinite() || !y.allFinite()) throw DomainError("non-finite regression input");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) throw RankDeficient("design matrix is rank deficient");
}

double log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + e^eta) computed stably
    double e = eta(i);
    double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += y(i) * e - softplus;
  }
  return ll;
}

}  // namespace

double surprise_z(const Announcement& a) {
  if (!(a.eps_std >= 0.001)) throw DegenerateSigma("eps_std below 0.001");
  return (a.eps_actual - a.eps_mean) / a.eps_std;
}

double jump_proportion(double rv, double bv) {
  if (rv == 0.0) throw ZeroRV("realized variance is zero");
  return 1.0 - bv / rv;
}

double industry_proximity(const std::string& sic_a, const std::string& sic_b) {
  if (!valid_sic(sic_a)) throw MalformedSIC("malformed SIC code '" + sic_a + "'");
  if (!valid_sic(sic_b)) throw MalformedSIC("malformed SIC code '" + sic_b + "'");
  int common = 0;
  while (common < 4 && sic_a[common] == sic_b[common]) ++common;
  return common / 4.0;
}

std::vector<double> wpc(const std::vector<std::vector<double>>& event_returns) {
  if (event_returns.empty()) return {};
  const std::size_t m = event_returns.front().size();
  std::vector<double> totals(event_returns.size());
  double abs_sum = 0.0;
  for (std::size_t a = 0; a < event_returns.size(); ++a) {
    if (event_returns[a].size() != m) throw DomainError("announcements have different interval counts");
    totals[a] = std::accumulate(event_returns[a].begin(), event_returns[a].end(), 0.0);
    if (totals[a] == 0.0)
      throw ZeroTotalReturn("announcement " + std::to_string(a) + " has zero total return", a);
    abs_sum += std::abs(totals[a]);
  }
  std::vector<double> curve(m, 0.0);
  for (std::size_t a = 0; a < event_returns.size(); ++a) {
    double w = std::abs(totals[a]) / abs_sum;
    double cum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      cum += event_returns[a][i];
      curve[i] += w * cum / totals[a];
    }
  }
  return curve;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

RegressionFit logit_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  check_design(x, y);
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) == 0.0)
      has0 = true;
    else if (y(i) == 1.0)
      has1 = true;
    else
      throw DomainError("logit outcomes must be 0 or 1");
  }
  if (!has0 || !has1) throw Separation("outcomes contain a single class");

  const Eigen::Index n = x.rows(), p = x.cols();
  constexpr int kMaxIter = 200;
  constexpr double kBlowup = 50.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd info(p, p);
  int iter = 0;
  for (;; ++iter) {
    Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = logistic(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    Eigen::VectorXd grad = x.transpose() * (y - mu);
    info = x.transpose() * w.asDiagonal() * x;
    if (grad.norm() < 1e-8) break;
    if (iter >= kMaxIter) throw Separation("logit did not converge");
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) throw Separation("information matrix became singular");
    beta += step;
    if (beta.lpNorm<Eigen::Infinity>() > kBlowup) throw Separation("coefficient divergence");
    // Converged to rounding: further steps cannot reduce the score.
    if (step.norm() < 1e-14 * (1.0 + beta.norm()) && grad.norm() < 1e-6) break;
  }
  RegressionFit fit;
  fit.coefficients = beta;
  Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  fit.standard_errors = cov.diagonal().cwiseSqrt();
  fit.observations = static_cast<std::size_t>(n);
  fit.iterations = iter;
  fit.log_likelihood = log_likelihood(x * beta, y);
  double ybar = y.mean();
  fit.null_log_likelihood = n * (ybar * std::log(ybar) + (1.0 - ybar) * std::log1p(-ybar));
  fit.fit = 1.0 - fit.log_likelihood / fit.null_log_likelihood;
  return fit;
}

RegressionFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool robust) {
  check_design(x, y);
  const Eigen::Index n = x.rows(), p = x.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - x * beta;
  Eigen::MatrixXd xtx_inv = (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd cov;
  const double dof = static_cast<double>(n - p);
  if (robust) {
    Eigen::MatrixXd meat = x.transpose() * resid.array().square().matrix().asDiagonal() * x;
    cov = (static_cast<double>(n) / dof) * xtx_inv * meat * xtx_inv;
  } else {
    cov = (resid.squaredNorm() / dof) * xtx_inv;
  }
  RegressionFit fit;
  fit.coefficients = beta;
  fit.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.observations = static_cast<std::size_t>(n);
  fit.robust = robust;
  double sst = (y.array() - y.mean()).square().sum();
  double ssr = resid.squaredNorm();
  if (sst > 0.0) {
    double r2 = 1.0 - ssr / sst;
    fit.fit = 1.0 - (1.0 - r2) * (n - 1.0) / dof;
  } else {
    fit.fit = kNaN;
  }
  return fit;
}

double event_return(const TickSeries& ticks, Seconds t0, double horizon_sec) {
  auto times = ticks.times();
  std::size_t pre = last_before(times, t0);
  if (pre == npos) throw NoPreTick("no tick before the event time");
  std::size_t post = last_at_or_before(times, t0 + horizon_sec);
  if (post == npos || times[post] < t0) throw NoPostTick("no tick within the event horizon");
  return std::log(ticks.prices()[post]) - std::log(ticks.prices()[pre]);
}

std::string entry_mode_name(EntryMode mode) {
  switch (mode) {
    case EntryMode::kTrade:
      return "trade";
    case EntryMode::kMidquote:
      return "midquote";
    case EntryMode::kBbo:
      return "bbo";
  }
  return "trade";
}

EntryMode parse_entry_mode(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "trade") return EntryMode::kTrade;
  if (t == "midquote") return EntryMode::kMidquote;
  if (t == "bbo") return EntryMode::kBbo;
  throw DomainError("unknown entry mode '" + text + "'");
}

Termination Termination::parse(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "eod") return eod();
  if (t.size() >= 2) {
    char unit = t.back();
    std::string_view num(t.data(), t.size() - 1);
    if (unit == 'm') {
      double m = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), m);
      if (ec == std::errc() && ptr == num.data() + num.size() && m > 0) return after_minutes(m);
    } else if (unit == 't') {
      int k = 0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
      if (ec == std::errc() && ptr == num.data() + num.size() && k > 0) return after_ticks(k);
    }
  }
  throw DomainError("termination must be eod, <minutes>m or <ticks>t, got '" + text + "'");
}

std::string Termination::str() const {
  switch (kind) {
    case Kind::kEod:
      return "eod";
    case Kind::kMinutes:
      return fmt("%g", minutes) + "m";
    case Kind::kTicks:
      return std::to_string(ticks) + "t";
  }
  return "eod";
}

void MarketData::add(TickSeries t) {
  auto key = std::make_pair(t.symbol(), t.date().str());
  ticks.insert_or_assign(std::move(key), std::move(t));
}

void MarketData::add(QuoteSeries q) {
  auto key = std::make_pair(q.symbol(), q.date().str());
  quotes.insert_or_assign(std::move(key), std::move(q));
}

const TickSeries* MarketData::find_ticks(const std::string& symbol, const Date& date) const {
  auto it = ticks.find({symbol, date.str()});
  return it == ticks.end() ? nullptr : &it->second;
}

const QuoteSeries* MarketData::find_quotes(const std::string& symbol, const Date& date) const {
  auto it = quotes.find({symbol, date.str()});
  return it == quotes.end() ? nullptr : &it->second;
}

namespace {

struct Entry {
  Seconds time;
  double price;
};

std::optional<Entry> find_entry(const TickSeries* ticks, const QuoteSeries* quotes, EntryMode mode,
                                int direction, Seconds from, std::string& reason) {
  if (mode == EntryMode::kTrade) {
    if (!ticks) {
      reason = "no trades";
      return std::nullopt;
    }
    std::size_t i = first_at_or_after(ticks->times(), from);
    if (i == npos) {
      reason = "no trade after entry time";
      return std::nullopt;
    }
    return Entry{ticks->times()[i], ticks->prices()[i]};
  }
  if (!quotes) {
    reason = "no quotes";
    return std::nullopt;
  }
  std::size_t i = first_at_or_after(quotes->times(), from);
  if (i == npos) {
    reason = "no quote after entry time";
    return std::nullopt;
  }
  double bid = quotes->bids()[i], ask = quotes->asks()[i];
  double price = mode == EntryMode::kMidquote ? 0.5 * (bid + ask) : (direction > 0 ? ask : bid);
  if (!(price > 0)) {
    reason = "non-positive quote at entry";
    return std::nullopt;
  }
  return Entry{quotes->times()[i], price};
}

std::optional<Entry> find_exit(const TickSeries& ticks, const Termination& term, Seconds entry_time,
                               Seconds end_of_day) {
  auto times = ticks.times();
  auto prices = ticks.prices();
  Seconds cutoff = end_of_day;
  if (term.kind == Termination::Kind::kMinutes) {
    cutoff = std::min(entry_time + 60.0 * term.minutes, end_of_day);
  } else if (term.kind == Termination::Kind::kTicks) {
    std::size_t i = last_at_or_before(times, entry_time);
    double last = i == npos ? std::numeric_limits<double>::quiet_NaN() : prices[i];
    int changes = 0;
    for (std::size_t j = i == npos ? 0 : i + 1; j < times.size() && times[j] <= end_of_day; ++j) {
      if (prices[j] != last) {
        last = prices[j];
        if (++changes == term.ticks) return Entry{times[j], prices[j]};
      }
    }
    // Fewer updates than requested before the close.
  }
  std::size_t i = last_at_or_before(times, cutoff);
  if (i == npos || !(times[i] > entry_time)) return std::nullopt;
  return Entry{times[i], prices[i]};
}

}  // namespace

BacktestResult backtest(const std::vector<Announcement>& announcements, const MarketData& data,
                        const StrategyConfig& config, const TrainingHook& hook) {
  for (std::size_t i = 1; i < announcements.size(); ++i) {
    const auto& a = announcements[i - 1];
    const auto& b = announcements[i];
    if (std::tie(b.date, b.time) < std::tie(a.date, a.time))
      throw DomainError("announcements are not time-ordered at index " + std::to_string(i));
  }
  if (!(config.threshold >= 0)) throw DomainError("threshold must be non-negative");
  if (!(config.latency_sec >= 0)) throw DomainError("latency must be non-negative");

  BacktestResult result;
  if (announcements.empty()) {
    result.summary = summarize(result.trades);
    return result;
  }
  const std::string warmup_month = announcements.front().date.month_key();

  // Training rows: z+, z-, realized signal-horizon return. Only rows from
  // events strictly before the current one are ever appended.
  std::vector<double> zp, zn, ret;

  for (std::size_t k = 0; k < announcements.size(); ++k) {
    const Announcement& a = announcements[k];
    const TickSeries* ticks = data.find_ticks(a.symbol, a.date);
    const QuoteSeries* quotes = data.find_quotes(a.symbol, a.date);
    double z = 0.0;
    try {
      z = surprise_z(a);
    } catch (const DegenerateSigma&) {
      result.skipped.push_back({k, "degenerate eps_std"});
      continue;
    }

    if (a.date.month_key() != warmup_month) {
      if (hook) hook(k, ret.size());
      std::optional<double> forecast;
      std::string why;
      if (ret.size() < 4) {
        why = "insufficient training rows";
      } else {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(ret.size()), 3);
        Eigen::VectorXd y(static_cast<Eigen::Index>(ret.size()));
        for (std::size_t i = 0; i < ret.size(); ++i) {
          auto r = static_cast<Eigen::Index>(i);
          x(r, 0) = 1.0;
          x(r, 1) = zp[i];
          x(r, 2) = zn[i];
          y(r) = ret[i];
        }
        try {
          auto fit = ols_fit(x, y);
          const auto& b = fit.coefficients;
          forecast = b(0) + b(1) * std::max(z, 0.0) + b(2) * std::min(z, 0.0);
        } catch (const RankDeficient&) {
          why = "forecast model not identified";
        }
      }
      if (!forecast) {
        result.skipped.push_back({k, why});
      } else if (std::abs(*forecast) > config.threshold) {
        int dir = *forecast > 0 ? 1 : -1;
        std::string reason;
        auto entry = find_entry(ticks, quotes, config.mode, dir, a.time + config.latency_sec, reason);
        std::optional<Entry> exit;
        if (entry) {
          if (!ticks) {
            reason = "no trades for exit";
          } else {
            exit = find_exit(*ticks, config.termination, entry->time, config.end_of_day);
            if (!exit) reason = "no transaction after entry";
          }
        }
        if (entry && exit) {
          TradeRecord t;
          t.symbol = a.symbol;
          t.announcement = k;
          t.date = a.date;
          t.direction = dir;
          t.mode = config.mode;
          t.latency_sec = config.latency_sec;
          t.termination = config.termination;
          t.forecast = *forecast;
          t.entry_time = entry->time;
          t.entry_price = entry->price;
          t.exit_time = exit->time;
          t.exit_price = exit->price;
          t.log_return = dir * (std::log(exit->price) - std::log(entry->price));
          result.trades.push_back(std::move(t));
        } else {
          result.skipped.push_back({k, reason});
        }
      }
    }

    // The event's own outcome becomes available for later forecasts.
    if (!ticks) {
      result.skipped.push_back({k, "no trades for training return"});
      continue;
    }
    try {
      double r = event_return(*ticks, a.time, config.signal_horizon_sec);
      zp.push_back(std::max(z, 0.0));
      zn.push_back(std::min(z, 0.0));
      ret.push_back(r);
    } catch (const InsufficientData& e) {
      result.skipped.push_back({k, std::string("training return: ") + e.what()});
    }
  }
  result.summary = summarize(result.trades);
  return result;
}

BacktestSummary summarize(const std::vector<TradeRecord>& trades) {
  BacktestSummary s;
  s.n_trades = trades.size();
  if (trades.empty()) {
    s.mean_return_pct = kNaN;
    s.t_stat = kNaN;
    return s;
  }
  double mean = 0.0;
  for (const auto& t : trades) mean += t.log_return;
  mean /= static_cast<double>(trades.size());
  s.mean_return_pct = 100.0 * mean;
  if (trades.size() < 2) {
    s.t_stat = kNaN;
    return s;
  }
  // HC1 on an intercept-only regression.
  double ss = 0.0;
  for (const auto& t : trades) ss += (t.log_return - mean) * (t.log_return - mean);
  double n = static_cast<double>(trades.size());
  double se = std::sqrt(ss / (n * (n - 1.0)));
  s.t_stat = se > 0 ? mean / se : (mean == 0 ? kNaN : std::copysign(INFINITY, mean));
  return s;
}

std::string summary_csv(const StrategyConfig& config, const BacktestSummary& summary) {
  std::string out = "mode,latency,termination,n_trades,mean_return_pct,t_stat\n";
  out += entry_mode_name(config.mode) + "," + fmt("%g", config.latency_sec) + "," +
         config.termination.str() + "," + std::to_string(summary.n_trades) + "," +
         fmt("%.6f", summary.mean_return_pct) + "," + fmt("%.4f", summary.t_stat) + "\n";
  return out;
}

std::string trades_csv(const std::vector<TradeRecord>& trades) {
  std::string out =
      "symbol,announcement,date,direction,mode,latency,termination,forecast,entry_time,entry_price,"
      "exit_time,exit_price,log_return\n";
  for (const auto& t : trades) {
    out += t.symbol + "," + std::to_string(t.announcement) + "," + t.date.str() + "," +
           (t.direction > 0 ? "long" : "short") + "," + entry_mode_name(t.mode) + "," +
           fmt("%g", t.latency_sec) + "," + t.termination.str() + "," + fmt("%.17g", t.forecast) + "," +
           fmt("%.3f", t.entry_time) + "," + fmt("%.17g", t.entry_price) + "," +
           fmt("%.3f", t.exit_time) + "," + fmt("%.17g", t.exit_price) + "," +
           fmt("%.17g", t.log_return) + "\n";
  }
  return out;
}

std::vector<TradeRecord> parse_trades_csv(std::string_view document) {
  auto doc = ingest::CsvDocument::parse(document);
  std::vector<TradeRecord> trades;
  if (doc.header.empty()) return trades;
  auto col = [&](const char* name) { return *doc.column(name); };
  const std::size_t c_sym = col("symbol"), c_date = col("date"), c_dir = col("direction"),
                    c_ret = col("log_return");
  auto opt = [&](const char* name) { return doc.column(name, false); };
  auto c_ann = opt("announcement"), c_mode = opt("mode"), c_lat = opt("latency"),
       c_term = opt("termination"), c_fc = opt("forecast"), c_et = opt("entry_time"),
       c_ep = opt("entry_price"), c_xt = opt("exit_time"), c_xp = opt("exit_price");
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::size_t line = doc.line[r];
    auto num = [&](std::size_t c) {
      if (c >= row.size()) throw ParseError("missing field", line);
      const std::string& s = row[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("invalid number '" + s + "'", line);
      return v;
    };
    auto text = [&](std::size_t c) -> const std::string& {
      if (c >= row.size()) throw ParseError("missing field", line);
      return row[c];
    };
    TradeRecord t;
    try {
      t.symbol = text(c_sym);
      t.date = Date::parse(text(c_date));
      const std::string& d = text(c_dir);
      if (d == "long" || d == "1" || d == "+1")
        t.direction = 1;
      else if (d == "short" || d == "-1")
        t.direction = -1;
      else
        throw ParseError("invalid direction '" + d + "'", line);
      t.log_return = num(c_ret);
      if (c_ann) t.announcement = static_cast<std::size_t>(num(*c_ann));
      if (c_mode) t.mode = parse_entry_mode(text(*c_mode));
      if (c_lat) t.latency_sec = num(*c_lat);
      if (c_term) t.termination = Termination::parse(text(*c_term));
      if (c_fc) t.forecast = num(*c_fc);
      if (c_et) t.entry_time = num(*c_et);
      if (c_ep) t.entry_price = num(*c_ep);
      if (c_xt) t.exit_time = num(*c_xt);
      if (c_xp) t.exit_price = num(*c_xp);
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    }
    trades.push_back(std::move(t));
  }
  return trades;
}

namespace {

int weekday(const Date& d) {
  int y = d.year, m = d.month;
  if (m < 3) {
    m += 12;
    y -= 1;
  }
  int h = (d.day + 13 * (m + 1) / 5 + y + y / 4 - y / 100 + y / 400) % 7;
  return (h + 6) % 7;  // 0 = Sunday
}

}  // namespace

int weekdays_in_month(int year, int month) {
  Date d{year, month, 1};
  int days = d.days_in_month();
  int count = 0;
  for (d.day = 1; d.day <= days; ++d.day) {
    int w = weekday(d);
    if (w != 0 && w != 6) ++count;
  }
  return count;
}

double sharpe_ratio(const std::vector<double>& monthly_excess) {
  if (monthly_excess.size() < 2) return kNaN;
  double n = static_cast<double>(monthly_excess.size());
  double mean = std::accumulate(monthly_excess.begin(), monthly_excess.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : monthly_excess) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / (n - 1.0));
  return sd > 0 ? mean / sd * std::sqrt(12.0) : kNaN;
}

MonthlyPerformance monthly_perf(const std::vector<TradeRecord>& trades,
                                const std::map<std::string, ingest::FactorMonth>& factors,
                                bool robust) {
  MonthlyPerformance perf;
  if (trades.empty()) return perf;
  std::map<std::string, double> trading;   // month -> sum of trade returns
  std::map<std::string, std::set<int>> signal_days;  // month -> weekday dates with trades
  Date first = trades.front().date, last = trades.front().date;
  for (const auto& t : trades) {
    first = std::min(first, t.date);
    last = std::max(last, t.date);
    trading[t.date.month_key()] += t.log_return;
    int w = weekday(t.date);
    if (w != 0 && w != 6) signal_days[t.date.month_key()].insert(t.date.day);
  }

  for (int y = first.year, m = first.month; y < last.year || (y == last.year && m <= last.month);) {
    Date d{y, m, 1};
    std::string key = d.month_key();
    auto f = factors.find(key);
    if (f == factors.end()) throw MissingFactorMonth("factor data missing for month " + key, 0);
    double rf = f->second.rf / 100.0;
    int nm = weekdays_in_month(y, m);
    double rf_daily = rf / nm;
    int active = signal_days.count(key) ? static_cast<int>(signal_days[key].size()) : 0;
    double tr = trading.count(key) ? trading[key] : 0.0;
    double r = (nm - active) * rf_daily + tr;
    perf.months.push_back(key);
    perf.trading.push_back(tr);
    perf.risk_free.push_back(rf);
    perf.returns.push_back(r);
    perf.excess.push_back(r - rf);
    if (++m > 12) {
      m = 1;
      ++y;
    }
  }
  perf.sharpe = sharpe_ratio(perf.excess);

  const auto n = static_cast<Eigen::Index>(perf.months.size());
  if (n > 7) {
    Eigen::MatrixXd x(n, 7);
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& fm = factors.at(perf.months[static_cast<std::size_t>(i)]);
      x(i, 0) = 1.0;
      x(i, 1) = fm.mkt / 100.0;
      x(i, 2) = fm.hml / 100.0;
      x(i, 3) = fm.smb / 100.0;
      x(i, 4) = fm.rmw / 100.0;
      x(i, 5) = fm.cma / 100.0;
      x(i, 6) = fm.mom / 100.0;
      yv(i) = perf.excess[static_cast<std::size_t>(i)];
    }
    perf.factor_fit = ols_fit(x, yv, robust);
  }
  return perf;
}

}  // namespace hfjump::analyze
