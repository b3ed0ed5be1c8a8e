#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfjump/errors.hpp"

namespace hfjump {

/// Seconds since midnight, exchange local time (Eastern), millisecond resolution.
using Seconds = double;

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static Date parse(const std::string& text);  // YYYY-MM-DD
  std::string str() const;
  /// "YYYY-MM" month key.
  std::string month_key() const;
  /// Days in this date's month (Gregorian).
  int days_in_month() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Half-open time window [start, end).
class SessionWindow {
 public:
  constexpr SessionWindow(Seconds start, Seconds end) : start_(start), end_(end) {
    if (!(start < end)) throw DomainError("session window requires start < end");
  }
  constexpr Seconds start() const noexcept { return start_; }
  constexpr Seconds end() const noexcept { return end_; }
  constexpr bool contains(Seconds t) const noexcept { return start_ <= t && t < end_; }

 private:
  Seconds start_;
  Seconds end_;
};

namespace sessions {
inline constexpr SessionWindow kRegular{34200.0, 57600.0};     // 09:30 - 16:00
inline constexpr SessionWindow kExtended{34200.0, 66600.0};    // 09:30 - 18:30
inline constexpr SessionWindow kAfterHours{57600.0, 66600.0};  // 16:00 - 18:30
inline constexpr SessionWindow kPreMarket{21600.0, 34200.0};   // 06:00 - 09:30
}  // namespace sessions

/// Transaction prices of one symbol over one session.
///
/// Times are strictly increasing, prices strictly positive, and the optional
/// volume column has the same length as the prices.
class TickSeries {
 public:
  TickSeries() = default;
  TickSeries(std::string symbol, Date date, std::vector<Seconds> times,
             std::vector<double> prices, std::optional<std::vector<double>> volumes = std::nullopt);

  const std::string& symbol() const noexcept { return symbol_; }
  const Date& date() const noexcept { return date_; }
  std::span<const Seconds> times() const noexcept { return times_; }
  std::span<const double> prices() const noexcept { return prices_; }
  bool has_volumes() const noexcept { return volumes_.has_value(); }
  std::span<const double> volumes() const noexcept {
    return volumes_ ? std::span<const double>(*volumes_) : std::span<const double>();
  }
  std::size_t size() const noexcept { return prices_.size(); }
  bool empty() const noexcept { return prices_.empty(); }

  /// Natural-log prices, computed on demand.
  std::vector<double> log_prices() const;

  /// Observations i with keep[i] true, order preserved.
  TickSeries select(const std::vector<bool>& keep) const;

  friend bool operator==(const TickSeries&, const TickSeries&) = default;

 private:
  std::string symbol_;
  Date date_;
  std::vector<Seconds> times_;
  std::vector<double> prices_;
  std::optional<std::vector<double>> volumes_;
};

/// Best bid/ask snapshots. Times are nondecreasing and bid <= ask.
class QuoteSeries {
 public:
  QuoteSeries() = default;
  QuoteSeries(std::string symbol, Date date, std::vector<Seconds> times, std::vector<double> bids,
              std::vector<double> asks);

  const std::string& symbol() const noexcept { return symbol_; }
  const Date& date() const noexcept { return date_; }
  std::span<const Seconds> times() const noexcept { return times_; }
  std::span<const double> bids() const noexcept { return bids_; }
  std::span<const double> asks() const noexcept { return asks_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  QuoteSeries select(const std::vector<bool>& keep) const;

  friend bool operator==(const QuoteSeries&, const QuoteSeries&) = default;

 private:
  std::string symbol_;
  Date date_;
  std::vector<Seconds> times_;
  std::vector<double> bids_;
  std::vector<double> asks_;
};

enum class WeightFunction { kMinX1MinusX };

/// Tuning of the pre-averaging jump test.
struct EstimatorConfig {
  double theta = 0.5;             // k_n = floor(theta * sqrt(n))
  double trunc_c = 5.0;           // local diffusive standard deviations
  double trunc_omega_bar = 0.24;  // u_n = c sqrt(BV(1,1)) n^-omega_bar
  int subsample_L = 10;
  int subsample_p = 10;
  double noise_h_exponent = 0.2;    // h_n = ceil(n^x)
  double noise_l_exponent = 0.125;  // l_n = ceil(n^x)
  WeightFunction weight = WeightFunction::kMinX1MinusX;

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// Earnings release metadata.
struct Announcement {
  std::string symbol;
  Date date;
  Seconds time = 0.0;
  double eps_actual = 0.0;
  double eps_mean = 0.0;
  double eps_std = 0.0;
  int n_analysts = 0;
  std::string sic;

  void validate() const;
};

/// Observations with window.start() <= t < window.end().
TickSeries session_slice(const TickSeries& series, const SessionWindow& window);
QuoteSeries session_slice(const QuoteSeries& series, const SessionWindow& window);

/// Parses "HH:MM[:SS]" or plain decimal seconds.
Seconds parse_clock(const std::string& text);

}  // namespace hfjump
