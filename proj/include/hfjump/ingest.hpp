#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfjump/core.hpp"

namespace hfjump::ingest {

// Input schemas (header row mandatory, columns located by name):
//   ticks.csv          symbol,date,time_sec,price,volume[,cond]
//   quotes.csv         symbol,date,time_sec,bid,ask
//   announcements.csv  symbol,date,time_sec,eps_actual,eps_mean,eps_std,n_analysts,sic
//   factors.csv        month,mkt,hml,smb,rmw,cma,mom,rf   (percent per month)
// Errors carry the 1-based line number of the offending row.

/// Minimal RFC 4180 reader: comma separated, optional double quotes.
struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line;  // source line of each row

  static CsvDocument parse(std::string_view text);
  /// Index of a column; throws ParseError when absent and required.
  std::optional<std::size_t> column(std::string_view name, bool required = true) const;
};

/// Rows sorted by time; rows sharing a millisecond timestamp are merged into
/// one observation at their mean price with summed volume.
TickSeries parse_ticks(std::string_view document);
std::string serialize_ticks(const TickSeries& ticks);

QuoteSeries parse_quotes(std::string_view document);

/// First observation and every later one whose price differs from the last
/// kept price.
TickSeries tick_time_sample(const TickSeries& ticks);

/// 10000 (ask - bid) / midquote. Throws CrossedQuote when bid > ask.
double spread_bps(double bid, double ask, std::size_t row = 0);

struct SpreadPoint {
  Seconds time;
  double bps;
};
std::vector<SpreadPoint> spread_series(const QuoteSeries& quotes);

/// Tick-rule trade signs. signs[i] belongs to trade first_signed + i; trades
/// before the first price change are unsigned.
struct TradeSigns {
  std::size_t first_signed = 0;
  std::vector<int> signs;
};
TradeSigns sign_trades(const TickSeries& ticks);

/// sign * volume for signed trades with time in `window`.
std::vector<double> signed_volumes(const TickSeries& ticks, const TradeSigns& signs,
                                   const SessionWindow& window);

/// (B - S) / (B + S); empty when there is no signed volume.
std::optional<double> order_imbalance(std::span<const double> signed_volumes);

/// Announcement time after checking the after-hours tape for an earlier
/// price reaction: the start of the largest one-minute move when it exceeds
/// `threshold` in absolute log terms and the minute ends no later than the
/// earliest vendor time; otherwise the earliest vendor time.
Seconds screen_announcement_time(const TickSeries& ticks, std::span<const Seconds> vendor_times,
                                 double threshold = 0.025);

struct AnnouncementLoad {
  std::vector<Announcement> announcements;
  std::size_t dropped_small_sigma = 0;  // eps_std < 0.001
  std::size_t dropped_large_z = 0;      // |z| > 10
};
AnnouncementLoad load_announcements(std::string_view document);

struct FactorMonth {
  double mkt = 0.0, hml = 0.0, smb = 0.0, rmw = 0.0, cma = 0.0, mom = 0.0, rf = 0.0;
};
/// Keyed by "YYYY-MM".
std::map<std::string, FactorMonth> load_factors(std::string_view document);

/// Whole file as a string; throws DataError when unreadable.
std::string read_file(const std::string& path);

}  // namespace hfjump::ingest
