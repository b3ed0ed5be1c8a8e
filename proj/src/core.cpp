#include "hfjump/core.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace hfjump {

namespace {

int to_int(std::string_view s, const std::string& context) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DomainError("malformed " + context);
  return value;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

Date Date::parse(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw DomainError("malformed date '" + text + "', expected YYYY-MM-DD");
  Date d{to_int(std::string_view(text).substr(0, 4), "date year"),
         to_int(std::string_view(text).substr(5, 2), "date month"),
         to_int(std::string_view(text).substr(8, 2), "date day")};
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > d.days_in_month())
    throw DomainError("invalid calendar date '" + text + "'");
  return d;
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string Date::month_key() const { return str().substr(0, 7); }

int Date::days_in_month() const {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return kDays[(month - 1) % 12];
}

TickSeries::TickSeries(std::string symbol, Date date, std::vector<Seconds> times,
                       std::vector<double> prices, std::optional<std::vector<double>> volumes)
    : symbol_(std::move(symbol)),
      date_(date),
      times_(std::move(times)),
      prices_(std::move(prices)),
      volumes_(std::move(volumes)) {
  if (times_.size() != prices_.size()) throw DomainError("tick series: times/prices length mismatch");
  if (volumes_ && volumes_->size() != prices_.size())
    throw DomainError("tick series: volumes length mismatch");
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    if (!(prices_[i] > 0.0)) throw DomainError("tick series: non-positive price");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw DomainError("tick series: times must be strictly increasing");
    if (volumes_ && !((*volumes_)[i] >= 0.0)) throw DomainError("tick series: negative volume");
  }
}

std::vector<double> TickSeries::log_prices() const {
  std::vector<double> out(prices_.size());
  for (std::size_t i = 0; i < prices_.size(); ++i) out[i] = std::log(prices_[i]);
  return out;
}

TickSeries TickSeries::select(const std::vector<bool>& keep) const {
  std::vector<Seconds> t;
  std::vector<double> p;
  std::optional<std::vector<double>> v;
  if (volumes_) v.emplace();
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    if (!keep[i]) continue;
    t.push_back(times_[i]);
    p.push_back(prices_[i]);
    if (v) v->push_back((*volumes_)[i]);
  }
  return TickSeries(symbol_, date_, std::move(t), std::move(p), std::move(v));
}

QuoteSeries::QuoteSeries(std::string symbol, Date date, std::vector<Seconds> times,
                         std::vector<double> bids, std::vector<double> asks)
    : symbol_(std::move(symbol)),
      date_(date),
      times_(std::move(times)),
      bids_(std::move(bids)),
      asks_(std::move(asks)) {
  if (times_.size() != bids_.size() || times_.size() != asks_.size())
    throw DomainError("quote series: length mismatch");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(bids_[i] > 0.0) || !(asks_[i] > 0.0)) throw DomainError("quote series: non-positive quote");
    if (bids_[i] > asks_[i]) throw DomainError("quote series: crossed quote");
    if (i > 0 && times_[i] < times_[i - 1])
      throw DomainError("quote series: times must be nondecreasing");
  }
}

QuoteSeries QuoteSeries::select(const std::vector<bool>& keep) const {
  std::vector<Seconds> t;
  std::vector<double> b, a;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!keep[i]) continue;
    t.push_back(times_[i]);
    b.push_back(bids_[i]);
    a.push_back(asks_[i]);
  }
  return QuoteSeries(symbol_, date_, std::move(t), std::move(b), std::move(a));
}

void EstimatorConfig::validate() const {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  if (!(trunc_c > 0.0)) throw DomainError("truncation c must be positive");
  if (!(trunc_omega_bar > 0.0 && trunc_omega_bar < 0.25))
    throw DomainError("omega_bar must lie in (0, 1/4)");
  if (subsample_L < 2) throw DomainError("subsample L must be >= 2");
  if (subsample_p < 2) throw DomainError("subsample p must be >= 2");
  if (!(noise_h_exponent > 0.0) || !(noise_l_exponent > 0.0))
    throw DomainError("noise rate exponents must be positive");
}

void Announcement::validate() const {
  if (eps_std < 0.0) throw DomainError("eps_std must be nonnegative");
  if (n_analysts < 0) throw DomainError("n_analysts must be nonnegative");
  if (sic.size() != 4 || sic.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError("SIC code must have exactly 4 digits");
}

TickSeries session_slice(const TickSeries& series, const SessionWindow& window) {
  std::vector<bool> keep(series.size());
  auto t = series.times();
  for (std::size_t i = 0; i < t.size(); ++i) keep[i] = window.contains(t[i]);
  return series.select(keep);
}

QuoteSeries session_slice(const QuoteSeries& series, const SessionWindow& window) {
  std::vector<bool> keep(series.size());
  auto t = series.times();
  for (std::size_t i = 0; i < t.size(); ++i) keep[i] = window.contains(t[i]);
  return series.select(keep);
}

Seconds parse_clock(const std::string& text) {
  if (text.find(':') == std::string::npos) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      throw DomainError("malformed time '" + text + "'");
    return v;
  }
  int h = 0, m = 0;
  double s = 0.0;
  char extra = 0;
  int got = std::sscanf(text.c_str(), "%d:%d:%lf%c", &h, &m, &s, &extra);
  if (got < 2 || got > 3 || h < 0 || h > 23 || m < 0 || m > 59 || s < 0.0 || s >= 60.0)
    throw DomainError("malformed clock time '" + text + "'");
  return h * 3600.0 + m * 60.0 + s;
}

}  // namespace hfjump
