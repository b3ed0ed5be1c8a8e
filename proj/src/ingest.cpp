#include "hfjump/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hfjump::ingest {

namespace {

constexpr double kEpsStdFloor = 0.001;
constexpr double kMaxAbsZ = 10.0;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double to_double(const std::string& s, std::size_t row, const char* field) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last)
    throw ParseError(std::string("malformed ") + field + " '" + s + "'", row);
  return v;
}

long to_long(const std::string& s, std::size_t row, const char* field) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(std::string("malformed ") + field + " '" + s + "'", row);
  return v;
}

Date to_date(const std::string& s, std::size_t row) {
  try {
    return Date::parse(s);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), row);
  }
}

Seconds to_clock(const std::string& s, std::size_t row) {
  try {
    return parse_clock(s);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), row);
  }
}

const std::string& field(const CsvDocument& doc, std::size_t r, std::size_t c) {
  const auto& row = doc.rows[r];
  if (c >= row.size())
    throw ParseError("row has " + std::to_string(row.size()) + " fields, expected at least " +
                         std::to_string(c + 1),
                     doc.line[r]);
  return row[c];
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Symbol and date shared by every row of a single-series file.
struct SeriesKey {
  std::string symbol;
  Date date;
};

SeriesKey series_key(const CsvDocument& doc, std::size_t sym_col, std::size_t date_col) {
  SeriesKey key{field(doc, 0, sym_col), to_date(field(doc, 0, date_col), doc.line[0])};
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    if (field(doc, r, sym_col) != key.symbol)
      throw ParseError("file mixes symbols '" + key.symbol + "' and '" + field(doc, r, sym_col) + "'",
                       doc.line[r]);
    if (!(to_date(field(doc, r, date_col), doc.line[r]) == key.date))
      throw ParseError("file mixes dates", doc.line[r]);
  }
  return key;
}

}  // namespace

CsvDocument CsvDocument::parse(std::string_view text) {
  CsvDocument doc;
  std::size_t pos = 0, line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false, any = false;
    const std::size_t start_line = line_no + 1;
    for (; pos < text.size(); ++pos) {
      const char ch = text[pos];
      if (quoted) {
        if (ch == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            cur += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_no;
          cur += ch;
        }
        continue;
      }
      if (ch == '"') {
        quoted = true;
        any = true;
      } else if (ch == ',') {
        fields.push_back(trim(cur));
        cur.clear();
        any = true;
      } else if (ch == '\n') {
        ++pos;
        break;
      } else if (ch != '\r') {
        cur += ch;
        if (!std::isspace(static_cast<unsigned char>(ch))) any = true;
      }
    }
    ++line_no;
    if (quoted) throw ParseError("unterminated quoted field", start_line);
    if (!any) continue;  // blank line
    fields.push_back(trim(cur));
    if (!have_header) {
      doc.header = std::move(fields);
      have_header = true;
    } else {
      doc.rows.push_back(std::move(fields));
      doc.line.push_back(start_line);
    }
  }
  return doc;
}

std::optional<std::size_t> CsvDocument::column(std::string_view name, bool required) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  if (required) throw ParseError("missing column '" + std::string(name) + "'", 1);
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TickSeries parse_ticks(std::string_view document) {
  const CsvDocument doc = CsvDocument::parse(document);
  if (doc.header.empty() || doc.rows.empty()) return TickSeries();
  const std::size_t c_sym = *doc.column("symbol"), c_date = *doc.column("date"),
                    c_time = *doc.column("time_sec"), c_price = *doc.column("price");
  const auto c_vol = doc.column("volume", false);
  const SeriesKey key = series_key(doc, c_sym, c_date);

  struct Row {
    long long ms;
    Seconds time;
    double price;
    double volume;
    bool has_volume;
  };
  std::vector<Row> rows;
  rows.reserve(doc.rows.size());
  std::size_t with_volume = 0;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const std::size_t line = doc.line[r];
    Row row{};
    row.time = to_clock(field(doc, r, c_time), line);
    row.ms = std::llround(row.time * 1000.0);
    row.price = to_double(field(doc, r, c_price), line, "price");
    if (!(row.price > 0.0)) throw NonPositivePrice("non-positive price " + field(doc, r, c_price), line);
    if (c_vol && !field(doc, r, *c_vol).empty()) {
      row.volume = to_double(field(doc, r, *c_vol), line, "volume");
      if (row.volume < 0.0) throw ParseError("negative volume", line);
      row.has_volume = true;
      ++with_volume;
    }
    rows.push_back(row);
  }
  if (with_volume != 0 && with_volume != rows.size()) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (!rows[r].has_volume) throw ParseError("missing volume", doc.line[r]);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.ms < b.ms; });

  std::vector<Seconds> times;
  std::vector<double> prices, volumes;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    double psum = 0.0, vsum = 0.0;
    while (j < rows.size() && rows[j].ms == rows[i].ms) {
      psum += rows[j].price;
      vsum += rows[j].volume;
      ++j;
    }
    times.push_back(static_cast<double>(rows[i].ms) / 1000.0);
    prices.push_back(psum / static_cast<double>(j - i));
    volumes.push_back(vsum);
    i = j;
  }
  std::optional<std::vector<double>> vol;
  if (with_volume) vol = std::move(volumes);
  return TickSeries(key.symbol, key.date, std::move(times), std::move(prices), std::move(vol));
}

std::string serialize_ticks(const TickSeries& ticks) {
  std::string out = "symbol,date,time_sec,price,volume\n";
  const auto t = ticks.times();
  const auto p = ticks.prices();
  const auto v = ticks.volumes();
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    out += ticks.symbol() + "," + ticks.date().str() + "," + fmt17(t[i]) + "," + fmt17(p[i]) + ",";
    if (ticks.has_volumes()) out += fmt17(v[i]);
    out += "\n";
  }
  return out;
}

QuoteSeries parse_quotes(std::string_view document) {
  const CsvDocument doc = CsvDocument::parse(document);
  if (doc.header.empty() || doc.rows.empty()) return QuoteSeries();
  const std::size_t c_sym = *doc.column("symbol"), c_date = *doc.column("date"),
                    c_time = *doc.column("time_sec"), c_bid = *doc.column("bid"),
                    c_ask = *doc.column("ask");
  const SeriesKey key = series_key(doc, c_sym, c_date);
  struct Row {
    Seconds time;
    double bid, ask;
    std::size_t line;
  };
  std::vector<Row> rows;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const std::size_t line = doc.line[r];
    Row row{to_clock(field(doc, r, c_time), line), to_double(field(doc, r, c_bid), line, "bid"),
            to_double(field(doc, r, c_ask), line, "ask"), line};
    if (!(row.bid > 0.0) || !(row.ask > 0.0))
      throw NonPositivePrice("non-positive quote", line);
    if (row.bid > row.ask) throw CrossedQuote("crossed quote: bid exceeds ask", line);
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
  std::vector<Seconds> times;
  std::vector<double> bids, asks;
  for (const Row& r : rows) {
    times.push_back(r.time);
    bids.push_back(r.bid);
    asks.push_back(r.ask);
  }
  return QuoteSeries(key.symbol, key.date, std::move(times), std::move(bids), std::move(asks));
}

TickSeries tick_time_sample(const TickSeries& ticks) {
  std::vector<bool> keep(ticks.size(), false);
  const auto p = ticks.prices();
  double last = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i == 0 || p[i] != last) {
      keep[i] = true;
      last = p[i];
    }
  }
  return ticks.select(keep);
}

double spread_bps(double bid, double ask, std::size_t row) {
  if (bid > ask) throw CrossedQuote("crossed quote: bid exceeds ask", row);
  const double mid = 0.5 * (bid + ask);
  if (!(mid > 0.0)) throw NonPositivePrice("non-positive midquote", row);
  return 10000.0 * (ask - bid) / mid;
}

std::vector<SpreadPoint> spread_series(const QuoteSeries& quotes) {
  std::vector<SpreadPoint> out;
  out.reserve(quotes.size());
  const auto t = quotes.times();
  const auto b = quotes.bids();
  const auto a = quotes.asks();
  for (std::size_t i = 0; i < quotes.size(); ++i) out.push_back({t[i], spread_bps(b[i], a[i], i + 1)});
  return out;
}

TradeSigns sign_trades(const TickSeries& ticks) {
  TradeSigns out;
  const auto p = ticks.prices();
  std::size_t first = p.size();
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] != p[i - 1]) {
      first = i;
      break;
    }
  out.first_signed = first;
  int sign = 0;
  for (std::size_t i = first; i < p.size(); ++i) {
    if (p[i] > p[i - 1])
      sign = 1;
    else if (p[i] < p[i - 1])
      sign = -1;
    out.signs.push_back(sign);
  }
  return out;
}

std::vector<double> signed_volumes(const TickSeries& ticks, const TradeSigns& signs,
                                   const SessionWindow& window) {
  if (!ticks.has_volumes()) throw DomainError("order imbalance requires trade volumes");
  std::vector<double> out;
  const auto t = ticks.times();
  const auto v = ticks.volumes();
  for (std::size_t i = 0; i < signs.signs.size(); ++i) {
    const std::size_t idx = signs.first_signed + i;
    if (window.contains(t[idx])) out.push_back(signs.signs[i] * v[idx]);
  }
  return out;
}

std::optional<double> order_imbalance(std::span<const double> signed_volumes) {
  double buy = 0.0, sell = 0.0;
  for (double x : signed_volumes) {
    if (x > 0.0)
      buy += x;
    else
      sell -= x;
  }
  if (!(buy + sell > 0.0)) return std::nullopt;
  return (buy - sell) / (buy + sell);
}

Seconds screen_announcement_time(const TickSeries& ticks, std::span<const Seconds> vendor_times,
                                 double threshold) {
  if (vendor_times.empty()) throw DomainError("screening needs at least one vendor time");
  const Seconds earliest = *std::min_element(vendor_times.begin(), vendor_times.end());
  const Seconds start = sessions::kAfterHours.start();
  const Seconds end = sessions::kAfterHours.end();
  const auto t = ticks.times();
  const auto p = ticks.prices();

  // Last price at or before each whole minute from 4:00pm to 6:30pm.
  const std::size_t minutes = static_cast<std::size_t>((end - start) / 60.0);
  std::vector<std::optional<double>> grid(minutes + 1);
  std::size_t j = 0;
  std::optional<double> last;
  for (std::size_t m = 0; m <= minutes; ++m) {
    const Seconds g = start + 60.0 * static_cast<double>(m);
    while (j < t.size() && t[j] <= g) last = p[j++];
    grid[m] = last;
  }
  double best = 0.0;
  std::optional<std::size_t> best_m;
  for (std::size_t m = 0; m < minutes; ++m) {
    if (!grid[m] || !grid[m + 1]) continue;
    const double r = std::fabs(std::log(*grid[m + 1] / *grid[m]));
    if (r > best) {
      best = r;
      best_m = m;
    }
  }
  if (best_m && best > threshold) {
    const Seconds minute_start = start + 60.0 * static_cast<double>(*best_m);
    if (minute_start + 60.0 <= earliest) return minute_start;
  }
  return earliest;
}

AnnouncementLoad load_announcements(std::string_view document) {
  const CsvDocument doc = CsvDocument::parse(document);
  AnnouncementLoad out;
  if (doc.header.empty()) return out;
  const std::size_t c_sym = *doc.column("symbol"), c_date = *doc.column("date"),
                    c_time = *doc.column("time_sec"), c_act = *doc.column("eps_actual"),
                    c_mean = *doc.column("eps_mean"), c_std = *doc.column("eps_std"),
                    c_na = *doc.column("n_analysts"), c_sic = *doc.column("sic");
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const std::size_t line = doc.line[r];
    Announcement a;
    a.symbol = field(doc, r, c_sym);
    a.date = to_date(field(doc, r, c_date), line);
    a.time = to_clock(field(doc, r, c_time), line);
    a.eps_actual = to_double(field(doc, r, c_act), line, "eps_actual");
    a.eps_mean = to_double(field(doc, r, c_mean), line, "eps_mean");
    a.eps_std = to_double(field(doc, r, c_std), line, "eps_std");
    a.n_analysts = static_cast<int>(to_long(field(doc, r, c_na), line, "n_analysts"));
    a.sic = field(doc, r, c_sic);
    try {
      a.validate();
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line);
    }
    if (a.eps_std < kEpsStdFloor) {
      ++out.dropped_small_sigma;
      continue;
    }
    const double z = (a.eps_actual - a.eps_mean) / a.eps_std;
    if (std::fabs(z) > kMaxAbsZ) {
      ++out.dropped_large_z;
      continue;
    }
    out.announcements.push_back(std::move(a));
  }
  return out;
}

std::map<std::string, FactorMonth> load_factors(std::string_view document) {
  const CsvDocument doc = CsvDocument::parse(document);
  std::map<std::string, FactorMonth> out;
  if (doc.header.empty()) return out;
  const std::size_t c_month = *doc.column("month");
  const char* names[] = {"mkt", "hml", "smb", "rmw", "cma", "mom", "rf"};
  std::size_t cols[7];
  for (int i = 0; i < 7; ++i) cols[i] = *doc.column(names[i]);
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const std::size_t line = doc.line[r];
    const std::string& key = field(doc, r, c_month);
    if (key.size() != 7 || key[4] != '-') throw ParseError("malformed month '" + key + "'", line);
    to_date(key + "-01", line);
    FactorMonth f;
    double* dst[] = {&f.mkt, &f.hml, &f.smb, &f.rmw, &f.cma, &f.mom, &f.rf};
    for (int i = 0; i < 7; ++i) *dst[i] = to_double(field(doc, r, cols[i]), line, names[i]);
    if (!out.emplace(key, f).second) throw ParseError("duplicate month '" + key + "'", line);
  }
  return out;
}

}  // namespace hfjump::ingest
