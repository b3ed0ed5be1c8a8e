#include "hfjump/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "hfjump/analyze.hpp"
#include "hfjump/ingest.hpp"
#include "hfjump/jumptest.hpp"
#include "hfjump/mc.hpp"
#include "hfjump/preavg.hpp"
#include "hfjump/simulate.hpp"

namespace hfjump::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "' for writing", 0);
  f << content;
  if (!f) throw DataError("failed writing '" + path + "'", 0);
}

std::vector<std::string> csv_files(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("'" + dir + "' is not a directory", 0);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Prefix a data error with the file it came from.
template <class F>
auto with_file(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what(), 0);
  }
}

SessionWindow parse_session(const std::string& name) {
  if (name == "regular") return sessions::kRegular;
  if (name == "extended") return sessions::kExtended;
  if (name == "after-hours") return sessions::kAfterHours;
  if (name == "pre-market") return sessions::kPreMarket;
  throw UsageError("unknown session '" + name + "'");
}

struct SimulateArgs {
  std::string scenario, out, truth;
  std::uint64_t seed = 0;
  bool efficient = false;
  std::string symbol = "SIM";
  std::string date = "2000-01-03";
};

struct McArgs {
  std::string grid, out, format = "csv";
  std::size_t reps = 2000;
  std::size_t workers = 1;
  std::uint64_t seed = 7;
};

struct TestArgs {
  std::string ticks, session = "extended";
  double theta = 0.5, c = 5.0, omega_bar = 0.24, alpha = 0.05;
  int L = 10, p = 10;
  bool tick_time = false, bns = false;
};

struct IngestArgs {
  std::string ticks, quotes, announcements, out, session = "all";
  bool tick_time = false;
};

struct BacktestArgs {
  std::string ticks, quotes, announcements, out, summary;
  std::string mode = "trade", terminate = "eod";
  double latency = 0.0, threshold = 0.0075, horizon = 60.0;
};

struct ReportArgs {
  std::string trades, factors, out;
  bool classical = false;
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& sub, std::ostream& out) {
  sim::ScenarioSpec spec;
  if (!a.scenario.empty()) {
    std::string text = ingest::read_file(a.scenario);
    spec = with_file(a.scenario, [&] { return sim::ScenarioSpec::from_json(text); });
  }
  if (sub.count("--seed")) spec.seed = a.seed;
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Date date;
  try {
    date = Date::parse(a.date);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  auto sc = sim::simulate_scenario(spec);
  const auto& path = a.efficient ? sc.efficient : sc.observed;
  const double step = sessions::kRegular.end() - sessions::kRegular.start();
  std::vector<Seconds> times(path.size());
  std::vector<double> prices(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    times[i] = sessions::kRegular.start() + step * static_cast<double>(i) / static_cast<double>(spec.n);
    prices[i] = 100.0 * std::exp(path[i]);
  }
  write_file(a.out, ingest::serialize_ticks(TickSeries(a.symbol, date, times, prices)));
  std::string truth = "{\"integrated_variance\": " + fmt("%.17g", sc.truth.integrated_variance) +
                      ", \"jump_variation\": " + fmt("%.17g", sc.truth.jump_variation) +
                      ", \"seed\": " + std::to_string(spec.seed) + "}\n";
  if (!a.truth.empty()) write_file(a.truth, truth);
  out << truth;
  return kExitOk;
}

int cmd_mc(const McArgs& a, const CLI::App& sub, std::ostream& out) {
  mc::StudyGrid grid = mc::StudyGrid::paper_default();
  if (!a.grid.empty()) {
    std::string text = ingest::read_file(a.grid);
    grid = with_file(a.grid, [&] { return mc::StudyGrid::from_json(text); });
  }
  if (sub.count("--reps")) grid.replications = a.reps;
  if (sub.count("--seed")) grid.master_seed = a.seed;
  mc::Format format;
  if (a.format == "csv")
    format = mc::Format::kCsv;
  else if (a.format == "markdown")
    format = mc::Format::kMarkdown;
  else
    throw UsageError("unknown format '" + a.format + "'");
  try {
    grid.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (a.workers == 0) throw UsageError("--workers must be positive");
  auto table = mc::run_study(grid, a.workers);
  std::string doc = mc::emit_table(table, format);
  if (a.out.empty())
    out << doc;
  else
    write_file(a.out, doc);
  return kExitOk;
}

int cmd_test(const TestArgs& a, std::ostream& out) {
  EstimatorConfig cfg;
  cfg.theta = a.theta;
  cfg.trunc_c = a.c;
  cfg.trunc_omega_bar = a.omega_bar;
  cfg.subsample_L = a.L;
  cfg.subsample_p = a.p;
  SessionWindow window = parse_session(a.session);
  try {
    cfg.validate();
    if (!(a.alpha > 0 && a.alpha < 1)) throw DomainError("alpha must lie in (0, 1)");
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  std::string text = ingest::read_file(a.ticks);
  TickSeries ticks = with_file(a.ticks, [&] { return ingest::parse_ticks(text); });
  ticks = session_slice(ticks, window);
  if (a.tick_time) ticks = ingest::tick_time_sample(ticks);
  auto r = jumptest::jump_statistic(ticks, cfg, a.alpha);
  out << "symbol: " << ticks.symbol() << "\n"
      << "date: " << ticks.date().str() << "\n"
      << "n: " << r.n << "\n"
      << "k_n: " << r.k_n << "\n"
      << "noise_var: " << fmt("%.6e", r.noise_var) << "\n"
      << "rv_star: " << fmt("%.6e", r.rv_star) << "\n"
      << "bv_star_trunc: " << fmt("%.6e", r.bv_star_trunc) << "\n"
      << "u_n: " << fmt("%.6e", r.u_n) << "\n"
      << "statistic: " << fmt("%.6f", r.statistic) << "\n"
      << "p_value: " << fmt("%.6f", r.p_value) << "\n"
      << "degenerate: " << (r.degenerate ? "true" : "false") << "\n"
      << "jump: " << (r.reject ? "true" : "false") << "\n";
  if (a.bns) {
    auto logp = ticks.log_prices();
    auto b = jumptest::bns_test(logp, jumptest::BnsVariant::kLinear, a.alpha);
    out << "bns_statistic: " << fmt("%.6f", b.statistic) << "\n"
        << "bns_p_value: " << fmt("%.6f", b.p_value) << "\n"
        << "bns_jump: " << (b.reject ? "true" : "false") << "\n";
  }
  return kExitOk;
}

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  if (a.ticks.empty() && a.quotes.empty() && a.announcements.empty())
    throw UsageError("ingest needs --ticks, --quotes or --announcements");
  if (!a.out.empty() && a.ticks.empty()) throw UsageError("--out requires --ticks");
  if (!a.ticks.empty()) {
    std::string text = ingest::read_file(a.ticks);
    TickSeries ticks = with_file(a.ticks, [&] { return ingest::parse_ticks(text); });
    std::size_t raw = ticks.size();
    if (a.session != "all") ticks = session_slice(ticks, parse_session(a.session));
    if (a.tick_time) ticks = ingest::tick_time_sample(ticks);
    out << "ticks: " << raw << " merged, " << ticks.size() << " kept\n";
    if (!a.out.empty()) write_file(a.out, ingest::serialize_ticks(ticks));
  }
  if (!a.quotes.empty()) {
    std::string text = ingest::read_file(a.quotes);
    QuoteSeries quotes = with_file(a.quotes, [&] { return ingest::parse_quotes(text); });
    auto spreads = ingest::spread_series(quotes);
    std::vector<double> bps;
    for (const auto& s : spreads) bps.push_back(s.bps);
    std::sort(bps.begin(), bps.end());
    out << "quotes: " << quotes.size() << "\n";
    if (!bps.empty()) {
      std::size_t mid = bps.size() / 2;
      double median = bps.size() % 2 ? bps[mid] : 0.5 * (bps[mid - 1] + bps[mid]);
      out << "median_spread_bps: " << fmt("%.4f", median) << "\n";
    }
  }
  if (!a.announcements.empty()) {
    std::string text = ingest::read_file(a.announcements);
    auto load = with_file(a.announcements, [&] { return ingest::load_announcements(text); });
    out << "announcements: " << load.announcements.size() << " kept, " << load.dropped_small_sigma
        << " dropped (eps_std < 0.001), " << load.dropped_large_z << " dropped (|z| > 10)\n";
  }
  return kExitOk;
}

int cmd_backtest(const BacktestArgs& a, std::ostream& out) {
  analyze::StrategyConfig cfg;
  try {
    cfg.mode = analyze::parse_entry_mode(a.mode);
    cfg.termination = analyze::Termination::parse(a.terminate);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (!(a.latency >= 0)) throw UsageError("--latency must be non-negative");
  if (!(a.threshold >= 0)) throw UsageError("--threshold must be non-negative");
  if (!(a.horizon > 0)) throw UsageError("--horizon must be positive");
  cfg.latency_sec = a.latency;
  cfg.threshold = a.threshold;
  cfg.signal_horizon_sec = a.horizon;
  if (cfg.mode != analyze::EntryMode::kTrade && a.quotes.empty())
    throw UsageError("--quotes is required for midquote and bbo entry");

  analyze::MarketData data;
  for (const auto& f : csv_files(a.ticks)) {
    std::string text = ingest::read_file(f);
    data.add(with_file(f, [&] { return ingest::parse_ticks(text); }));
  }
  if (!a.quotes.empty()) {
    for (const auto& f : csv_files(a.quotes)) {
      std::string text = ingest::read_file(f);
      data.add(with_file(f, [&] { return ingest::parse_quotes(text); }));
    }
  }
  std::string text = ingest::read_file(a.announcements);
  auto load = with_file(a.announcements, [&] { return ingest::load_announcements(text); });
  auto events = load.announcements;
  std::stable_sort(events.begin(), events.end(), [](const Announcement& x, const Announcement& y) {
    return std::tie(x.date, x.time) < std::tie(y.date, y.time);
  });

  auto result = analyze::backtest(events, data, cfg);
  std::string summary = analyze::summary_csv(cfg, result.summary);
  out << summary;
  for (const auto& s : result.skipped) {
    const auto& e = events[s.announcement];
    out << "# skipped " << e.symbol << " " << e.date.str() << ": " << s.reason << "\n";
  }
  if (!a.out.empty()) write_file(a.out, analyze::trades_csv(result.trades));
  if (!a.summary.empty()) write_file(a.summary, summary);
  return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::string ttext = ingest::read_file(a.trades);
  auto trades = with_file(a.trades, [&] { return analyze::parse_trades_csv(ttext); });
  std::string ftext = ingest::read_file(a.factors);
  auto factors = with_file(a.factors, [&] { return ingest::load_factors(ftext); });
  auto perf = with_file(a.factors, [&] { return analyze::monthly_perf(trades, factors, !a.classical); });

  std::string monthly = "month,return,trading,risk_free,excess\n";
  for (std::size_t i = 0; i < perf.months.size(); ++i) {
    monthly += perf.months[i] + "," + fmt("%.10g", perf.returns[i]) + "," + fmt("%.10g", perf.trading[i]) +
               "," + fmt("%.10g", perf.risk_free[i]) + "," + fmt("%.10g", perf.excess[i]) + "\n";
  }
  if (!a.out.empty()) write_file(a.out, monthly);
  out << "months: " << perf.months.size() << "\n"
      << "trades: " << trades.size() << "\n"
      << "sharpe: " << fmt("%.4f", perf.sharpe) << "\n";
  if (perf.factor_fit.observations > 0) {
    static const char* names[] = {"alpha", "mkt", "hml", "smb", "rmw", "cma", "mom"};
    const auto& f = perf.factor_fit;
    for (Eigen::Index i = 0; i < f.coefficients.size(); ++i) {
      out << names[i] << ": " << fmt("%.6f", f.coefficients(i)) << " (se " << fmt("%.6f", f.standard_errors(i))
          << ")\n";
    }
    out << "adj_r2: " << fmt("%.4f", f.fit) << "\n";
  } else {
    out << "factor regression: too few months\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-frequency jump tests, Monte Carlo studies and announcement backtests", "hfjump"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Simulate one noisy price path as a tick file");
  sim->add_option("--scenario", sim_args.scenario, "Scenario file (JSON)")->check(CLI::ExistingFile);
  sim->add_option("--out", sim_args.out, "Output tick file")->required();
  sim->add_option("--truth", sim_args.truth, "Write integrated variance and jump variation here");
  sim->add_option("--seed", sim_args.seed, "Override the scenario seed");
  sim->add_flag("--efficient", sim_args.efficient, "Write the latent efficient price instead");
  sim->add_option("--symbol", sim_args.symbol, "Symbol written to the tick file");
  sim->add_option("--date", sim_args.date, "Date written to the tick file");

  McArgs mc_args;
  auto* mcc = app.add_subcommand("mc", "Run a rejection-rate study");
  mcc->add_option("--grid", mc_args.grid, "Study grid file (JSON); defaults to the four-panel study")
      ->check(CLI::ExistingFile);
  mcc->add_option("--reps", mc_args.reps, "Replications per cell");
  mcc->add_option("--workers", mc_args.workers, "Worker threads");
  mcc->add_option("--seed", mc_args.seed, "Master seed");
  mcc->add_option("--out", mc_args.out, "Output file (stdout when omitted)");
  mcc->add_option("--format", mc_args.format, "csv or markdown");

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "Run the jump test on one tick file");
  test->add_option("--ticks", test_args.ticks, "Tick file")->required();
  test->add_option("--session", test_args.session, "extended|regular|after-hours|pre-market");
  test->add_option("--theta", test_args.theta, "Pre-averaging window constant");
  test->add_option("--c", test_args.c, "Truncation level in local standard deviations");
  test->add_option("--omega-bar", test_args.omega_bar, "Truncation rate exponent");
  test->add_option("--L", test_args.L, "Number of subsamples");
  test->add_option("--p", test_args.p, "Block length in pre-averaging windows");
  test->add_option("--alpha", test_args.alpha, "Significance level");
  test->add_flag("--tick-time", test_args.tick_time, "Keep only price changes");
  test->add_flag("--bns", test_args.bns, "Also report the noise-free bipower test");

  IngestArgs ing_args;
  auto* ing = app.add_subcommand("ingest", "Validate and clean raw input files");
  ing->add_option("--ticks", ing_args.ticks, "Tick file");
  ing->add_option("--quotes", ing_args.quotes, "Quote file");
  ing->add_option("--announcements", ing_args.announcements, "Announcement file");
  ing->add_option("--out", ing_args.out, "Cleaned tick file");
  ing->add_option("--session", ing_args.session, "all|extended|regular|after-hours|pre-market");
  ing->add_flag("--tick-time", ing_args.tick_time, "Keep only price changes");

  BacktestArgs bt_args;
  auto* bt = app.add_subcommand("backtest", "Backtest the earnings-surprise strategy");
  bt->add_option("--ticks", bt_args.ticks, "Directory of per symbol-day tick files")->required();
  bt->add_option("--quotes", bt_args.quotes, "Directory of per symbol-day quote files");
  bt->add_option("--announcements", bt_args.announcements, "Announcement file")->required();
  bt->add_option("--mode", bt_args.mode, "trade|midquote|bbo");
  bt->add_option("--latency", bt_args.latency, "Seconds between release and entry");
  bt->add_option("--terminate", bt_args.terminate, "eod, <minutes>m or <ticks>t");
  bt->add_option("--threshold", bt_args.threshold, "Absolute forecast needed to trade");
  bt->add_option("--horizon", bt_args.horizon, "Seconds of post-release return the forecast targets");
  bt->add_option("--out", bt_args.out, "Trade log file");
  bt->add_option("--summary", bt_args.summary, "Summary file");

  ReportArgs rep_args;
  auto* rep = app.add_subcommand("report", "Monthly performance and factor regression");
  rep->add_option("--trades", rep_args.trades, "Trade log written by backtest")->required();
  rep->add_option("--factors", rep_args.factors, "Monthly factor file")->required();
  rep->add_option("--out", rep_args.out, "Monthly return file");
  rep->add_flag("--classical", rep_args.classical, "Classical instead of robust standard errors");

  std::vector<const char*> cargv;
  for (const auto& s : argv) cargv.push_back(s.c_str());
  if (cargv.empty()) cargv.push_back("hfjump");

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help("", CLI::AppFormatMode::All) : subs.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nrun 'hfjump --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args, *sim, out);
    if (mcc->parsed()) return cmd_mc(mc_args, *mcc, out);
    if (test->parsed()) return cmd_test(test_args, out);
    if (ing->parsed()) return cmd_ingest(ing_args, out);
    if (bt->parsed()) return cmd_backtest(bt_args, out);
    if (rep->parsed()) return cmd_report(rep_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InsufficientData& e) {
    err << "insufficient data: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hfjump::cli
