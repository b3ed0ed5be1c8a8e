#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hfjump/cli.hpp"
#include "hfjump/ingest.hpp"

namespace fs = std::filesystem;
using hfjump::cli::kExitData;
using hfjump::cli::kExitOk;
using hfjump::cli::kExitUsage;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "hfjump");
  std::ostringstream out, err;
  int code = hfjump::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hfjump_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    fs::create_directories((dir_ / name).parent_path());
    std::ofstream(path(name)) << content;
    return path(name);
  }
  static std::string slurp(const std::string& p) { return hfjump::ingest::read_file(p); }

  fs::path dir_;
};

const char* kSmallGrid = R"({
  "replications": 100, "n": 2340, "L": 5, "p": 5, "bns_stride": 30,
  "thetas": [0.5], "cs": [5],
  "scenarios": [{"noise": "gaussian", "beta": null}, {"noise": "gaussian", "beta": 1.0}]
})";

}  // namespace

TEST_F(CliTest, HelpListsDefaults) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (const char* s : {"--theta FLOAT [0.5]", "--c FLOAT [5]", "--L INT [10]", "--p INT [10]",
                        "--omega-bar FLOAT [0.24]", "--alpha FLOAT [0.05]", "--reps UINT [2000]",
                        "--threshold FLOAT [0.0075]", "--terminate TEXT [eod]"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  for (const char* sub : {"simulate", "mc", "test", "ingest", "backtest", "report"})
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
}

TEST_F(CliTest, ExactlyOneSubcommand) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"test", "--ticks", path("x.csv"), "mc"}).code, kExitUsage);
  EXPECT_EQ(run({"test"}).code, kExitUsage);
  EXPECT_EQ(run({"test", "--ticks", path("x.csv"), "--bogus"}).code, kExitUsage);
}

TEST_F(CliTest, McTwiceIsIdentical) {
  auto grid = write("grid.json", kSmallGrid);
  auto a = run({"mc", "--grid", grid, "--reps", "100", "--seed", "7", "--out", path("a.csv")});
  auto b = run({"mc", "--grid", grid, "--reps", "100", "--seed", "7", "--out", path("b.csv"), "--workers", "2"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  ASSERT_EQ(b.code, kExitOk) << b.err;
  const std::string doc = slurp(path("a.csv"));
  EXPECT_EQ(doc, slurp(path("b.csv")));
  EXPECT_EQ(doc.rfind("panel,beta_or_null,theta,c,rate,se,reps\n", 0), 0u);
  EXPECT_NE(doc.find("gaussian,1.00,0.5,5,"), std::string::npos);
  auto c = run({"mc", "--grid", grid, "--reps", "100", "--seed", "8"});
  EXPECT_NE(c.out, doc);
  auto md = run({"mc", "--grid", grid, "--reps", "100", "--format", "markdown"});
  EXPECT_EQ(md.code, kExitOk);
  EXPECT_NE(md.out.find("### gaussian"), std::string::npos);
}

TEST_F(CliTest, McUsageErrors) {
  auto grid = write("grid.json", kSmallGrid);
  EXPECT_EQ(run({"mc", "--grid", grid, "--reps", "10"}).code, kExitUsage);
  EXPECT_EQ(run({"mc", "--grid", grid, "--format", "xml"}).code, kExitUsage);
  auto bad = write("bad.json", "{\"replications\": ");
  EXPECT_EQ(run({"mc", "--grid", bad}).code, kExitData);
}

TEST_F(CliTest, SimulateThenTest) {
  auto scenario = write("scenario.json", R"({"n": 23400, "seed": 5, "jumps": {"beta": 1.0, "target_jump_share": 0.2}})");
  auto s = run({"simulate", "--scenario", scenario, "--out", path("ticks.csv"), "--truth", path("truth.json")});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  auto ticks = hfjump::ingest::parse_ticks(slurp(path("ticks.csv")));
  EXPECT_EQ(ticks.size(), 23401u);
  EXPECT_EQ(ticks.symbol(), "SIM");
  EXPECT_NE(slurp(path("truth.json")).find("jump_variation"), std::string::npos);

  auto t = run({"test", "--ticks", path("ticks.csv"), "--bns"});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  for (const char* key : {"statistic: ", "p_value: ", "jump: ", "k_n: 76", "bns_statistic: "})
    EXPECT_NE(t.out.find(key), std::string::npos) << key;

  // Same seed, same path.
  run({"simulate", "--scenario", scenario, "--out", path("again.csv")});
  EXPECT_EQ(slurp(path("again.csv")), slurp(path("ticks.csv")));
}

TEST_F(CliTest, TestOnShortFileIsDataError) {
  std::string doc = "symbol,date,time_sec,price,volume\n";
  for (int i = 0; i < 50; ++i)
    doc += "AAA,2012-01-03," + std::to_string(34200 + i) + "," + std::to_string(100 + (i % 3)) + ",1\n";
  auto f = write("short.csv", doc);
  auto r = run({"test", "--ticks", f});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("insufficient data"), std::string::npos) << r.err;
}

TEST_F(CliTest, DataErrorsCarryRowContext) {
  auto f = write("neg.csv", "symbol,date,time_sec,price\nAAA,2012-01-03,34200,10\nAAA,2012-01-03,34201,-1\n");
  auto r = run({"test", "--ticks", f});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
  EXPECT_EQ(run({"test", "--ticks", path("missing.csv")}).code, kExitData);
}

TEST_F(CliTest, TestFlagValidation) {
  auto f = write("t.csv", "symbol,date,time_sec,price\nAAA,2012-01-03,34200,10\n");
  EXPECT_EQ(run({"test", "--ticks", f, "--theta", "-1"}).code, kExitUsage);
  EXPECT_EQ(run({"test", "--ticks", f, "--alpha", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"test", "--ticks", f, "--session", "lunch"}).code, kExitUsage);
}

TEST_F(CliTest, IngestCleansTicks) {
  auto f = write("raw.csv",
                 "symbol,date,time_sec,price,volume\n"
                 "AAA,2012-01-03,34200,10,1\nAAA,2012-01-03,34200,11,1\n"
                 "AAA,2012-01-03,34201,10.5,2\nAAA,2012-01-03,70000,12,1\n");
  auto r = run({"ingest", "--ticks", f, "--session", "extended", "--tick-time", "--out", path("clean.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto t = hfjump::ingest::parse_ticks(slurp(path("clean.csv")));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t.prices()[0], 10.5);
}

namespace {

// Twenty events in January (warm-up) and twenty in February, each followed
// by a 2% move in the direction of the surprise.
void planted_files(const CliTest* self, const std::function<std::string(const std::string&, const std::string&)>& write) {
  (void)self;
  std::string ann = "symbol,date,time_sec,eps_actual,eps_mean,eps_std,n_analysts,sic\n";
  const double zs[] = {1.0, -1.0, 2.0, -2.0, 1.5, -0.5};
  int k = 0;
  for (int month = 1; month <= 2; ++month)
    for (int day = 1; day <= 20; ++day, ++k) {
      char date[16];
      std::snprintf(date, sizeof date, "2012-%02d-%02d", month, day);
      const std::string sym = "S" + std::to_string(k % 5);
      const double z = zs[k % 6];
      char row[160];
      std::snprintf(row, sizeof row, "%s,%s,57660,%.4f,1.0,0.1,5,7372\n", sym.c_str(), date, 1.0 + 0.1 * z);
      ann += row;
      const double p1 = 100.0 * std::exp(z > 0 ? 0.02 : -0.02);
      char ticks[400];
      std::snprintf(ticks, sizeof ticks,
                    "symbol,date,time_sec,price,volume\n%s,%s,57650,100,1\n%s,%s,57660,100,1\n"
                    "%s,%s,57690,%.17g,1\n%s,%s,66000,%.17g,1\n",
                    sym.c_str(), date, sym.c_str(), date, sym.c_str(), date, p1, sym.c_str(), date, p1);
      write("ticks/" + sym + "_" + date + ".csv", ticks);
    }
  write("ann.csv", ann);
}

}  // namespace

TEST_F(CliTest, BacktestAndReport) {
  planted_files(this, [&](const std::string& n, const std::string& c) { return write(n, c); });
  auto r = run({"backtest", "--ticks", path("ticks"), "--announcements", path("ann.csv"), "--out",
                path("trades.csv"), "--summary", path("summary.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("mode,latency,termination,n_trades,mean_return_pct,t_stat\ntrade,0,eod,20,2.000000,", 0), 0u)
      << r.out;
  EXPECT_EQ(slurp(path("summary.csv")), r.out);

  write("factors.csv", "month,mkt,hml,smb,rmw,cma,mom,rf\n2012-02,1,0,0,0,0,0,0.1\n");
  auto rep = run({"report", "--trades", path("trades.csv"), "--factors", path("factors.csv"), "--out",
                  path("monthly.csv")});
  ASSERT_EQ(rep.code, kExitOk) << rep.err;
  EXPECT_NE(rep.out.find("months: 1"), std::string::npos);
  EXPECT_NE(rep.out.find("trades: 20"), std::string::npos);
  auto monthly = slurp(path("monthly.csv"));
  EXPECT_EQ(monthly.rfind("month,return,trading,risk_free,excess\n2012-02,", 0), 0u) << monthly;

  write("nofeb.csv", "month,mkt,hml,smb,rmw,cma,mom,rf\n2012-01,1,0,0,0,0,0,0.1\n");
  EXPECT_EQ(run({"report", "--trades", path("trades.csv"), "--factors", path("nofeb.csv")}).code, kExitData);
}

TEST_F(CliTest, BacktestUsageErrors) {
  planted_files(this, [&](const std::string& n, const std::string& c) { return write(n, c); });
  const std::string t = path("ticks"), a = path("ann.csv");
  EXPECT_EQ(run({"backtest", "--ticks", t, "--announcements", a, "--mode", "bbo"}).code, kExitUsage);
  EXPECT_EQ(run({"backtest", "--ticks", t, "--announcements", a, "--terminate", "soon"}).code, kExitUsage);
  EXPECT_EQ(run({"backtest", "--ticks", t, "--announcements", a, "--latency", "-1"}).code, kExitUsage);
  EXPECT_EQ(run({"backtest", "--ticks", path("nodir"), "--announcements", a}).code, kExitData);
  auto high = run({"backtest", "--ticks", t, "--announcements", a, "--threshold", "0.5"});
  EXPECT_EQ(high.code, kExitOk);
  EXPECT_NE(high.out.find(",0,nan,nan"), std::string::npos) << high.out;
}
