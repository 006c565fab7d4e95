#include <gtest/gtest.h>

#include <filesystem>

#include "kdvb/lab/experiments.hpp"

using namespace kdvb;
using namespace kdvb::lab;
namespace fs = std::filesystem;

namespace {
std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

const char* kSmallSimulate = R"(
experiment = "simulate"
name = "small"
[grid]
n = 32
[time]
nt = 32
[simulate]
initial = "zero"
residual_n_list = [16, 32]
expm_n = 8
expm_nt_list = [16, 32]
b_list = [0.5]
weighted_n = 32
weighted_nt = 10
thetas = [0.5]
smoothing_n_list = [16, 32]
random_states = 3
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kdvb_lab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST(Config, DefaultsFilledAndEchoed) {
  const auto c = parse_config("experiment = \"observability\"\n[grid]\nL = 2.0\n");
  EXPECT_EQ(c.name, "observability");
  EXPECT_EQ(c.grid.n, 128);
  EXPECT_DOUBLE_EQ(c.omega.l1, -1.0);
  EXPECT_DOUBLE_EQ(c.omega.l2, 1.0);
  const auto echo = config_echo(c);
  EXPECT_TRUE(echo.contains("observability"));
  EXPECT_FALSE(echo.contains("carleman"));
  EXPECT_EQ(echo["grid"]["L"], 2.0);
}

TEST(Config, UnknownKeysNamedByPath) {
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[grid]\nnn = 3\n"), "grid.nn");
  EXPECT_EQ(error_path("experiment = \"simulate\"\nseeed = 3\n"), "seeed");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[gird]\nn = 3\n"), "gird");
  EXPECT_EQ(error_path("experiment = \"control\"\n[control]\ncg_tol = 1e-6\nfoo = 1\n"), "control.foo");
}

TEST(Config, SectionsForOtherExperimentsRejected) {
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[carleman]\ntrials = 3\n"), "carleman");
  EXPECT_EQ(error_path("experiment = \"carleman\"\n[half_line]\nb = 0.5\n"), "half_line");
}

TEST(Config, PreconditionsValidatedBeforeDispatch) {
  EXPECT_EQ(error_path("experiment = \"nope\"\n"), "experiment");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[grid]\nn = 2\n"), "grid.n");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[grid]\nL = -1.0\n"), "grid.L");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[grid]\nn = 1.5\n"), "grid.n");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[omega]\nl1 = 0.5\nl2 = 0.1\n"), "omega");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[omega]\nl = 2.0\n"), "omega");
  EXPECT_EQ(error_path("experiment = \"control\"\n[half_line]\nb = 0.2\n"), "half_line.b");
  EXPECT_EQ(error_path("experiment = \"control\"\n[cutoff]\neps = 0.7\neps_prime = 0.6\n"), "cutoff");
  EXPECT_EQ(error_path("experiment = \"carleman\"\n[carleman]\ns = \"sometimes\"\n"), "carleman.s");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[simulate]\nthetas = [0.3]\n"), "simulate.thetas");
  EXPECT_EQ(error_path("experiment = \"simulate\"\ngrid = 3\n"), "grid");
  EXPECT_EQ(error_path("experiment = \"simulate\"\n[grid\n"), "<string>");
}

TEST(Report, GitBlobHash) {
  // `printf 'hello\n' | git hash-object --stdin`
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Report, CsvLayout) {
  Table t{"x", {"a", "b"}, {}};
  t.add({0.1, 2});
  t.add({std::nan(""), -1e-300});
  EXPECT_EQ(to_csv(t), "a,b\n0.10000000000000001,2\nnan,-1e-300\n");
  EXPECT_THROW(t.add({1}), InvalidArgument);
}

TEST(Report, InputHashFollowsSeed) {
  auto c = parse_config(kSmallSimulate);
  const auto a = cmd_simulate(c);
  c.seed = 7;
  const auto b = cmd_simulate(c);
  EXPECT_NE(a.input_hash, b.input_hash);
  EXPECT_EQ(a.input_hash, cmd_simulate(parse_config(kSmallSimulate)).input_hash);
}

TEST(Simulate, ZeroDataGivesZeroTable) {
  const auto r = cmd_simulate(parse_config(kSmallSimulate));
  const Table& t = r.tables.front();
  EXPECT_EQ(t.name, "trajectory");
  EXPECT_EQ(t.rows.size(), 33u);
  for (const auto& row : t.rows) {
    EXPECT_EQ(row[1], 0.0);
    EXPECT_EQ(row[2], 0.0);
  }
}

TEST(Simulate, NormsMatchLibraryRun) {
  std::string text = kSmallSimulate;
  text.replace(text.find("\"zero\""), 6, "\"random\"");
  const auto c = parse_config(text);
  const auto r = cmd_simulate(c);
  auto g = build_grid(c.grid.L, c.grid.n);
  Rng rng(c.seed);
  const auto tr = evolve(build_operator(g, OperatorKind::Forward), random_state(g, rng), 0.0, c.time.T, c.time.nt);
  const Table& t = r.tables.front();
  for (int k = 0; k <= tr.steps(); ++k) EXPECT_EQ(t.rows[k][1], tr.norms()[k]);
  // Contraction column is nonincreasing.
  for (int k = 0; k < tr.steps(); ++k) EXPECT_LE(t.rows[k + 1][1], t.rows[k][1]);
}

TEST(Observability, FullRegionAndDenseOracleRows) {
  const auto c = parse_config(R"(
experiment = "observability"
[grid]
n = 16
[time]
T = 0.5
[omega]
l = 0.5
l_list = [0.4, 0.8]
[observability]
n_list = [16, 24]
taus = [1e-8]
reference_tau = 1e-8
sample_trials = 5
)");
  const auto r = cmd_observability(c);
  for (const auto& ch : r.checks) {
    if (ch.name.find("C_obs change") != std::string::npos) continue;  // coarse grids
    EXPECT_TRUE(ch.passed) << ch.name << " = " << ch.value;
  }
  for (const auto& row : r.tables.front().rows) EXPECT_GE(row[2], 1.0);
}

TEST(Control, ZeroDataZeroDefects) {
  const auto c = parse_config(R"(
experiment = "control"
[grid]
n = 24
L = 2.0
[time]
nt = 24
[omega]
l = 1.0
[control]
tau = 1e-4
modes = ["null"]
oracle_n = 8
)");
  const auto r = cmd_control(c);
  bool seen = false;
  for (const auto& ch : r.checks)
    if (ch.name.rfind("zero data", 0) == 0) {
      seen = true;
      EXPECT_TRUE(ch.passed);
    }
  EXPECT_TRUE(seen);
}

TEST(ReproduceAll, EmptyDirectoryIsAnError) {
  const fs::path d = scratch("empty");
  EXPECT_THROW(cmd_reproduce_all(d, d / "out"), InvalidArgument);
  EXPECT_THROW(cmd_reproduce_all(d / "missing", d / "out"), InvalidArgument);
}

TEST(ReproduceAll, BadConfigStopsBeforeAnyRun) {
  const fs::path d = scratch("bad");
  write_file(d / "a.toml", kSmallSimulate);
  write_file(d / "b.toml", "experiment = \"simulate\"\n[grid]\nbogus = 1\n");
  try {
    cmd_reproduce_all(d, d / "out");
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "grid.bogus");
  }
  EXPECT_FALSE(fs::exists(d / "out" / "small.json"));
}

TEST(ReproduceAll, RerunAndThreadCountAreByteIdentical) {
  const fs::path d = scratch("rerun");
  write_file(d / "a.toml", kSmallSimulate);
  cmd_reproduce_all(d, d / "one", std::nullopt, 1);
  cmd_reproduce_all(d, d / "two", std::nullopt, 3);
  for (const auto& e : fs::directory_iterator(d / "one")) {
    std::ifstream a(e.path(), std::ios::binary), b(d / "two" / e.path().filename(), std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str()) << e.path();
  }
  EXPECT_TRUE(fs::exists(d / "one" / "reproduce-all.json"));
  EXPECT_TRUE(fs::exists(d / "one" / "small.trajectory.csv"));
}
