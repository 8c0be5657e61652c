#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "iabplan/errors.hpp"
#include "iabplan/geometry.hpp"

namespace iab::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("iabplan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // One BS and one UE at the same street corner, gains from a CSV.
  RunConfig minimal(const std::string& gains) {
    GridSpec s;
    s.rows = 1;
    s.cols = 1;
    s.n_ues = 1;
    spit(dir_ / "topo.json", topology_to_json(generate_grid(s)));
    spit(dir_ / "gains.csv", gains);
    RunConfig c;
    c.topology_file = (dir_ / "topo.json").string();
    c.gains_csv = (dir_ / "gains.csv").string();
    c.anchor_policy = "manual";
    c.anchor_ids = {0};
    c.scenarios = {"AccessSS"};
    c.output_dir = (dir_ / "out").string();
    return c;
  }

  int run(const RunConfig& c) {
    std::ostringstream log;
    return guarded([&] { return cmd_run(c, log); }, err_);
  }

  fs::path dir_;
  std::ostringstream err_;
};

TEST_F(CliTest, MinimalRunHalvesTheLinkCapacity) {
  const RunConfig c = minimal("from,to,gain_db\n0,1,-100\n1,0,-100\n");
  ASSERT_EQ(run(c), kExitOk) << err_.str();
  // 17 dB raw SNR against a 30 dB ceiling, 1 GHz.
  const double snr = std::pow(10.0, 1.7);
  const double eff = 1.0 / (1.0 / snr + 1.0 / 1000.0);
  const double cap = 1e9 * std::log2(1.0 + eff);
  const auto doc = nlohmann::json::parse(slurp(dir_ / "out" / "compare.json"));
  EXPECT_NEAR(doc["rows"][0]["gm_mbps"].get<double>(), cap / 2 / 1e6, 1e-6 * cap / 2 / 1e6);
  const auto sol = nlohmann::json::parse(slurp(dir_ / "out" / "solution_AccessSS.json"));
  EXPECT_TRUE(sol["kkt"]["passed"].get<bool>());
  EXPECT_EQ(sol["provenance"]["anchor_policy"], "manual");
}

TEST_F(CliTest, RunWritesEveryReport) {
  RunConfig c = minimal("from,to,gain_db\n0,1,-100\n1,0,-100\n");
  c.dump_iterations = true;
  c.dump_problem = true;
  ASSERT_EQ(run(c), kExitOk) << err_.str();
  for (const char* f : {"topology.json", "links.csv", "solution_AccessSS.json", "rates_AccessSS.csv",
                        "cdf_AccessSS.csv", "pattern_AccessSS.json", "iterations_AccessSS.csv",
                        "problem_AccessSS.txt", "compare.txt", "compare.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  EXPECT_EQ(slurp(dir_ / "out" / "links.csv").rfind("# iabplan ", 0), 0u);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  RunConfig c = minimal("from,to,gain_db\n0,1,-100\n1,0,-95\n");
  ASSERT_EQ(run(c), kExitOk);
  c.output_dir = (dir_ / "again").string();
  ASSERT_EQ(run(c), kExitOk);
  for (const auto& e : fs::directory_iterator(dir_ / "out")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "again" / e.path().filename())) << e.path().filename();
  }
}

TEST_F(CliTest, BadGainsCsvIsExitOne) {
  const RunConfig c = minimal("from,to,gain_db\n0,1,-100\n0,1,-90\n");
  EXPECT_EQ(run(c), kExitConfig);
  EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MissingGainsFileIsExitOne) {
  RunConfig c = minimal("from,to,gain_db\n");
  c.gains_csv = (dir_ / "absent.csv").string();
  EXPECT_EQ(run(c), kExitConfig);
}

TEST_F(CliTest, NoUsableLinkIsInfeasible) {
  const RunConfig c = minimal("from,to,gain_db\n0,1,-100\n");
  EXPECT_EQ(run(c), kExitInfeasible);
}

TEST_F(CliTest, IterationCapIsExitThree) {
  RunConfig c = minimal("from,to,gain_db\n0,1,-100\n1,0,-100\n");
  c.max_outer_iters = 1;
  EXPECT_EQ(run(c), kExitNotConverged);
}

TEST_F(CliTest, UnknownScenarioIsExitOne) {
  RunConfig c = minimal("from,to,gain_db\n0,1,-100\n1,0,-100\n");
  c.scenarios = {"Everything"};
  EXPECT_EQ(run(c), kExitConfig);
}

RunConfig grid_sweep(const fs::path& out) {
  RunConfig c;
  c.grid_rows = 1;
  c.grid_cols = 3;
  c.n_ues = 12;
  c.anchor_policy = "seeded-random";
  c.scenarios = {"AccessSS", "IabMeshSS"};
  c.k_values = {1, 3};
  c.sweep_seeds = {1, 2};
  c.output_dir = out.string();
  return c;
}

TEST_F(CliTest, SweepWritesOneRowPerPoint) {
  const RunConfig c = grid_sweep(dir_ / "sweep");
  std::ostringstream log;
  ASSERT_EQ(guarded([&] { return cmd_sweep(c, log); }, err_), kExitOk) << err_.str();
  const std::string csv = slurp(dir_ / "sweep" / "sweep.csv");
  const auto body = csv.substr(csv.find("k,variant"));
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 1 + 2 * 2 * 2);
  EXPECT_TRUE(fs::exists(dir_ / "sweep" / "sweep.txt"));
}

TEST_F(CliTest, SweepWithoutKValuesIsExitOne) {
  RunConfig c = grid_sweep(dir_ / "sweep");
  c.k_values.clear();
  std::ostringstream log;
  EXPECT_EQ(guarded([&] { return cmd_sweep(c, log); }, err_), kExitConfig);
}

TEST_F(CliTest, SweepRejectsManualAnchors) {
  RunConfig c = grid_sweep(dir_ / "sweep");
  c.anchor_policy = "manual";
  c.anchor_ids = {0};
  std::ostringstream log;
  EXPECT_EQ(guarded([&] { return cmd_sweep(c, log); }, err_), kExitConfig);
}

TEST(Provenance, ExcludesOutputDirectory) {
  RunConfig a;
  RunConfig b;
  b.output_dir = "elsewhere";
  EXPECT_EQ(provenance_comment(a), provenance_comment(b));
  b.seed = 2;
  EXPECT_NE(provenance_comment(a), provenance_comment(b));
}

TEST(Resolve, UnitsAreConverted) {
  RunConfig c;
  c.bandwidth_ghz = 0.4;
  c.fiber_capacity_mbps = 1000.0;
  const BudgetConfig b = budget_of(c);
  EXPECT_DOUBLE_EQ(b.bandwidth_hz, 0.4e9);
  EXPECT_DOUBLE_EQ(b.fiber_capacity_bps, 1e9);
  EXPECT_DOUBLE_EQ(b.carrier_hz, 28e9);
}

TEST(Resolve, ReferenceAnchorsNeedTheDefaultGrid) {
  RunConfig c;
  c.grid_cols = 5;
  c.n_ues = 10;
  EXPECT_THROW(resolve(c), ConfigError);
  c.grid_cols = 6;
  EXPECT_EQ(resolve(c).anchors.count(), 7);
}

}  // namespace
}  // namespace iab::cli
