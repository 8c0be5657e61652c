#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "iabplan/errors.hpp"
#include "iabplan/linkbudget.hpp"

namespace iab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Friis loss written out independently of the library.
double friis_db(double d_m, double f_hz) {
  const double lambda = 299792458.0 / f_hz;
  return 20.0 * std::log10(4.0 * std::numbers::pi * d_m / lambda);
}

Topology line_topology(Point bs0, Point bs1, Point ue) {
  GridSpec s;
  s.rows = 1;
  s.cols = 2;
  s.inter_site_m = 100.0;
  s.n_ues = 0;
  Topology t = generate_grid(s);
  t.bs_sites[0].pos = bs0;
  t.bs_sites[1].pos = bs1;
  t.ues = {{0, ue}};
  return t;
}

TEST(PathLoss, FriisAtOneHundredMeters) {
  EXPECT_NEAR(free_space_path_loss_db(100.0, 28e9), friis_db(100.0, 28e9), 1e-9);
  EXPECT_NEAR(free_space_path_loss_db(100.0, 28e9), 92.45 + 20.0 * std::log10(28.0 * 0.1), 0.01);
}

TEST(SynthGain, LineOfSightAtOneHundredMeters) {
  const BudgetConfig cfg;
  const Topology t = line_topology({0, 0}, {100, 0}, {50, 0});
  const double g = synth_gain(t, 0, 1, cfg);
  EXPECT_NEAR(g, -(friis_db(100.0, 28e9) + 0.011), 1e-9);
  EXPECT_NEAR(g, -101.41, 0.02);
}

TEST(SynthGain, CoincidentNodesClampToOneMeter) {
  const BudgetConfig cfg;
  const Topology t = line_topology({0, 0}, {100, 0}, {0, 0});
  const double g = synth_gain(t, 0, 2, cfg);
  EXPECT_NEAR(g, -(friis_db(1.0, 28e9) + 0.11e-3), 1e-9);
  EXPECT_NEAR(g, -61.4, 0.05);
}

TEST(SynthGain, Deterministic) {
  const BudgetConfig cfg;
  const Topology t = line_topology({0, 0}, {100, 0}, {50, 0});
  EXPECT_EQ(synth_gain(t, 0, 2, cfg), synth_gain(t, 0, 2, cfg));
}

TEST(SynthGain, EachCornerCostsTheCornerLoss) {
  GridSpec s;
  s.rows = 2;
  s.cols = 2;
  s.inter_site_m = 100.0;
  s.n_ues = 0;
  const Topology t = generate_grid(s);
  const BudgetConfig cfg;
  // Sites 0 (0,0) and 3 (100,100) are one corner apart.
  EXPECT_EQ(street_corners(t, t.bs_sites[0].pos, t.bs_sites[3].pos), 1);
  EXPECT_EQ(street_corners(t, t.bs_sites[0].pos, t.bs_sites[1].pos), 0);
  const double d = std::hypot(100.0, 100.0);
  EXPECT_NEAR(synth_gain(t, 0, 3, cfg), -(friis_db(d, 28e9) + 0.11 * d / 1000.0 + 20.0), 1e-9);
}

TEST(Noise, ThermalFloorPlusFigure) {
  const BudgetConfig cfg;
  EXPECT_NEAR(noise_dbm(cfg), -174.0 + 90.0 + 7.0, 1e-12);
}

TEST(LinkSnr, DownlinkExample) {
  EXPECT_NEAR(link_snr(-100.0, LinkDirection::kBsToUe, BudgetConfig{}), 17.0, 1e-9);
}

TEST(LinkSnr, UplinkExampleIsSymmetric) {
  EXPECT_NEAR(link_snr(-100.0, LinkDirection::kUeToBs, BudgetConfig{}), 17.0, 1e-9);
}

TEST(LinkSnr, BackhaulUsesBsEirpAndArrayGain) {
  EXPECT_NEAR(link_snr(-100.0, LinkDirection::kBsToBs, BudgetConfig{}), 17.0 + 21.0, 1e-9);
}

TEST(LinkSnr, AbsentGainGivesMinusInfinity) {
  EXPECT_EQ(link_snr(-kInf, LinkDirection::kBsToUe, BudgetConfig{}), -kInf);
}

TEST(EffectiveSnr, SaturatesAtTheCap) {
  const BudgetConfig cfg;
  EXPECT_NEAR(effective_snr(kInf, cfg), 1000.0, 1e-9);
  EXPECT_NEAR(effective_snr(1e12, cfg), 1000.0, 1e-3);
}

TEST(EffectiveSnr, ParallelCombination) {
  const BudgetConfig cfg;
  EXPECT_NEAR(effective_snr(1000.0, cfg), 500.0, 1e-9);
  EXPECT_NEAR(effective_snr(1.0, cfg), 1000.0 / 1001.0, 1e-12);
  EXPECT_EQ(effective_snr(0.0, cfg), 0.0);
}

TEST(EffectiveSnr, HarmonicMeanVariant) {
  BudgetConfig cfg;
  cfg.combining = SnrCombining::kHarmonicMean;
  EXPECT_NEAR(effective_snr(1000.0, cfg), 1000.0, 1e-9);
  EXPECT_NEAR(effective_snr(kInf, cfg), 2000.0, 1e-9);
}

TEST(Capacity, Shannon) {
  EXPECT_NEAR(shannon_capacity(1.0, 1e9), 1e9, 1e-3);
  EXPECT_EQ(shannon_capacity(0.0, 1e9), 0.0);
  EXPECT_NEAR(shannon_capacity(1000.0, 1e9), 9.967e9, 1e6);
  EXPECT_NEAR(shannon_capacity(1000.0, 1e9), 1e9 * std::log2(1001.0), 1e-3);
}

TEST(BudgetConfig, Validation) {
  EXPECT_NO_THROW(BudgetConfig{}.validate());
  BudgetConfig b;
  b.bandwidth_hz = 0.0;
  EXPECT_THROW(b.validate(), ConfigError);
  b = {};
  b.polarization_loss_db = -1.0;
  EXPECT_THROW(b.validate(), ConfigError);
  b = {};
  b.snr_cap_db = -1.0;
  EXPECT_THROW(b.validate(), ConfigError);
}

TEST(LinkTable, ThresholdIsInclusive) {
  const BudgetConfig cfg;
  GainMatrix g(3);
  // 1 BS, 2 UEs. SNR = gain + 117 dB under the default budget.
  g.set(0, 1, -120.0);
  g.set(0, 2, -117.0);
  const LinkTable t = build_link_table(1, 2, g, cfg);
  EXPECT_FALSE(t.exists(0, 1));
  EXPECT_EQ(t.capacity(0, 1), 0.0);
  EXPECT_NEAR(t.at(0, 1).snr_db, -3.0, 1e-9);
  EXPECT_TRUE(t.exists(0, 2));
  EXPECT_NEAR(t.capacity(0, 2), 1e9 * std::log2(1.0 + 1000.0 / 1001.0), 1.0);
}

TEST(LinkTable, EntryCountForTheDefaultGrid) {
  const LinkTable t(18, 600);
  EXPECT_EQ(t.entry_count(), 18u * 17u + 2u * 18u * 600u);
}

TEST(LinkTable, UeToUePairsStayAbsent) {
  GainMatrix g(3);
  g.set(1, 2, -60.0);
  g.set(2, 1, -60.0);
  const LinkTable t = build_link_table(1, 2, g, BudgetConfig{});
  EXPECT_FALSE(t.exists(1, 2));
  EXPECT_FALSE(t.exists(2, 1));
}

TEST(LinkTable, TransposedSwapsDirections) {
  const std::vector<std::tuple<int, int, double>> links = {{0, 1, 1e9}, {1, 0, 2e9}, {0, 2, 3e9}};
  const LinkTable t = LinkTable::from_capacities(2, 1, links);
  const LinkTable s = t.transposed();
  EXPECT_EQ(s.capacity(1, 0), 1e9);
  EXPECT_EQ(s.capacity(0, 1), 2e9);
  EXPECT_EQ(s.capacity(2, 0), 3e9);
  EXPECT_FALSE(s.exists(0, 2));
}

TEST(LinkTable, ScaledMultipliesCapacities) {
  const std::vector<std::tuple<int, int, double>> links = {{0, 1, 1e9}};
  const LinkTable s = LinkTable::from_capacities(1, 1, links).scaled(2.5);
  EXPECT_DOUBLE_EQ(s.capacity(0, 1), 2.5e9);
}

TEST(LinkTable, FromCapacitiesRejectsBadLinks) {
  using L = std::vector<std::tuple<int, int, double>>;
  EXPECT_THROW(LinkTable::from_capacities(1, 2, L{{1, 2, 1e9}}), ConfigError);
  EXPECT_THROW(LinkTable::from_capacities(2, 0, L{{1, 1, 1e9}}), ConfigError);
  EXPECT_THROW(LinkTable::from_capacities(2, 0, L{{0, 1, 0.0}}), ConfigError);
  EXPECT_THROW(LinkTable::from_capacities(2, 0, L{{0, 5, 1e9}}), ConfigError);
}

TEST(LinkTable, CsvExportListsFiniteGains) {
  GainMatrix g(3);
  g.set(0, 1, -100.0);
  const LinkTable t = build_link_table(1, 2, g, BudgetConfig{});
  std::ostringstream out;
  write_link_table_csv(t, out);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("from,to,gain_db,snr_db,capacity_bps,exists\n", 0), 0u);
  EXPECT_NE(s.find("0,1,-100"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
}

TEST(GainsCsv, SingleRow) {
  std::istringstream in("from,to,gain_db\n0,1,-100\n");
  const GainMatrix g = parse_gains_csv(in, 2);
  EXPECT_EQ(g.at(0, 1), -100.0);
  EXPECT_EQ(g.at(1, 0), kAbsentGain);
}

TEST(GainsCsv, EmptyBodyIsAllAbsent) {
  std::istringstream in("from,to,gain_db\n");
  const GainMatrix g = parse_gains_csv(in, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(g.at(i, j), kAbsentGain);
  }
}

int ingest_line(const std::string& text, int nodes) {
  std::istringstream in(text);
  try {
    parse_gains_csv(in, nodes);
  } catch (const IngestError& e) {
    return e.line();
  }
  return -1;
}

TEST(GainsCsv, DuplicateFailsAtSecondOccurrence) {
  EXPECT_EQ(ingest_line("from,to,gain_db\n0,1,-100\n0,1,-90\n", 2), 3);
}

TEST(GainsCsv, ErrorsNameTheLine) {
  EXPECT_EQ(ingest_line("from,to,gain_db\n0,1,-100\n0,9,-90\n", 2), 3);
  EXPECT_EQ(ingest_line("from,to,gain_db\n0,1\n", 2), 2);
  EXPECT_EQ(ingest_line("from,to,gain_db\n0,x,-1\n", 2), 2);
  EXPECT_EQ(ingest_line("from,to,gain_db\n1,1,-1\n", 2), 2);
  EXPECT_EQ(ingest_line("a,b,c\n", 2), 1);
  EXPECT_EQ(ingest_line("", 2), 1);
}

TEST(GainsCsv, CommentsAndBlankLinesAreSkipped) {
  std::istringstream in("# provenance\nfrom,to,gain_db\n\n0,1,-80\n");
  EXPECT_EQ(parse_gains_csv(in, 2).at(0, 1), -80.0);
}

TEST(GainsCsv, MissingFileIsLineZero) {
  try {
    load_gains_csv("/nonexistent/gains.csv", 2);
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.line(), 0);
  }
}

}  // namespace
}  // namespace iab
