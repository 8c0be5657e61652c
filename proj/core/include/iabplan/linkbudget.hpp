#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <tuple>
#include <vector>

#include "iabplan/geometry.hpp"

namespace iab {

inline constexpr double kAbsentGain = -std::numeric_limits<double>::infinity();

// How the raw SNR is combined with the SNR ceiling.
//   kParallel:     1 / (1/snr + 1/cap)      saturates exactly at the cap
//   kHarmonicMean: 2 snr cap / (snr + cap)  saturates at cap + 3 dB
enum class SnrCombining { kParallel, kHarmonicMean };

struct BudgetConfig {
  double tx_power_dbm = 30.0;        // UE transmit power, 0 dBi antenna
  double bs_array_gain_db = 21.0;    // receive gain at a BS
  double bs_eirp_dbm = 51.0;         // BS transmit power plus array gain
  double bandwidth_hz = 1e9;
  double carrier_hz = 28e9;
  double atmospheric_db_per_km = 0.11;
  double polarization_loss_db = 1.0;
  double alignment_error_db = 5.0;
  double implementation_loss_db = 5.0;
  double fiber_capacity_bps = 200e9;
  double noise_figure_db = 7.0;      // not part of the published budget
  double snr_cap_db = 30.0;
  double min_snr_db = 0.0;
  double corner_loss_db = 20.0;      // synthetic propagation only
  double min_distance_m = 1.0;
  SnrCombining combining = SnrCombining::kParallel;

  // Throws ConfigError.
  void validate() const;
};

enum class LinkDirection { kBsToBs, kBsToUe, kUeToBs };

double free_space_path_loss_db(double distance_m, double carrier_hz);

// Number of street corners on the shortest street path between two points:
// 0 when they share a street segment. Points off every street attach to the
// nearest segment. Returns -1 if the street network is disconnected between
// them.
int street_corners(const Topology& topo, Point a, Point b);

// Synthetic stand-in for ray-traced gains: free-space loss at the carrier,
// atmospheric absorption, and a fixed loss per street corner. Distances
// below min_distance_m are clamped.
double synth_gain(const Topology& topo, int from_node, int to_node,
                  const BudgetConfig& cfg);

// Dense node x node gain matrix in dB; kAbsentGain marks a missing link.
class GainMatrix {
 public:
  GainMatrix() = default;
  explicit GainMatrix(int num_nodes);

  int num_nodes() const { return n_; }
  double at(int from, int to) const { return db_[index(from, to)]; }
  void set(int from, int to, double gain_db) { db_[index(from, to)] = gain_db; }

 private:
  std::size_t index(int from, int to) const;

  int n_ = 0;
  std::vector<double> db_;
};

GainMatrix synth_gain_matrix(const Topology& topo, const BudgetConfig& cfg);

// CSV with header `from,to,gain_db`; ids are global node numbers. Pairs not
// listed are absent. Throws IngestError naming the offending line.
GainMatrix parse_gains_csv(std::istream& in, int num_nodes);
GainMatrix load_gains_csv(const std::filesystem::path& path, int num_nodes);

double noise_dbm(const BudgetConfig& cfg);
double link_snr(double gain_db, LinkDirection direction, const BudgetConfig& cfg);
double effective_snr(double snr_linear, const BudgetConfig& cfg);
double shannon_capacity(double eff_snr_linear, double bandwidth_hz);

struct LinkEntry {
  double gain_db = kAbsentGain;
  double snr_db = kAbsentGain;
  double eff_snr_linear = 0.0;
  double capacity_bps = 0.0;
  bool exists = false;
};

// Per ordered node pair link data. Only BS-BS and BS-UE pairs are
// populated; UE-UE pairs and self pairs stay absent.
class LinkTable {
 public:
  LinkTable() = default;
  LinkTable(int num_bs, int num_ue);

  int num_bs() const { return num_bs_; }
  int num_ue() const { return num_ue_; }
  int num_nodes() const { return num_bs_ + num_ue_; }
  int bs_node(int bs) const { return bs; }
  int ue_node(int ue) const { return num_bs_ + ue; }
  bool is_bs(int node) const { return node < num_bs_; }

  const LinkEntry& at(int from, int to) const { return entries_[index(from, to)]; }
  void set(int from, int to, const LinkEntry& entry) { entries_[index(from, to)] = entry; }
  bool exists(int from, int to) const { return at(from, to).exists; }
  double capacity(int from, int to) const { return at(from, to).capacity_bps; }

  // Number of pairs a table of this shape describes: B(B-1) + 2BU.
  std::size_t entry_count() const;

  // Swaps every (i,j) with (j,i): uplink and downlink capacities trade places.
  LinkTable transposed() const;
  LinkTable scaled(double factor) const;

  // Table for hand-built instances: each tuple is (from, to, capacity_bps).
  static LinkTable from_capacities(
      int num_bs, int num_ue, std::span<const std::tuple<int, int, double>> links);

 private:
  std::size_t index(int from, int to) const;

  int num_bs_ = 0;
  int num_ue_ = 0;
  std::vector<LinkEntry> entries_;
};

LinkTable build_link_table(int num_bs, int num_ue, const GainMatrix& gains,
                           const BudgetConfig& cfg);
LinkTable build_link_table(const Topology& topo, const GainMatrix& gains,
                           const BudgetConfig& cfg);

// `from,to,gain_db,snr_db,capacity_bps,exists`
void write_link_table_csv(const LinkTable& table, std::ostream& out);

}  // namespace iab
