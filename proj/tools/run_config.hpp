#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iabplan/connectivity.hpp"
#include "iabplan/geometry.hpp"
#include "iabplan/linkbudget.hpp"
#include "iabplan/solver.hpp"

namespace CLI {
class App;
}

namespace iab::cli {

// Everything a command needs, in command-line units: meters, dBm/dB, GHz,
// Mbps. `resolve()` converts to library units once.
struct RunConfig {
  std::string topology_file;
  int grid_rows = 3;
  int grid_cols = 6;
  double inter_site_m = 200.0;
  double street_width_m = 20.0;
  int n_ues = 600;

  std::string gains_csv;

  double ue_tx_power_dbm = 30.0;
  double bs_array_gain_db = 21.0;
  double bs_eirp_dbm = 51.0;
  double bandwidth_ghz = 1.0;
  double carrier_ghz = 28.0;
  double atmospheric_db_per_km = 0.11;
  double polarization_loss_db = 1.0;
  double alignment_error_db = 5.0;
  double implementation_loss_db = 5.0;
  double fiber_capacity_mbps = 200000.0;
  double noise_figure_db = 7.0;
  double snr_cap_db = 30.0;
  double min_snr_db = 0.0;
  double corner_loss_db = 20.0;
  double min_distance_m = 1.0;
  std::string snr_combining = "parallel";

  std::string anchor_policy = "reference";
  int anchor_count = 7;
  std::vector<int> anchor_ids;

  std::vector<std::string> scenarios = {"AccessSS", "AccessLB", "IabST", "IabMeshSS", "IabMeshLB"};

  double feasibility_tol = 1e-9;
  double duality_gap_tol = 1e-6;
  double barrier_increase_factor = 10.0;
  double newton_tol = 1e-10;
  int max_outer_iters = 60;
  int max_inner_iters = 100;

  std::uint64_t seed = 1;
  std::vector<int> k_values;
  std::vector<std::uint64_t> sweep_seeds = {1};

  std::string output_dir = "iabplan-out";
  bool dump_iterations = false;
  bool dump_problem = false;
  bool include_excluded = false;
};

// Registers every key as a long option; the same names are valid in the
// config file given with --config.
void add_options(CLI::App& app, RunConfig& cfg);

struct Resolved {
  Topology topology;
  LinkTable links;
  AnchorSet anchors;
  BudgetConfig budget;
  SolverConfig solver;
  std::vector<Variant> variants;
};

BudgetConfig budget_of(const RunConfig& cfg);
SolverConfig solver_of(const RunConfig& cfg);
std::vector<Variant> variants_of(const RunConfig& cfg);

// Builds or loads the topology, gains and anchors. Throws ConfigError or
// IngestError.
Resolved resolve(const RunConfig& cfg);

// Checks key values and that referenced files exist. Throws ConfigError.
void validate(const RunConfig& cfg);

// Fully resolved configuration as ordered `key = value` lines.
std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& cfg);
std::string provenance_comment(const RunConfig& cfg);

}  // namespace iab::cli
