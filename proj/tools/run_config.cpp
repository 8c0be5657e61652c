#include "run_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "iabplan/errors.hpp"
#include "iabplan/scenario.hpp"

namespace iab::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SnrCombining combining_of(const std::string& name) {
  if (name == "parallel") return SnrCombining::kParallel;
  if (name == "harmonic") return SnrCombining::kHarmonicMean;
  throw ConfigError("snr_combining must be parallel or harmonic, got '" + name + "'");
}

}  // namespace

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--topology_file", c.topology_file, "Topology JSON; replaces the generated grid");
  app.add_option("--grid_rows", c.grid_rows, "Site rows of the generated grid");
  app.add_option("--grid_cols", c.grid_cols, "Site columns of the generated grid");
  app.add_option("--inter_site_m", c.inter_site_m, "Site spacing (m)");
  app.add_option("--street_width_m", c.street_width_m, "Street width (m)");
  app.add_option("--n_ues", c.n_ues, "UEs dropped on the streets");

  app.add_option("--gains_csv", c.gains_csv, "Link gains `from,to,gain_db`; replaces synthetic gains");

  app.add_option("--ue_tx_power_dbm", c.ue_tx_power_dbm, "UE transmit power (dBm)");
  app.add_option("--bs_array_gain_db", c.bs_array_gain_db, "BS receive array gain (dB)");
  app.add_option("--bs_eirp_dbm", c.bs_eirp_dbm, "BS EIRP (dBm)");
  app.add_option("--bandwidth_ghz", c.bandwidth_ghz, "Channel bandwidth (GHz)");
  app.add_option("--carrier_ghz", c.carrier_ghz, "Carrier frequency (GHz)");
  app.add_option("--atmospheric_db_per_km", c.atmospheric_db_per_km, "Atmospheric absorption (dB/km)");
  app.add_option("--polarization_loss_db", c.polarization_loss_db, "Polarization loss (dB)");
  app.add_option("--alignment_error_db", c.alignment_error_db, "Beam alignment error (dB)");
  app.add_option("--implementation_loss_db", c.implementation_loss_db, "Implementation loss (dB)");
  app.add_option("--fiber_capacity_mbps", c.fiber_capacity_mbps, "Fiber capacity per anchor (Mbps)");
  app.add_option("--noise_figure_db", c.noise_figure_db, "Receiver noise figure (dB)");
  app.add_option("--snr_cap_db", c.snr_cap_db, "SNR ceiling (dB)");
  app.add_option("--min_snr_db", c.min_snr_db, "Links below this SNR do not exist (dB)");
  app.add_option("--corner_loss_db", c.corner_loss_db, "Synthetic loss per street corner (dB)");
  app.add_option("--min_distance_m", c.min_distance_m, "Distance clamp for path loss (m)");
  app.add_option("--snr_combining", c.snr_combining, "parallel or harmonic");

  app.add_option("--anchor_policy", c.anchor_policy, "reference, manual, seeded-random or greedy-coverage");
  app.add_option("--anchor_count", c.anchor_count, "Fiber drops for random and greedy policies");
  app.add_option("--anchor_ids", c.anchor_ids, "Anchor sites for the manual policy")->delimiter(',');

  app.add_option("--scenarios", c.scenarios, "Variants to solve")->delimiter(',');

  app.add_option("--feasibility_tol", c.feasibility_tol, "Relative primal residual bound");
  app.add_option("--duality_gap_tol", c.duality_gap_tol, "Certified gap per rate");
  app.add_option("--barrier_increase_factor", c.barrier_increase_factor, "Barrier weight growth per step");
  app.add_option("--newton_tol", c.newton_tol, "Centering tolerance");
  app.add_option("--max_outer_iters", c.max_outer_iters, "Barrier steps before giving up");
  app.add_option("--max_inner_iters", c.max_inner_iters, "Newton steps per centering");

  app.add_option("--seed", c.seed, "Seed for UE drop, anchor draw and tie-breaks");
  app.add_option("--k_values", c.k_values, "Fiber-drop counts for sweep")->delimiter(',');
  app.add_option("--sweep_seeds", c.sweep_seeds, "Seeds for sweep")->delimiter(',');

  app.add_option("-o,--output_dir", c.output_dir, "Artifact directory");
  app.add_flag("--dump-iterations,--dump_iterations", c.dump_iterations, "Write the objective trace per scenario");
  app.add_flag("--dump-problem,--dump_problem", c.dump_problem, "Write the rate program per scenario");
  app.add_flag("--include-excluded,--include_excluded", c.include_excluded,
               "Add unservable UEs to the CDFs at rate 0");
}

BudgetConfig budget_of(const RunConfig& c) {
  BudgetConfig b;
  b.tx_power_dbm = c.ue_tx_power_dbm;
  b.bs_array_gain_db = c.bs_array_gain_db;
  b.bs_eirp_dbm = c.bs_eirp_dbm;
  b.bandwidth_hz = c.bandwidth_ghz * 1e9;
  b.carrier_hz = c.carrier_ghz * 1e9;
  b.atmospheric_db_per_km = c.atmospheric_db_per_km;
  b.polarization_loss_db = c.polarization_loss_db;
  b.alignment_error_db = c.alignment_error_db;
  b.implementation_loss_db = c.implementation_loss_db;
  b.fiber_capacity_bps = c.fiber_capacity_mbps * 1e6;
  b.noise_figure_db = c.noise_figure_db;
  b.snr_cap_db = c.snr_cap_db;
  b.min_snr_db = c.min_snr_db;
  b.corner_loss_db = c.corner_loss_db;
  b.min_distance_m = c.min_distance_m;
  b.combining = combining_of(c.snr_combining);
  return b;
}

SolverConfig solver_of(const RunConfig& c) {
  SolverConfig s;
  s.feasibility_tol = c.feasibility_tol;
  s.duality_gap_tol = c.duality_gap_tol;
  s.barrier_increase_factor = c.barrier_increase_factor;
  s.newton_tol = c.newton_tol;
  s.max_outer_iters = c.max_outer_iters;
  s.max_inner_iters = c.max_inner_iters;
  return s;
}

std::vector<Variant> variants_of(const RunConfig& c) {
  std::vector<Variant> out;
  for (const std::string& name : c.scenarios) {
    const Variant v = variant_from_string(name);
    for (Variant seen : out) {
      if (seen == v) throw ConfigError("scenario listed twice: " + name);
    }
    out.push_back(v);
  }
  return out;
}

void validate(const RunConfig& c) {
  if (c.scenarios.empty()) throw ConfigError("scenario list is empty");
  variants_of(c);
  budget_of(c).validate();
  solver_of(c).validate();
  if (!c.topology_file.empty() && !std::filesystem::is_regular_file(c.topology_file)) {
    throw ConfigError("topology file not found: " + c.topology_file);
  }
  if (!c.gains_csv.empty() && !std::filesystem::is_regular_file(c.gains_csv)) {
    throw ConfigError("gains file not found: " + c.gains_csv);
  }
  if (c.anchor_policy != "reference") anchor_policy_from_string(c.anchor_policy);
  if (c.anchor_policy == "manual" && c.anchor_ids.empty()) {
    throw ConfigError("manual anchor policy needs anchor_ids");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir is empty");
}

Resolved resolve(const RunConfig& c) {
  validate(c);
  Resolved r;
  r.budget = budget_of(c);
  r.solver = solver_of(c);
  r.variants = variants_of(c);
  if (c.topology_file.empty()) {
    GridSpec spec;
    spec.rows = c.grid_rows;
    spec.cols = c.grid_cols;
    spec.inter_site_m = c.inter_site_m;
    spec.street_width_m = c.street_width_m;
    spec.n_ues = c.n_ues;
    spec.seed = c.seed;
    r.topology = generate_grid(spec);
  } else {
    r.topology = topology_from_json(read_file(c.topology_file));
  }
  const GainMatrix gains = c.gains_csv.empty()
                               ? synth_gain_matrix(r.topology, r.budget)
                               : load_gains_csv(c.gains_csv, r.topology.num_nodes());
  r.links = build_link_table(r.topology, gains, r.budget);

  const int nb = r.topology.num_bs();
  if (c.anchor_policy == "reference") {
    if (nb != 18) throw ConfigError(fmt::format("reference anchors need 18 sites, topology has {}", nb));
    r.anchors = AnchorSet::from_ids(nb, reference_anchor_layout());
  } else {
    AnchorRequest req;
    req.policy = anchor_policy_from_string(c.anchor_policy);
    req.k = c.anchor_count;
    req.manual = c.anchor_ids;
    req.seed = c.seed;
    const std::vector<double> strength = ue_bs_gain_db(r.links);
    r.anchors = select_anchors(r.topology, req, strength);
  }
  return r;
}

std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto add = [&kv](const char* key, const auto& value) { kv.emplace_back(key, fmt::format("{}", value)); };
  auto add_list = [&kv](const char* key, const auto& values) {
    kv.emplace_back(key, fmt::format("{}", fmt::join(values, ",")));
  };
  add("topology_file", c.topology_file);
  add("grid_rows", c.grid_rows);
  add("grid_cols", c.grid_cols);
  add("inter_site_m", c.inter_site_m);
  add("street_width_m", c.street_width_m);
  add("n_ues", c.n_ues);
  add("gains_csv", c.gains_csv);
  add("ue_tx_power_dbm", c.ue_tx_power_dbm);
  add("bs_array_gain_db", c.bs_array_gain_db);
  add("bs_eirp_dbm", c.bs_eirp_dbm);
  add("bandwidth_ghz", c.bandwidth_ghz);
  add("carrier_ghz", c.carrier_ghz);
  add("atmospheric_db_per_km", c.atmospheric_db_per_km);
  add("polarization_loss_db", c.polarization_loss_db);
  add("alignment_error_db", c.alignment_error_db);
  add("implementation_loss_db", c.implementation_loss_db);
  add("fiber_capacity_mbps", c.fiber_capacity_mbps);
  add("noise_figure_db", c.noise_figure_db);
  add("snr_cap_db", c.snr_cap_db);
  add("min_snr_db", c.min_snr_db);
  add("corner_loss_db", c.corner_loss_db);
  add("min_distance_m", c.min_distance_m);
  add("snr_combining", c.snr_combining);
  add("anchor_policy", c.anchor_policy);
  add("anchor_count", c.anchor_count);
  add_list("anchor_ids", c.anchor_ids);
  add_list("scenarios", c.scenarios);
  add("feasibility_tol", c.feasibility_tol);
  add("duality_gap_tol", c.duality_gap_tol);
  add("barrier_increase_factor", c.barrier_increase_factor);
  add("newton_tol", c.newton_tol);
  add("max_outer_iters", c.max_outer_iters);
  add("max_inner_iters", c.max_inner_iters);
  add("seed", c.seed);
  add_list("k_values", c.k_values);
  add_list("sweep_seeds", c.sweep_seeds);
  add("include_excluded", c.include_excluded);
  add("hop_decomposition", "shortest-path-first, lexicographic ties, downlink");
  return kv;
}

std::string provenance_comment(const RunConfig& c) {
  std::string out = "# iabplan " IABPLAN_VERSION "\n";
  for (const auto& [k, v] : provenance(c)) out += fmt::format("# {} = {}\n", k, v);
  return out;
}

}  // namespace iab::cli
