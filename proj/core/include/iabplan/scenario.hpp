#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "iabplan/connectivity.hpp"
#include "iabplan/geometry.hpp"
#include "iabplan/linkbudget.hpp"
#include "iabplan/metrics.hpp"
#include "iabplan/program.hpp"
#include "iabplan/solver.hpp"

namespace iab {

struct ScenarioOptions {
  std::uint64_t tie_seed = 1;
  SolverConfig solver;
  // Evaluate every variant over the UEs servable in all of them, so GMs
  // compare like with like.
  bool common_population = true;
  bool parallel = true;
};

struct ScenarioResult {
  Variant variant = Variant::kAccessSS;
  ConnectivityPattern pattern;
  RateProblem problem;
  SolveResult result;
  RateReport report;
};

// Solves each variant on one link table and anchor set. Results come back in
// the order of `variants`. Solver failures propagate.
std::vector<ScenarioResult> run_scenarios(const LinkTable& links, const AnchorSet& anchors,
                                          const BudgetConfig& budget,
                                          std::span<const Variant> variants,
                                          const ScenarioOptions& options);

struct SweepPoint {
  int k = 0;
  Variant variant = Variant::kAccessSS;
  std::uint64_t seed = 0;
  double gm_bps = 0.0;
};

struct SweepSummary {
  int k = 0;
  Variant variant = Variant::kAccessSS;
  double mean_gm_bps = 0.0;
  double min_gm_bps = 0.0;
  double max_gm_bps = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<SweepSummary> summary;
};

// GM versus number of fiber drops. For each k and seed, anchors come from
// `policy` (the seed drives both random anchor choice and SS tie-breaks).
SweepResult fiber_sweep(const Topology& topo, const LinkTable& links,
                        const BudgetConfig& budget, std::span<const Variant> variants,
                        std::span<const int> k_values, std::span<const std::uint64_t> seeds,
                        AnchorPolicy policy, const SolverConfig& solver);

// `k,variant,gm_mbps,seed`
void write_sweep_csv(const SweepResult& sweep, std::ostream& out);
std::string sweep_summary_text(const SweepResult& sweep);

// UE x BS gain matrix (row-major) for greedy anchor selection.
std::vector<double> ue_bs_gain_db(const LinkTable& links);

}  // namespace iab
