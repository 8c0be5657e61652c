#pragma once

#include <cstdint>
#include <vector>

#include "iabplan/connectivity.hpp"
#include "iabplan/geometry.hpp"
#include "iabplan/linkbudget.hpp"
#include "iabplan/program.hpp"

namespace iab {

// Small hand-built instances with known optima, shared by tests, the
// `verify` command and benchmarks.
struct Instance {
  LinkTable links;
  ConnectivityPattern pattern;
  AnchorSet anchors;
  BudgetConfig budget;

  RateProblem assemble() const;
};

// One anchor BS, one UE, equal UL/DL capacity c.
Instance single_link_instance(double capacity_bps);

// Anchor BS0 -> relay BS1 -> UE; capacities equal in both directions.
Instance relay_chain_instance(double backhaul_bps, double access_bps);

// Random instance with at most six time variables whose backhaul routes are
// unique: one UE behind a chain of 0-2 relays, or one UE load-balanced over
// two anchors, or two UEs on one anchor. Capacities are drawn in
// [0.5, 10] Gbps independently per direction.
Instance random_small_instance(std::uint64_t seed, bool one_ue_single_path = false);

// Random street-grid instance with synthetic gains and seeded random anchors.
struct GridInstance {
  Topology topology;
  LinkTable links;
  AnchorSet anchors;
  BudgetConfig budget;
};

GridInstance random_grid_instance(std::uint64_t seed, int min_bs = 4, int max_bs = 18,
                                  int min_ue = 20, int max_ue = 200);

GridInstance reference_grid_instance(std::uint64_t ue_seed, int n_ues = 600);

}  // namespace iab
