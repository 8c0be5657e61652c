#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "iabplan/connectivity.hpp"
#include "iabplan/geometry.hpp"
#include "iabplan/linkbudget.hpp"

namespace iab {

enum class ArcKind { kAccessUplink, kAccessDownlink, kBackhaulUplink, kBackhaulDownlink };

std::string_view to_string(ArcKind kind);
bool is_downlink(ArcKind kind);
bool is_access(ArcKind kind);

// One directed link carrying one traffic direction. Each arc owns a time
// fraction t and a flow f with f <= t * capacity.
struct Arc {
  ArcKind kind = ArcKind::kAccessUplink;
  int tail = 0;  // global node numbers
  int head = 0;
  int ue = -1;   // access arcs only
  std::array<int, 2> bs = {-1, -1};  // base stations the arc touches
  double capacity_bps = 0.0;
};

enum class ExclusionReason { kNoLink, kStarved, kFiltered };

std::string_view to_string(ExclusionReason reason);

struct ExcludedUe {
  int ue = 0;
  ExclusionReason reason = ExclusionReason::kNoLink;
};

// A UE in the objective with its access arcs per direction.
struct UeGroup {
  int ue = 0;
  std::vector<int> uplink_arcs;
  std::vector<int> downlink_arcs;
};

// Rate-maximization program over a fixed connectivity pattern and fiber
// placement. Only arcs that can carry positive flow from a source to a sink
// are kept; arcs that are forced to zero by conservation are eliminated.
struct RateProblem {
  Variant variant = Variant::kAccessSS;
  int num_bs = 0;
  int num_ue = 0;
  double fiber_capacity_bps = 0.0;
  AnchorSet anchors;

  std::vector<Arc> arcs;
  std::vector<UeGroup> groups;       // the included UE set
  std::vector<ExcludedUe> excluded;
  std::vector<int> starved_bs;       // non-anchors with attached UEs but no route

  std::vector<std::uint8_t> has_fiber_downlink;  // per BS: M^D variable present
  std::vector<std::uint8_t> has_fiber_uplink;
  std::vector<std::vector<int>> incident;        // per BS: arcs in its time budget

  int included_ues() const { return static_cast<int>(groups.size()); }
  int num_rates() const { return 2 * included_ues(); }
  double max_capacity() const;
  std::size_t num_time_variables() const { return arcs.size(); }
  std::size_t num_variables() const;
};

struct AssembleOptions {
  // When set, UEs with a zero entry are left out of the objective.
  std::vector<std::uint8_t> ue_filter;
};

// Throws InfeasibleError when there is no fiber or no servable UE.
RateProblem assemble(const LinkTable& links, const ConnectivityPattern& pattern,
                     const AnchorSet& anchors, const BudgetConfig& budget,
                     const AssembleOptions& options = {});

// Multipliers of the full program (min -sum log rates), bps units.
struct Duals {
  std::vector<double> resource;         // per BS
  std::vector<double> fiber;            // per BS
  std::vector<double> conservation_dl;  // per BS
  std::vector<double> conservation_ul;  // per BS
  std::vector<double> capacity;         // per arc
  std::vector<double> time_lower;       // per arc
  std::vector<double> flow_lower;       // per arc
  std::vector<double> fiber_dl_lower;   // per BS
  std::vector<double> fiber_ul_lower;   // per BS
};

struct Solution {
  std::vector<double> time;       // per arc
  std::vector<double> flow_bps;   // per arc
  std::vector<double> fiber_dl_bps;  // M^D per BS
  std::vector<double> fiber_ul_bps;  // M^U per BS
  std::vector<double> rate_ul_bps;   // per UE; 0 for excluded UEs
  std::vector<double> rate_dl_bps;
  double mean_log_rate = 0.0;     // mean of ln(rate/bps) over included rates
  double gm_bps = 0.0;
  Duals duals;
};

// All-zero candidate shaped for `problem`.
Solution zero_candidate(const RateProblem& problem);

// Recomputes rates, mean log rate and GM from the arc flows.
void evaluate_rates(const RateProblem& problem, Solution& candidate);

// Worst violation per constraint family. Flow rows are relative to the
// largest arc capacity, the fiber row to the fiber capacity; time rows are
// dimensionless already.
struct ResidualReport {
  double capacity = 0.0;         // f - t c <= 0
  double conservation_dl = 0.0;
  double conservation_ul = 0.0;
  double fiber = 0.0;            // M^D + M^U <= M y
  double resource = 0.0;         // sum of incident t <= 1
  double nonnegativity = 0.0;

  double max() const;
  bool feasible(double tol) const { return max() <= tol; }
};

ResidualReport validate(const RateProblem& problem, const Solution& candidate);

// Sparse text dump: variables, constraint rows, coefficient triplets,
// objective groups. See README for the layout.
void dump_problem(const RateProblem& problem, std::ostream& out);

}  // namespace iab
