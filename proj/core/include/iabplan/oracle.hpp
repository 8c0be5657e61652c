#pragma once

#include <cstdint>
#include <vector>

#include "iabplan/program.hpp"

namespace iab {

struct OracleBracket {
  double lower_gm_bps = 0.0;   // best grid point; always achievable
  double upper_gm_bps = 0.0;   // no feasible point does better; +inf when no grid point is positive
  std::vector<double> best_time;  // per arc
  std::int64_t points_evaluated = 0;
};

// Exhaustive grid search for tiny instances. Access-arc time fractions are
// enumerated on {0, 1/R, ..., 1}; every flow sits at its capacity bound and
// backhaul times follow from conservation along each access arc's unique
// route to its anchor. Within each group of arcs linked through shared
// constraints, the last arc takes its largest feasible level instead of
// being enumerated. Requirements (ConfigError otherwise): at most
// six time variables, unique backhaul routes, and at most `max_points`
// visited points.
OracleBracket brute_force_oracle(const RateProblem& problem, int resolution,
                                 std::int64_t max_points = 500'000'000);

}  // namespace iab
