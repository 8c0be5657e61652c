#pragma once

#include "iabplan/program.hpp"

namespace iab {

struct KktTolerances {
  double stationarity = 1e-6;
  double primal = 1e-9;
  double dual_feasibility = 1e-9;
  double complementarity = 1e-6;
};

// Relative residuals of the optimality conditions of the full program,
// evaluated from a Solution's primal values and its stored multipliers.
struct KktReport {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual_feasibility = 0.0;
  double complementarity = 0.0;  // sum of multiplier * slack, per rate
  bool stationarity_ok = false;
  bool primal_ok = false;
  bool dual_ok = false;
  bool complementarity_ok = false;

  bool passed() const { return stationarity_ok && primal_ok && dual_ok && complementarity_ok; }
};

KktReport check_kkt(const RateProblem& problem, const Solution& solution,
                    const KktTolerances& tol = {});

}  // namespace iab
