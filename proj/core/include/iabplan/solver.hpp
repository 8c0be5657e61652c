#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "iabplan/errors.hpp"
#include "iabplan/program.hpp"

namespace iab {

struct SolverConfig {
  double feasibility_tol = 1e-9;   // relative primal residual
  double duality_gap_tol = 1e-6;   // certified gap per rate (log domain)
  double barrier_increase_factor = 10.0;
  double newton_tol = 1e-10;       // half squared Newton decrement
  int max_outer_iters = 60;
  int max_inner_iters = 100;

  void validate() const;  // throws ConfigError
};

struct Certificate {
  bool converged = false;
  double duality_gap = 0.0;           // sum-of-logs units
  double relative_gap = 0.0;          // per rate; bounds ln(GM*/GM)
  double max_primal_residual = 0.0;   // relative
  double barrier_weight = 0.0;
  int outer_iterations = 0;
  int newton_iterations = 0;
  std::vector<double> objective_trace;  // mean ln(rate/bps) after each centering
};

struct SolveResult {
  Solution solution;
  Certificate certificate;
};

// Raised when an iteration cap is hit; carries the last iterate.
class NotConvergedError : public SolverError {
 public:
  NotConvergedError(const std::string& what, SolveResult best)
      : SolverError(what), best_(std::move(best)) {}
  const SolveResult& best() const noexcept { return best_; }

 private:
  SolveResult best_;
};

// Maximizes sum over included UEs of ln r_U + ln r_D with a primal
// log-barrier method. Time variables are eliminated (t = f / c is optimal
// for any flow), flows are normalized by the largest capacity, and each
// centering step is an equality-constrained Newton solve on the normal
// equations. The duality gap is certified from the Lagrange dual function.
SolveResult solve(const RateProblem& problem, const SolverConfig& cfg = {});

std::string solution_to_json(const RateProblem& problem, const SolveResult& result);
void write_iterations_csv(const Certificate& certificate, std::ostream& out);

}  // namespace iab
