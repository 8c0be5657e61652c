#include "iabplan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <fmt/format.h>

namespace iab {

void SolverConfig::validate() const {
  if (!(feasibility_tol > 0.0)) throw ConfigError("feasibility_tol must be positive");
  if (!(duality_gap_tol > 0.0)) throw ConfigError("duality_gap_tol must be positive");
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (!(barrier_increase_factor > 1.0)) throw ConfigError("barrier_increase_factor must exceed 1");
  if (max_outer_iters < 1 || max_inner_iters < 1) throw ConfigError("iteration caps must be positive");
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Standard form A z = b, z = (x, r) with x >= 0 and r free but positive in
// the barrier domain. x holds normalized flows, fiber splits, resource
// slacks and fiber slacks; r holds the per-direction UE rates.
struct Layout {
  int na = 0;
  int nx = 0;
  int nr = 0;
  int rows = 0;
  double cref = 1.0;
  std::vector<int> md_col, mu_col, slack_col, sigma_col;
  std::vector<int> res_row, dl_row, ul_row, fiber_row;
  SpMat a;
  SpMat at;
  Vec b;
};

Layout build_layout(const RateProblem& p) {
  Layout L;
  const int nb = p.num_bs;
  L.na = static_cast<int>(p.arcs.size());
  L.nr = p.num_rates();
  L.cref = p.max_capacity();
  L.md_col.assign(nb, -1);
  L.mu_col.assign(nb, -1);
  L.slack_col.assign(nb, -1);
  L.sigma_col.assign(nb, -1);
  L.res_row.assign(nb, -1);
  L.dl_row.assign(nb, -1);
  L.ul_row.assign(nb, -1);
  L.fiber_row.assign(nb, -1);

  int col = L.na;
  for (int j = 0; j < nb; ++j) {
    if (p.has_fiber_downlink[j]) L.md_col[j] = col++;
    if (p.has_fiber_uplink[j]) L.mu_col[j] = col++;
  }
  for (int j = 0; j < nb; ++j) {
    if (!p.incident[j].empty()) L.slack_col[j] = col++;
  }
  // An anchor moves at most max incident capacity through its radios
  // (its time budget is 1), so a larger fiber pipe cannot bind.
  std::vector<double> max_incident(nb, 0.0);
  for (const Arc& a : p.arcs) {
    for (int j : a.bs) {
      if (j >= 0) max_incident[j] = std::max(max_incident[j], a.capacity_bps);
    }
  }
  for (int j = 0; j < nb; ++j) {
    if ((L.md_col[j] >= 0 || L.mu_col[j] >= 0) && p.fiber_capacity_bps < max_incident[j]) L.sigma_col[j] = col++;
  }
  L.nx = col;

  std::vector<std::uint8_t> dl_used(nb, 0), ul_used(nb, 0);
  for (const Arc& a : p.arcs) {
    auto& used = is_downlink(a.kind) ? dl_used : ul_used;
    for (int j : a.bs) {
      if (j >= 0) used[j] = 1;
    }
  }
  int row = L.nr;
  for (int j = 0; j < nb; ++j) {
    if (L.slack_col[j] >= 0) L.res_row[j] = row++;
  }
  for (int j = 0; j < nb; ++j) {
    if (dl_used[j] || L.md_col[j] >= 0) L.dl_row[j] = row++;
  }
  for (int j = 0; j < nb; ++j) {
    if (ul_used[j] || L.mu_col[j] >= 0) L.ul_row[j] = row++;
  }
  for (int j = 0; j < nb; ++j) {
    if (L.sigma_col[j] >= 0) L.fiber_row[j] = row++;
  }
  L.rows = row;

  std::vector<Eigen::Triplet<double>> trip;
  L.b = Vec::Zero(L.rows);
  for (int g = 0; g < p.included_ues(); ++g) {
    const UeGroup& grp = p.groups[g];
    trip.emplace_back(2 * g, L.nx + 2 * g, 1.0);
    trip.emplace_back(2 * g + 1, L.nx + 2 * g + 1, 1.0);
    for (int k : grp.uplink_arcs) trip.emplace_back(2 * g, k, -1.0);
    for (int k : grp.downlink_arcs) trip.emplace_back(2 * g + 1, k, -1.0);
  }
  for (int k = 0; k < L.na; ++k) {
    const Arc& a = p.arcs[k];
    const double chat = a.capacity_bps / L.cref;
    for (int j : a.bs) {
      if (j >= 0) trip.emplace_back(L.res_row[j], k, 1.0 / chat);
    }
    // DL rows: out - in - M^D; UL rows: in - out - M^U.
    const bool down = is_downlink(a.kind);
    const auto& rows = down ? L.dl_row : L.ul_row;
    const double sign = down ? 1.0 : -1.0;
    if (a.tail < p.num_bs) trip.emplace_back(rows[a.tail], k, sign);
    if (a.head < p.num_bs) trip.emplace_back(rows[a.head], k, -sign);
  }
  for (int j = 0; j < nb; ++j) {
    if (L.res_row[j] >= 0) {
      trip.emplace_back(L.res_row[j], L.slack_col[j], 1.0);
      L.b[L.res_row[j]] = 1.0;
    }
    if (L.md_col[j] >= 0) {
      trip.emplace_back(L.dl_row[j], L.md_col[j], -1.0);
      if (L.fiber_row[j] >= 0) trip.emplace_back(L.fiber_row[j], L.md_col[j], 1.0);
    }
    if (L.mu_col[j] >= 0) {
      trip.emplace_back(L.ul_row[j], L.mu_col[j], -1.0);
      if (L.fiber_row[j] >= 0) trip.emplace_back(L.fiber_row[j], L.mu_col[j], 1.0);
    }
    if (L.sigma_col[j] >= 0) {
      trip.emplace_back(L.fiber_row[j], L.sigma_col[j], 1.0);
      L.b[L.fiber_row[j]] = p.fiber_capacity_bps / L.cref;
    }
  }
  L.a.resize(L.rows, L.nx + L.nr);
  L.a.setFromTriplets(trip.begin(), trip.end());
  L.a.makeCompressed();
  L.at = L.a.transpose();
  return L;
}

// Strictly feasible start: one unit of flow along an anchor-to-UE (DL) or
// UE-to-anchor (UL) walk through every arc, then scaled so that each BS
// uses at most half its time and each anchor at most half its fiber.
Vec initial_point(const RateProblem& p, const Layout& L) {
  const int nb = p.num_bs;
  const int na = L.na;
  auto is_bs = [&](int node) { return node < nb; };

  std::vector<int> par_dl(nb, -1), nxt_dl(nb, -1), par_ul(nb, -1), nxt_ul(nb, -1);
  std::vector<std::uint8_t> seen(nb, 0);
  std::deque<int> q;

  // DL source tree from the anchors.
  for (int j = 0; j < nb; ++j) {
    if (p.anchors.is_anchor(j)) {
      seen[j] = 1;
      q.push_back(j);
    }
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int k = 0; k < na; ++k) {
      const Arc& a = p.arcs[k];
      if (a.kind == ArcKind::kBackhaulDownlink && a.tail == u && !seen[a.head]) {
        seen[a.head] = 1;
        par_dl[a.head] = k;
        q.push_back(a.head);
      }
    }
  }
  // DL sink tree toward the UEs.
  std::fill(seen.begin(), seen.end(), 0);
  for (int k = 0; k < na; ++k) {
    const Arc& a = p.arcs[k];
    if (a.kind == ArcKind::kAccessDownlink && !seen[a.tail]) {
      seen[a.tail] = 1;
      nxt_dl[a.tail] = k;
      q.push_back(a.tail);
    }
  }
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int k = 0; k < na; ++k) {
      const Arc& a = p.arcs[k];
      if (a.kind == ArcKind::kBackhaulDownlink && a.head == v && !seen[a.tail]) {
        seen[a.tail] = 1;
        nxt_dl[a.tail] = k;
        q.push_back(a.tail);
      }
    }
  }
  // UL source tree from the UEs.
  std::fill(seen.begin(), seen.end(), 0);
  for (int k = 0; k < na; ++k) {
    const Arc& a = p.arcs[k];
    if (a.kind == ArcKind::kAccessUplink && !seen[a.head]) {
      seen[a.head] = 1;
      par_ul[a.head] = k;
      q.push_back(a.head);
    }
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int k = 0; k < na; ++k) {
      const Arc& a = p.arcs[k];
      if (a.kind == ArcKind::kBackhaulUplink && a.tail == u && !seen[a.head]) {
        seen[a.head] = 1;
        par_ul[a.head] = k;
        q.push_back(a.head);
      }
    }
  }
  // UL sink tree toward the anchors.
  std::fill(seen.begin(), seen.end(), 0);
  for (int j = 0; j < nb; ++j) {
    if (p.anchors.is_anchor(j)) {
      seen[j] = 1;
      q.push_back(j);
    }
  }
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int k = 0; k < na; ++k) {
      const Arc& a = p.arcs[k];
      if (a.kind == ArcKind::kBackhaulUplink && a.head == v && !seen[a.tail]) {
        seen[a.tail] = 1;
        nxt_ul[a.tail] = k;
        q.push_back(a.tail);
      }
    }
  }

  std::vector<double> flow(na, 0.0), md(nb, 0.0), mu(nb, 0.0);
  for (int k = 0; k < na; ++k) {
    const Arc& a = p.arcs[k];
    flow[k] += 1.0;
    if (is_downlink(a.kind)) {
      int cur = a.tail;
      while (par_dl[cur] >= 0) {
        flow[par_dl[cur]] += 1.0;
        cur = p.arcs[par_dl[cur]].tail;
      }
      md[cur] += 1.0;
      cur = a.head;
      while (is_bs(cur)) {
        const int e = nxt_dl[cur];
        flow[e] += 1.0;
        cur = p.arcs[e].head;
      }
    } else {
      int cur = a.tail;
      while (is_bs(cur)) {
        const int e = par_ul[cur];
        flow[e] += 1.0;
        cur = p.arcs[e].tail;
      }
      cur = a.head;
      while (nxt_ul[cur] >= 0) {
        flow[nxt_ul[cur]] += 1.0;
        cur = p.arcs[nxt_ul[cur]].head;
      }
      mu[cur] += 1.0;
    }
  }

  std::vector<double> usage(nb, 0.0);
  for (int k = 0; k < na; ++k) {
    const double chat = p.arcs[k].capacity_bps / L.cref;
    for (int j : p.arcs[k].bs) {
      if (j >= 0) usage[j] += flow[k] / chat;
    }
  }
  const double mcap = p.fiber_capacity_bps / L.cref;
  double alpha = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nb; ++j) {
    if (usage[j] > 0.0) alpha = std::min(alpha, 0.5 / usage[j]);
    if (md[j] + mu[j] > 0.0) alpha = std::min(alpha, 0.5 * mcap / (md[j] + mu[j]));
  }

  Vec z = Vec::Zero(L.nx + L.nr);
  for (int k = 0; k < na; ++k) z[k] = alpha * flow[k];
  for (int j = 0; j < nb; ++j) {
    if (L.md_col[j] >= 0) z[L.md_col[j]] = alpha * md[j];
    if (L.mu_col[j] >= 0) z[L.mu_col[j]] = alpha * mu[j];
    if (L.slack_col[j] >= 0) z[L.slack_col[j]] = 1.0 - alpha * usage[j];
    if (L.sigma_col[j] >= 0) z[L.sigma_col[j]] = mcap - alpha * (md[j] + mu[j]);
  }
  for (int g = 0; g < p.included_ues(); ++g) {
    double ul = 0.0;
    double dl = 0.0;
    for (int k : p.groups[g].uplink_arcs) ul += z[k];
    for (int k : p.groups[g].downlink_arcs) dl += z[k];
    z[L.nx + 2 * g] = ul;
    z[L.nx + 2 * g + 1] = dl;
  }
  return z;
}

// Change of the barrier objective along z + alpha dz, summed term by term so
// that small decreases survive a large barrier weight.
double barrier_change(const Vec& z, const Vec& dz, double alpha, const Layout& L, double tau) {
  double v = 0.0;
  for (int i = 0; i < L.nx + L.nr; ++i) {
    const double ratio = alpha * dz[i] / z[i];
    if (!(ratio > -1.0)) return std::numeric_limits<double>::infinity();
    v -= (i < L.nx ? 1.0 : tau) * std::log1p(ratio);
  }
  return v;
}

double sum_log_rates(const Vec& z, const Layout& L) {
  double s = 0.0;
  for (int i = L.nx; i < L.nx + L.nr; ++i) s += std::log(z[i]);
  return s;
}

// Newton step through the normal equations A H^{-1} A^T w = A H^{-1} (-g) - r_p
// (sign conventions below), with one round of iterative refinement.
class StepSolver {
 public:
  using SpMatL = Eigen::SparseMatrix<long double>;
  explicit StepSolver(const Layout& L) : L_(L), al_(L.a.cast<long double>()), atl_(L.at.cast<long double>()) {}

  // Solves H dz + A^T w = -g, A dz = rp.
  bool solve(const Vec& hinv, const Vec& g, const Vec& rp, Vec& dz, Vec& w) {
    using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const LVec lh = hinv.cast<long double>();
    const LVec lg = g.cast<long double>();
    const SpMatL n = al_ * lh.asDiagonal() * atl_;
    if (!analyzed_) {
      ldlt_.analyzePattern(n);
      analyzed_ = true;
    }
    ldlt_.factorize(n);
    if (ldlt_.info() != Eigen::Success) return false;
    const LVec rhs = -rp.cast<long double>() - al_ * lh.cwiseProduct(lg);
    LVec lw = ldlt_.solve(rhs);
    lw += ldlt_.solve(rhs - n * lw);
    const LVec ldz = -lh.cwiseProduct(lg + atl_ * lw);
    dz = ldz.cast<double>();
    w = lw.cast<double>();
    return dz.allFinite() && w.allFinite();
  }

 private:
  const Layout& L_;
  SpMatL al_, atl_;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<SpMatL> ldlt_;
};

struct DualState {
  Vec nu;  // row multipliers, normalized units
  Vec lambda;  // multipliers of x >= 0
  bool feasible = false;
  double gap = std::numeric_limits<double>::infinity();
};

DualState dual_state(const Vec& z, const Vec& w, double tau, const Layout& L) {
  DualState d;
  d.nu = w / tau;
  const Vec atnu = L.at * d.nu;
  d.lambda = atnu.head(L.nx);
  d.feasible = d.lambda.minCoeff() >= 0.0;
  double dual = -d.nu.dot(L.b);
  for (int g = 0; g < L.nr; ++g) {
    const double ng = d.nu[g];
    if (!(ng > 0.0)) d.feasible = false;
    dual += 1.0 + std::log(std::max(ng, std::numeric_limits<double>::min()));
  }
  const double primal = -sum_log_rates(z, L);
  d.gap = d.feasible ? primal - dual : std::numeric_limits<double>::infinity();
  return d;
}

Solution to_solution(const RateProblem& p, const Layout& L, const Vec& z, const DualState* d) {
  Solution s = zero_candidate(p);
  const int nb = p.num_bs;
  for (int k = 0; k < L.na; ++k) {
    const Arc& a = p.arcs[k];
    s.flow_bps[k] = z[k] * L.cref;
    s.time[k] = s.flow_bps[k] / a.capacity_bps;
  }
  for (int j = 0; j < nb; ++j) {
    if (L.md_col[j] >= 0) s.fiber_dl_bps[j] = z[L.md_col[j]] * L.cref;
    if (L.mu_col[j] >= 0) s.fiber_ul_bps[j] = z[L.mu_col[j]] * L.cref;
  }
  evaluate_rates(p, s);

  Duals& du = s.duals;
  du.resource.assign(nb, 0.0);
  du.fiber.assign(nb, 0.0);
  du.conservation_dl.assign(nb, 0.0);
  du.conservation_ul.assign(nb, 0.0);
  du.capacity.assign(L.na, 0.0);
  du.time_lower.assign(L.na, 0.0);
  du.flow_lower.assign(L.na, 0.0);
  du.fiber_dl_lower.assign(nb, 0.0);
  du.fiber_ul_lower.assign(nb, 0.0);
  if (d == nullptr) return s;
  for (int j = 0; j < nb; ++j) {
    if (L.res_row[j] >= 0) du.resource[j] = d->nu[L.res_row[j]];
    if (L.fiber_row[j] >= 0) du.fiber[j] = d->nu[L.fiber_row[j]] / L.cref;
    if (L.dl_row[j] >= 0) du.conservation_dl[j] = d->nu[L.dl_row[j]] / L.cref;
    if (L.ul_row[j] >= 0) du.conservation_ul[j] = d->nu[L.ul_row[j]] / L.cref;
    if (L.md_col[j] >= 0) du.fiber_dl_lower[j] = d->lambda[L.md_col[j]] / L.cref;
    if (L.mu_col[j] >= 0) du.fiber_ul_lower[j] = d->lambda[L.mu_col[j]] / L.cref;
  }
  for (int k = 0; k < L.na; ++k) {
    const Arc& a = p.arcs[k];
    double rho = 0.0;
    for (int j : a.bs) {
      if (j >= 0) rho += du.resource[j];
    }
    du.capacity[k] = rho / a.capacity_bps;
    du.flow_lower[k] = d->lambda[k] / L.cref;
  }
  return s;
}

}  // namespace

SolveResult solve(const RateProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  if (problem.included_ues() == 0) throw InfeasibleError("no servable UEs");
  const Layout L = build_layout(problem);
  const int n = L.nx + L.nr;

  Vec z = initial_point(problem, L);
  Vec w = Vec::Zero(L.rows);
  double tau = static_cast<double>(L.nx) / L.nr;
  Certificate cert;
  StepSolver steps(L);
  DualState duals;

  auto finish = [&](bool converged) {
    SolveResult r{to_solution(problem, L, z, duals.feasible ? &duals : nullptr), cert};
    r.certificate.converged = converged;
    r.certificate.barrier_weight = tau;
    r.certificate.max_primal_residual = validate(problem, r.solution).max();
    return r;
  };

  for (int outer = 0;; ++outer) {
    if (outer >= cfg.max_outer_iters) {
      throw NotConvergedError(
          fmt::format("barrier method stopped after {} outer iterations with relative gap {:.3g}",
                      outer, cert.relative_gap),
          finish(false));
    }
    bool centered = false;
    double prev_lam2 = std::numeric_limits<double>::infinity();
    int stalls = 0;
    for (int inner = 0; inner < cfg.max_inner_iters; ++inner) {
      Vec grad(n), hinv(n);
      for (int i = 0; i < L.nx; ++i) {
        grad[i] = -1.0 / z[i];
        hinv[i] = z[i] * z[i];
      }
      for (int i = L.nx; i < n; ++i) {
        grad[i] = -tau / z[i];
        hinv[i] = z[i] * z[i] / tau;
      }
      const Vec resid = L.a * z - L.b;
      Vec dz, wn;
      if (!steps.solve(hinv, grad, -resid, dz, wn)) {
        throw NotConvergedError("Newton system could not be factorized", finish(false));
      }
      const double lam2 = dz.cwiseProduct(dz).cwiseQuotient(hinv).sum();
      ++cert.newton_iterations;

      double alpha_max = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (dz[i] < 0.0) alpha_max = std::min(alpha_max, -z[i] / dz[i]);
      }
      // Newton steps converge quadratically here; a decrement that stops
      // shrinking has hit rounding noise amplified by the barrier weight.
      stalls = lam2 < 0.01 && lam2 > 0.25 * prev_lam2 ? stalls + 1 : 0;
      prev_lam2 = lam2;
      if (lam2 / 2.0 <= cfg.newton_tol || stalls >= 3) {
        if (alpha_max > 1.0) z += dz;
        w = wn;
        centered = true;
        break;
      }
      double alpha = std::min(1.0, 0.99 * alpha_max);
      // Pure Newton steps in the quadratic region.
      if (lam2 >= 0.01) {
        // The step also cancels the equality residual; only the centering
        // part of the slope, -lam2, has to show up as a decrease.
        const double slope = grad.dot(dz);
        const double target = slope + 0.75 * lam2;
        while (alpha > 1e-14 && barrier_change(z, dz, alpha, L, tau) > alpha * target) {
          alpha *= 0.5;
        }
      }
      w = wn;
      if (alpha <= 1e-14) {
        centered = true;
        break;
      }
      z += alpha * dz;
    }
    if (!centered) {
      throw NotConvergedError(
          fmt::format("centering did not converge within {} Newton steps", cfg.max_inner_iters),
          finish(false));
    }

    // Restore the equality rows, solved apart from the gradient so that the
    // correction keeps its own precision.
    for (int round = 0; round < 2; ++round) {
      const Vec resid = L.a * z - L.b;
      if (resid.lpNorm<Eigen::Infinity>() == 0.0) break;
      Vec hinv(n);
      for (int i = 0; i < L.nx; ++i) hinv[i] = z[i] * z[i];
      for (int i = L.nx; i < n; ++i) hinv[i] = z[i] * z[i] / tau;
      Vec dz, unused;
      if (!steps.solve(hinv, Vec::Zero(n), -resid, dz, unused)) break;
      if (((z + dz).array() <= 0.0).any()) break;
      z += dz;
    }

    duals = dual_state(z, w, tau, L);
    cert.outer_iterations = outer + 1;
    cert.duality_gap = duals.gap;
    cert.relative_gap = duals.gap / L.nr;
    cert.objective_trace.push_back(sum_log_rates(z, L) / L.nr + std::log(L.cref));
    // Half the tolerance leaves room for rounding in independent checks.
    if (duals.feasible && cert.relative_gap <= 0.5 * cfg.duality_gap_tol) break;
    const double tau_final = 4.0 * L.nx / (cfg.duality_gap_tol * L.nr);
    tau = std::max(tau, std::min(tau * cfg.barrier_increase_factor, tau_final));
  }

  SolveResult result = finish(true);
  if (result.certificate.max_primal_residual > cfg.feasibility_tol) {
    throw NotConvergedError(fmt::format("primal residual {:.3g} exceeds tolerance {:.3g}",
                                        result.certificate.max_primal_residual, cfg.feasibility_tol),
                            result);
  }
  return result;
}

}  // namespace iab
