#include "iabplan/kkt.hpp"

#include <algorithm>
#include <cmath>

#include "iabplan/errors.hpp"

namespace iab {

namespace {

double rel(double residual, double scale) { return std::abs(residual) / std::max(scale, 1e-300); }

}  // namespace

KktReport check_kkt(const RateProblem& problem, const Solution& s, const KktTolerances& tol) {
  const int na = static_cast<int>(problem.arcs.size());
  const int nb = problem.num_bs;
  const Duals& d = s.duals;
  if (d.capacity.size() != static_cast<std::size_t>(na) || d.resource.size() != static_cast<std::size_t>(nb)) {
    throw ConfigError("solution carries no multipliers for this problem");
  }
  KktReport r;
  r.primal = validate(problem, s).max();

  std::vector<double> inv_rate(problem.arcs.size(), 0.0);
  for (const UeGroup& g : problem.groups) {
    const double ul = s.rate_ul_bps[g.ue];
    const double dl = s.rate_dl_bps[g.ue];
    for (int k : g.uplink_arcs) inv_rate[k] = ul > 0.0 ? 1.0 / ul : HUGE_VAL;
    for (int k : g.downlink_arcs) inv_rate[k] = dl > 0.0 ? 1.0 / dl : HUGE_VAL;
  }

  double dual_neg = 0.0;
  double comp = 0.0;
  for (int k = 0; k < na; ++k) {
    const Arc& a = problem.arcs[k];
    double rho = 0.0;
    double rho_abs = 0.0;
    for (int j : a.bs) {
      if (j < 0) continue;
      rho += d.resource[j];
      rho_abs += std::abs(d.resource[j]);
    }
    // d/dt: -mu c + sum rho - pi_t
    const double mu_c = d.capacity[k] * a.capacity_bps;
    r.stationarity = std::max(
        r.stationarity, rel(-mu_c + rho - d.time_lower[k], std::abs(mu_c) + rho_abs + std::abs(d.time_lower[k])));

    // d/df: -1/R + mu + conservation terms - pi_f
    double cons = 0.0;
    double cons_abs = 0.0;
    auto add = [&](double v) {
      cons += v;
      cons_abs += std::abs(v);
    };
    if (is_downlink(a.kind)) {
      if (a.tail < nb) add(d.conservation_dl[a.tail]);
      if (a.head < nb) add(-d.conservation_dl[a.head]);
    } else {
      if (a.tail < nb) add(-d.conservation_ul[a.tail]);
      if (a.head < nb) add(d.conservation_ul[a.head]);
    }
    const double obj = -inv_rate[k];
    const double res = obj + d.capacity[k] + cons - d.flow_lower[k];
    r.stationarity = std::max(
        r.stationarity,
        rel(res, std::abs(obj) + std::abs(d.capacity[k]) + cons_abs + std::abs(d.flow_lower[k])));

    const double scale_f = std::abs(obj) + std::abs(d.capacity[k]) + cons_abs;
    dual_neg = std::max({dual_neg, rel(std::min(d.capacity[k], 0.0), scale_f),
                         rel(std::min(d.flow_lower[k], 0.0), scale_f),
                         rel(std::min(d.time_lower[k], 0.0), rho_abs)});

    comp += std::abs(d.capacity[k] * (s.time[k] * a.capacity_bps - s.flow_bps[k]));
    comp += std::abs(d.time_lower[k] * s.time[k]) + std::abs(d.flow_lower[k] * s.flow_bps[k]);
  }

  std::vector<double> budget(nb, 0.0);
  for (int k = 0; k < na; ++k) {
    for (int j : problem.arcs[k].bs) {
      if (j >= 0) budget[j] += s.time[k];
    }
  }
  double rho_scale = 0.0;
  for (int j = 0; j < nb; ++j) rho_scale = std::max(rho_scale, std::abs(d.resource[j]));
  for (int j = 0; j < nb; ++j) {
    dual_neg = std::max(dual_neg, rel(std::min(d.resource[j], 0.0), rho_scale));
    comp += std::abs(d.resource[j] * (1.0 - budget[j]));

    const double limit = problem.anchors.is_anchor(j) ? problem.fiber_capacity_bps : 0.0;
    comp += std::abs(d.fiber[j] * (limit - s.fiber_dl_bps[j] - s.fiber_ul_bps[j]));
    comp += std::abs(d.fiber_dl_lower[j] * s.fiber_dl_bps[j]) + std::abs(d.fiber_ul_lower[j] * s.fiber_ul_bps[j]);
    if (problem.has_fiber_downlink[j]) {
      const double res = -d.conservation_dl[j] + d.fiber[j] - d.fiber_dl_lower[j];
      const double scale = std::abs(d.conservation_dl[j]) + std::abs(d.fiber[j]) + std::abs(d.fiber_dl_lower[j]);
      r.stationarity = std::max(r.stationarity, rel(res, scale));
      dual_neg = std::max({dual_neg, rel(std::min(d.fiber[j], 0.0), scale),
                           rel(std::min(d.fiber_dl_lower[j], 0.0), scale)});
    }
    if (problem.has_fiber_uplink[j]) {
      const double res = -d.conservation_ul[j] + d.fiber[j] - d.fiber_ul_lower[j];
      const double scale = std::abs(d.conservation_ul[j]) + std::abs(d.fiber[j]) + std::abs(d.fiber_ul_lower[j]);
      r.stationarity = std::max(r.stationarity, rel(res, scale));
      dual_neg = std::max({dual_neg, rel(std::min(d.fiber[j], 0.0), scale),
                           rel(std::min(d.fiber_ul_lower[j], 0.0), scale)});
    }
  }
  r.dual_feasibility = dual_neg;
  r.complementarity = problem.num_rates() > 0 ? comp / problem.num_rates() : comp;

  r.stationarity_ok = r.stationarity <= tol.stationarity;
  r.primal_ok = r.primal <= tol.primal;
  r.dual_ok = r.dual_feasibility <= tol.dual_feasibility;
  r.complementarity_ok = r.complementarity <= tol.complementarity;
  return r;
}

}  // namespace iab
