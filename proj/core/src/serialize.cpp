#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "iabplan/solver.hpp"

namespace iab {

using nlohmann::ordered_json;

std::string solution_to_json(const RateProblem& problem, const SolveResult& result) {
  const Solution& s = result.solution;
  const Certificate& c = result.certificate;

  ordered_json arcs = ordered_json::array();
  for (std::size_t k = 0; k < problem.arcs.size(); ++k) {
    const Arc& a = problem.arcs[k];
    arcs.push_back({{"kind", std::string(to_string(a.kind))},
                    {"tail", a.tail},
                    {"head", a.head},
                    {"capacity_bps", a.capacity_bps},
                    {"time", s.time[k]},
                    {"flow_bps", s.flow_bps[k]}});
  }
  ordered_json fiber = ordered_json::array();
  for (int j = 0; j < problem.num_bs; ++j) {
    if (!problem.anchors.is_anchor(j)) continue;
    fiber.push_back({{"bs", j}, {"downlink_bps", s.fiber_dl_bps[j]}, {"uplink_bps", s.fiber_ul_bps[j]}});
  }
  ordered_json rates = ordered_json::array();
  for (const UeGroup& g : problem.groups) {
    rates.push_back({{"ue", g.ue}, {"uplink_bps", s.rate_ul_bps[g.ue]}, {"downlink_bps", s.rate_dl_bps[g.ue]}});
  }
  ordered_json excluded = ordered_json::array();
  for (const ExcludedUe& e : problem.excluded) {
    excluded.push_back({{"ue", e.ue}, {"reason", std::string(to_string(e.reason))}});
  }

  ordered_json doc;
  doc["variant"] = std::string(to_string(problem.variant));
  doc["anchors"] = problem.anchors.ids();
  doc["included_ues"] = problem.included_ues();
  doc["gm_bps"] = s.gm_bps;
  doc["mean_log_rate"] = s.mean_log_rate;
  doc["certificate"] = {{"converged", c.converged},
                        {"duality_gap", c.duality_gap},
                        {"relative_gap", c.relative_gap},
                        {"max_primal_residual", c.max_primal_residual},
                        {"barrier_weight", c.barrier_weight},
                        {"outer_iterations", c.outer_iterations},
                        {"newton_iterations", c.newton_iterations},
                        {"objective_trace", c.objective_trace}};
  doc["rates"] = std::move(rates);
  doc["excluded"] = std::move(excluded);
  doc["starved_bs"] = problem.starved_bs;
  doc["fiber"] = std::move(fiber);
  doc["arcs"] = std::move(arcs);
  return doc.dump(2);
}

void write_iterations_csv(const Certificate& certificate, std::ostream& out) {
  out << "outer_iteration,mean_log_rate,gm_bps\n";
  for (std::size_t i = 0; i < certificate.objective_trace.size(); ++i) {
    const double v = certificate.objective_trace[i];
    out << fmt::format("{},{:.12f},{:.6f}\n", i + 1, v, std::exp(v));
  }
}

}  // namespace iab
