#include "iabplan/scenario.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <ostream>
#include <tuple>

#include <fmt/format.h>

#include "iabplan/errors.hpp"

namespace iab {

std::vector<ScenarioResult> run_scenarios(const LinkTable& links, const AnchorSet& anchors,
                                          const BudgetConfig& budget, std::span<const Variant> variants,
                                          const ScenarioOptions& options) {
  if (variants.empty()) throw ConfigError("no scenarios requested");
  std::vector<ScenarioResult> out(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    out[i].variant = variants[i];
    out[i].pattern = make_scenario(variants[i], links, anchors, options.tie_seed);
    out[i].problem = assemble(links, out[i].pattern, anchors, budget);
  }

  if (options.common_population && variants.size() > 1) {
    std::vector<std::uint8_t> common(links.num_ue(), 1);
    for (const ScenarioResult& r : out) {
      std::vector<std::uint8_t> in(links.num_ue(), 0);
      for (const UeGroup& g : r.problem.groups) in[g.ue] = 1;
      for (int u = 0; u < links.num_ue(); ++u) common[u] = common[u] && in[u];
    }
    if (std::none_of(common.begin(), common.end(), [](std::uint8_t v) { return v != 0; })) {
      throw InfeasibleError("no servable UEs common to all requested scenarios");
    }
    AssembleOptions filter;
    filter.ue_filter = common;
    for (ScenarioResult& r : out) r.problem = assemble(links, r.pattern, anchors, budget, filter);
  }

  auto solve_one = [&](ScenarioResult& r) {
    r.result = solve(r.problem, options.solver);
    r.report = make_rate_report(r.problem, r.result.solution);
  };
  if (options.parallel) {
    std::vector<std::future<void>> jobs;
    for (ScenarioResult& r : out) jobs.push_back(std::async(std::launch::async, solve_one, std::ref(r)));
    for (auto& j : jobs) j.wait();
    for (auto& j : jobs) j.get();
  } else {
    for (ScenarioResult& r : out) solve_one(r);
  }
  return out;
}

std::vector<double> ue_bs_gain_db(const LinkTable& links) {
  std::vector<double> g(static_cast<std::size_t>(links.num_ue()) * links.num_bs());
  for (int u = 0; u < links.num_ue(); ++u) {
    for (int b = 0; b < links.num_bs(); ++b) g[u * links.num_bs() + b] = links.at(links.ue_node(u), b).gain_db;
  }
  return g;
}

SweepResult fiber_sweep(const Topology& topo, const LinkTable& links, const BudgetConfig& budget,
                        std::span<const Variant> variants, std::span<const int> k_values,
                        std::span<const std::uint64_t> seeds, AnchorPolicy policy, const SolverConfig& solver) {
  if (k_values.empty()) throw ConfigError("fiber sweep needs at least one anchor count");
  if (seeds.empty()) throw ConfigError("fiber sweep needs at least one seed");
  if (policy == AnchorPolicy::kManual) throw ConfigError("fiber sweep cannot use a manual anchor list");
  const std::vector<double> strength = ue_bs_gain_db(links);

  SweepResult sweep;
  for (int k : k_values) {
    for (std::uint64_t seed : seeds) {
      AnchorRequest req;
      req.policy = policy;
      req.k = k;
      req.seed = seed;
      const AnchorSet anchors = select_anchors(topo, req, strength);
      ScenarioOptions opts;
      opts.tie_seed = seed;
      opts.solver = solver;
      for (const ScenarioResult& r : run_scenarios(links, anchors, budget, variants, opts)) {
        sweep.points.push_back({k, r.variant, seed, r.result.solution.gm_bps});
      }
    }
  }

  std::map<std::tuple<int, Variant>, std::vector<double>> groups;
  for (const SweepPoint& p : sweep.points) groups[{p.k, p.variant}].push_back(p.gm_bps);
  for (const auto& [key, gms] : groups) {
    SweepSummary s;
    s.k = std::get<0>(key);
    s.variant = std::get<1>(key);
    double sum = 0.0;
    for (double v : gms) sum += v;
    s.mean_gm_bps = sum / static_cast<double>(gms.size());
    s.min_gm_bps = *std::min_element(gms.begin(), gms.end());
    s.max_gm_bps = *std::max_element(gms.begin(), gms.end());
    sweep.summary.push_back(s);
  }
  return sweep;
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << "k,variant,gm_mbps,seed\n";
  for (const SweepPoint& p : sweep.points) {
    out << fmt::format("{},{},{:.6f},{}\n", p.k, to_string(p.variant), p.gm_bps / 1e6, p.seed);
  }
}

std::string sweep_summary_text(const SweepResult& sweep) {
  std::string out = fmt::format("{:>4}  {:<10}  {:>12}  {:>12}  {:>12}\n", "k", "variant", "mean_mbps",
                                "min_mbps", "max_mbps");
  for (const SweepSummary& s : sweep.summary) {
    out += fmt::format("{:>4}  {:<10}  {:>12.3f}  {:>12.3f}  {:>12.3f}\n", s.k, to_string(s.variant),
                       s.mean_gm_bps / 1e6, s.min_gm_bps / 1e6, s.max_gm_bps / 1e6);
  }
  return out;
}

}  // namespace iab
