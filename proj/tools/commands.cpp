#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "iabplan/errors.hpp"
#include "iabplan/instances.hpp"
#include "iabplan/kkt.hpp"
#include "iabplan/metrics.hpp"
#include "iabplan/oracle.hpp"
#include "iabplan/scenario.hpp"

namespace iab::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed: " + path.string());
}

ordered_json provenance_json(const RunConfig& cfg) {
  ordered_json p;
  p["tool"] = "iabplan " IABPLAN_VERSION;
  for (const auto& [k, v] : provenance(cfg)) p[k] = v;
  return p;
}

std::string with_provenance(const RunConfig& cfg, const std::string& json_text) {
  ordered_json doc;
  doc["provenance"] = provenance_json(cfg);
  const ordered_json body = ordered_json::parse(json_text);
  for (const auto& [k, v] : body.items()) doc[k] = v;
  return doc.dump(2) + "\n";
}

std::string csv_with_provenance(const RunConfig& cfg, const std::string& body) {
  return provenance_comment(cfg) + body;
}

template <class Writer>
std::string capture(Writer&& write) {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

ordered_json hops_json(const HopReport& h) {
  ordered_json per = ordered_json::array();
  for (const BsHops& b : h.per_bs) {
    ordered_json routes = ordered_json::array();
    for (std::size_t i = 0; i < b.routes.size(); ++i) {
      routes.push_back({{"nodes", b.routes[i].nodes},
                        {"rate_bps", b.routes[i].rate_bps},
                        {"weight", b.weights.empty() ? 0.0 : b.weights[i]}});
    }
    per.push_back({{"bs", b.bs},
                   {"hops", std::isfinite(b.hops) ? ordered_json(b.hops) : ordered_json(nullptr)},
                   {"routed", b.routed},
                   {"routes", routes}});
  }
  ordered_json cdf = ordered_json::array();
  for (const auto& [hops, frac] : h.cdf) {
    cdf.push_back({std::isfinite(hops) ? ordered_json(hops) : ordered_json(nullptr), frac});
  }
  return {{"mass_at_zero", h.mass_at_zero},
          {"mean_hops", h.mean_hops},
          {"circulating", h.circulating},
          {"decomposition_residual", h.decomposition_residual},
          {"cdf", cdf},
          {"per_bs", per}};
}

std::string scenario_json(const RunConfig& cfg, const ScenarioResult& s) {
  ordered_json doc = ordered_json::parse(with_provenance(cfg, solution_to_json(s.problem, s.result)));
  const KktReport k = check_kkt(s.problem, s.result.solution);
  doc["kkt"] = {{"stationarity", k.stationarity},
                {"primal", k.primal},
                {"dual_feasibility", k.dual_feasibility},
                {"complementarity", k.complementarity},
                {"passed", k.passed()}};
  if (has_backhaul(s.variant)) doc["hops"] = hops_json(hop_counts(s.problem, s.result.solution, s.pattern));
  return doc.dump(2) + "\n";
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  const Resolved r = resolve(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  ScenarioOptions opt;
  opt.tie_seed = cfg.seed;
  opt.solver = r.solver;
  const std::vector<ScenarioResult> results = run_scenarios(r.links, r.anchors, r.budget, r.variants, opt);

  write_file(dir / "topology.json", with_provenance(cfg, topology_to_json(r.topology)));
  write_file(dir / "links.csv",
             csv_with_provenance(cfg, capture([&](std::ostream& o) { write_link_table_csv(r.links, o); })));

  std::vector<RateReport> reports;
  for (const ScenarioResult& s : results) {
    const std::string name(to_string(s.variant));
    write_file(dir / ("solution_" + name + ".json"), scenario_json(cfg, s));
    write_file(dir / ("rates_" + name + ".csv"),
               csv_with_provenance(cfg, capture([&](std::ostream& o) { write_rate_report_csv(s.report, o); })));
    const auto cdf = rate_cdf(s.report, RateDirection::kCombined, cfg.include_excluded);
    write_file(dir / ("cdf_" + name + ".csv"),
               csv_with_provenance(cfg, capture([&](std::ostream& o) { write_cdf_csv(cdf, o); })));
    write_file(dir / ("pattern_" + name + ".json"), with_provenance(cfg, pattern_to_json(s.pattern)));
    if (cfg.dump_iterations) {
      write_file(dir / ("iterations_" + name + ".csv"),
                 csv_with_provenance(cfg, capture([&](std::ostream& o) {
                                       write_iterations_csv(s.result.certificate, o);
                                     })));
    }
    if (cfg.dump_problem) {
      write_file(dir / ("problem_" + name + ".txt"),
                 csv_with_provenance(cfg, capture([&](std::ostream& o) { dump_problem(s.problem, o); })));
    }
    reports.push_back(s.report);
  }

  const CompareTable table = compare_table(reports);
  write_file(dir / "compare.txt", provenance_comment(cfg) + table.to_text());
  ordered_json cmp;
  cmp["provenance"] = provenance_json(cfg);
  cmp["rows"] = ordered_json::parse(table.to_json());
  write_file(dir / "compare.json", cmp.dump(2) + "\n");

  fmt::print(log, "{}", table.to_text());
  fmt::print(log, "artifacts in {}\n", dir.string());
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  if (cfg.k_values.empty()) throw ConfigError("sweep needs k_values");
  if (cfg.sweep_seeds.empty()) throw ConfigError("sweep needs sweep_seeds");
  if (cfg.anchor_policy != "seeded-random" && cfg.anchor_policy != "random" &&
      cfg.anchor_policy != "greedy-coverage" && cfg.anchor_policy != "greedy") {
    throw ConfigError("sweep needs anchor_policy seeded-random or greedy-coverage");
  }
  RunConfig base = cfg;
  base.anchor_count = cfg.k_values.front();
  const Resolved r = resolve(base);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  const SweepResult sweep = fiber_sweep(r.topology, r.links, r.budget, r.variants, cfg.k_values, cfg.sweep_seeds,
                                        anchor_policy_from_string(cfg.anchor_policy), r.solver);
  write_file(dir / "sweep.csv",
             csv_with_provenance(cfg, capture([&](std::ostream& o) { write_sweep_csv(sweep, o); })));
  const std::string summary = sweep_summary_text(sweep);
  write_file(dir / "sweep.txt", provenance_comment(cfg) + summary);
  fmt::print(log, "{}", summary);
  return kExitOk;
}

namespace {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

KktTolerances kkt_tol(const SolverConfig& s) {
  KktTolerances t;
  t.primal = std::max(t.primal, s.feasibility_tol);
  return t;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const SolverConfig solver = solver_of(cfg);
  solver.validate();
  std::vector<Check> checks;
  bool kkt_all = true;
  int kkt_count = 0;
  auto kkt = [&](const RateProblem& p, const SolveResult& s) {
    ++kkt_count;
    kkt_all = kkt_all && check_kkt(p, s.solution, kkt_tol(solver)).passed();
  };

  {
    const double c = 1e9;
    const RateProblem p = single_link_instance(c).assemble();
    const SolveResult s = solve(p, solver);
    kkt(p, s);
    const double e = rel(s.solution.gm_bps, c / 2.0);
    checks.push_back({"analytic single link", e <= 1e-6, fmt::format("rel err {:.2e}", e)});
  }
  {
    const double cb = 2e9;
    const double ca = 3e9;
    const RateProblem p = relay_chain_instance(cb, ca).assemble();
    const SolveResult s = solve(p, solver);
    kkt(p, s);
    const double e = rel(s.solution.gm_bps, 1.0 / (2.0 * (1.0 / ca + 1.0 / cb)));
    checks.push_back({"analytic relay chain", e <= 1e-6, fmt::format("rel err {:.2e}", e)});
  }
  {
    int agree = 0;
    const int n = 10;
    for (int i = 0; i < n; ++i) {
      const RateProblem p = random_small_instance(cfg.seed + static_cast<std::uint64_t>(i)).assemble();
      const SolveResult s = solve(p, solver);
      kkt(p, s);
      const OracleBracket o = brute_force_oracle(p, 1000);
      const double slack = std::exp(s.certificate.relative_gap);
      if (s.solution.gm_bps * slack >= o.lower_gm_bps && s.solution.gm_bps <= o.upper_gm_bps) ++agree;
    }
    checks.push_back({"oracle agreement", agree == n, fmt::format("{}/{} inside bracket", agree, n)});
  }
  {
    const std::vector<Variant> chain = {Variant::kAccessSS, Variant::kIabST, Variant::kIabMeshSS,
                                        Variant::kIabMeshLB};
    int ordered = 0;
    const int n = 5;
    for (int i = 0; i < n; ++i) {
      const GridInstance g = random_grid_instance(cfg.seed + static_cast<std::uint64_t>(i));
      ScenarioOptions opt;
      opt.solver = solver;
      opt.tie_seed = cfg.seed + static_cast<std::uint64_t>(i);
      const auto res = run_scenarios(g.links, g.anchors, g.budget, chain, opt);
      bool ok = true;
      for (std::size_t v = 0; v < res.size(); ++v) {
        kkt(res[v].problem, res[v].result);
        if (v > 0) {
          const double slack = std::exp(2.0 * solver.duality_gap_tol);
          ok = ok && res[v - 1].report.gm_bps <= res[v].report.gm_bps * slack;
        }
      }
      if (ok) ++ordered;
    }
    checks.push_back({"variant ordering", ordered == n, fmt::format("{}/{} instances ordered", ordered, n)});
  }
  checks.push_back({"kkt certificates", kkt_all, fmt::format("{} solves checked", kkt_count)});

  bool all = true;
  for (const Check& c : checks) {
    fmt::print(log, "{:<22} {}  {}\n", c.name, c.pass ? "PASS" : "FAIL", c.detail);
    all = all && c.pass;
  }
  return all ? kExitOk : kExitConfig;
}

int guarded(const std::function<int()>& command, std::ostream& err) {
  try {
    return command();
  } catch (const NotConvergedError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitNotConverged;
  } catch (const InfeasibleError& e) {
    fmt::print(err, "infeasible: {}\n", e.what());
    return kExitInfeasible;
  } catch (const ConnectivityError& e) {
    fmt::print(err, "infeasible: {}\n", e.what());
    return kExitInfeasible;
  } catch (const SolverError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitNotConverged;
  } catch (const IngestError& e) {
    fmt::print(err, "error: {} (line {})\n", e.what(), e.line());
    return kExitConfig;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }
}

}  // namespace iab::cli
