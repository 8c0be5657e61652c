#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "iabplan/errors.hpp"
#include "iabplan/metrics.hpp"

namespace iab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Backhaul flow oriented away from the anchors.
struct Outward {
  int nb = 0;
  std::vector<std::vector<double>> flow;  // nb x nb residual
  std::vector<double> supply;             // fiber injection per BS
  std::vector<double> demand;             // access traffic per BS
};

std::vector<int> distances_to_demand(const Outward& g, double eps) {
  std::vector<int> dist(g.nb, -1);
  std::deque<int> q;
  for (int v = 0; v < g.nb; ++v) {
    if (g.demand[v] > eps) {
      dist[v] = 0;
      q.push_back(v);
    }
  }
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int u = 0; u < g.nb; ++u) {
      if (dist[u] < 0 && g.flow[u][v] > eps) {
        dist[u] = dist[v] + 1;
        q.push_back(u);
      }
    }
  }
  return dist;
}

std::vector<double> structural_hops(const ConnectivityPattern& pattern, const AnchorSet& anchors, bool uplink) {
  const int nb = pattern.num_bs();
  std::vector<double> hops(nb, kInf);
  std::deque<int> q;
  for (int j = 0; j < nb; ++j) {
    if (anchors.is_anchor(j)) {
      hops[j] = 0.0;
      q.push_back(j);
    }
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int v = 0; v < nb; ++v) {
      const bool edge = uplink ? pattern.backhaul(v, u) : pattern.backhaul(u, v);
      if (edge && std::isinf(hops[v])) {
        hops[v] = hops[u] + 1.0;
        q.push_back(v);
      }
    }
  }
  return hops;
}

}  // namespace

HopReport hop_counts(const RateProblem& problem, const Solution& solution, const ConnectivityPattern& pattern,
                     bool uplink) {
  const int nb = problem.num_bs;
  if (pattern.num_bs() != nb) throw ConfigError("pattern does not match the problem");

  double max_flow = 0.0;
  for (double f : solution.flow_bps) max_flow = std::max(max_flow, f);
  const double routed_min = 1e-7 * max_flow;
  const double eps = 1e-12 * std::max(max_flow, 1.0);

  Outward g;
  g.nb = nb;
  g.flow.assign(nb, std::vector<double>(nb, 0.0));
  g.supply.assign(nb, 0.0);
  g.demand.assign(nb, 0.0);
  double total = 0.0;
  double delivered = 0.0;
  for (std::size_t k = 0; k < problem.arcs.size(); ++k) {
    const Arc& a = problem.arcs[k];
    const double f = solution.flow_bps[k];
    if (f <= eps) continue;
    if (!uplink && a.kind == ArcKind::kBackhaulDownlink) {
      g.flow[a.tail][a.head] += f;
      total += f;
    } else if (uplink && a.kind == ArcKind::kBackhaulUplink) {
      g.flow[a.head][a.tail] += f;
      total += f;
    } else if (!uplink && a.kind == ArcKind::kAccessDownlink) {
      g.demand[a.tail] += f;
      delivered += f;
    } else if (uplink && a.kind == ArcKind::kAccessUplink) {
      g.demand[a.head] += f;
      delivered += f;
    }
  }
  for (int j = 0; j < nb; ++j) {
    if (problem.anchors.is_anchor(j)) g.supply[j] = uplink ? solution.fiber_ul_bps[j] : solution.fiber_dl_bps[j];
  }

  std::vector<Route> paths;
  for (;;) {
    const std::vector<int> dist = distances_to_demand(g, eps);
    int start = -1;
    for (int j = 0; j < nb; ++j) {
      if (g.supply[j] > eps && dist[j] >= 0 && (start < 0 || dist[j] < dist[start])) start = j;
    }
    if (start < 0) break;
    std::vector<int> nodes{start};
    double rate = g.supply[start];
    int cur = start;
    while (dist[cur] > 0) {
      int next = -1;
      for (int v = 0; v < nb; ++v) {
        if (g.flow[cur][v] > eps && dist[v] == dist[cur] - 1) {
          next = v;
          break;
        }
      }
      rate = std::min(rate, g.flow[cur][next]);
      nodes.push_back(next);
      cur = next;
    }
    rate = std::min(rate, g.demand[cur]);
    g.supply[start] -= rate;
    g.demand[cur] -= rate;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) g.flow[nodes[i]][nodes[i + 1]] -= rate;
    paths.push_back({std::move(nodes), rate});
  }

  double left = 0.0;
  double imbalance = 0.0;
  for (int u = 0; u < nb; ++u) {
    double net = g.supply[u] - g.demand[u];
    for (int v = 0; v < nb; ++v) {
      left += std::max(g.flow[u][v], 0.0);
      net += g.flow[v][u] - g.flow[u][v];
    }
    imbalance += std::abs(net);
  }
  HopReport report;
  report.circulating = total > 0.0 ? left / total : 0.0;
  report.decomposition_residual = delivered > 0.0 ? imbalance / delivered : 0.0;
  if (report.decomposition_residual > 1e-6) {
    throw SolverError(fmt::format("flow decomposition left {:.3g} of the delivered flow unbalanced",
                                  report.decomposition_residual));
  }

  const std::vector<double> fallback = structural_hops(pattern, problem.anchors, uplink);
  report.per_bs.resize(nb);
  for (int j = 0; j < nb; ++j) report.per_bs[j].bs = j;
  for (const Route& p : paths) {
    for (std::size_t i = 1; i < p.nodes.size(); ++i) {
      BsHops& h = report.per_bs[p.nodes[i]];
      h.routes.push_back({std::vector<int>(p.nodes.begin(), p.nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1),
                          p.rate_bps});
    }
  }
  for (int j = 0; j < nb; ++j) {
    BsHops& h = report.per_bs[j];
    if (problem.anchors.is_anchor(j)) {
      h.hops = 0.0;
      h.routed = true;
      h.routes.clear();
      continue;
    }
    double sum = 0.0;
    double weighted = 0.0;
    for (const Route& r : h.routes) {
      sum += r.rate_bps;
      weighted += r.rate_bps * static_cast<double>(r.nodes.size() - 1);
    }
    if (sum > routed_min) {
      h.routed = true;
      h.hops = weighted / sum;
      for (const Route& r : h.routes) h.weights.push_back(r.rate_bps / sum);
    } else {
      h.routes.clear();
      h.hops = fallback[j];
    }
  }

  std::map<double, int> counts;
  int finite = 0;
  double hop_sum = 0.0;
  int zero = 0;
  for (const BsHops& h : report.per_bs) {
    ++counts[h.hops];
    if (h.hops == 0.0) ++zero;
    if (std::isfinite(h.hops)) {
      ++finite;
      hop_sum += h.hops;
    }
  }
  int running = 0;
  for (const auto& [hops, n] : counts) {
    running += n;
    report.cdf.emplace_back(hops, static_cast<double>(running) / nb);
  }
  report.mass_at_zero = static_cast<double>(zero) / nb;
  report.mean_hops = finite > 0 ? hop_sum / finite : 0.0;
  return report;
}

}  // namespace iab
