#include "iabplan/program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "iabplan/errors.hpp"

namespace iab {

std::string_view to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::kAccessUplink: return "access_ul";
    case ArcKind::kAccessDownlink: return "access_dl";
    case ArcKind::kBackhaulUplink: return "backhaul_ul";
    case ArcKind::kBackhaulDownlink: return "backhaul_dl";
  }
  return "unknown";
}

bool is_downlink(ArcKind kind) {
  return kind == ArcKind::kAccessDownlink || kind == ArcKind::kBackhaulDownlink;
}

bool is_access(ArcKind kind) { return kind == ArcKind::kAccessUplink || kind == ArcKind::kAccessDownlink; }

std::string_view to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::kNoLink: return "no_link";
    case ExclusionReason::kStarved: return "starved";
    case ExclusionReason::kFiltered: return "filtered";
  }
  return "unknown";
}

double RateProblem::max_capacity() const {
  double m = 0.0;
  for (const Arc& a : arcs) m = std::max(m, a.capacity_bps);
  return m;
}

std::size_t RateProblem::num_variables() const {
  std::size_t n = 2 * arcs.size();
  for (int i = 0; i < num_bs; ++i) n += has_fiber_downlink[i] + has_fiber_uplink[i];
  return n;
}

namespace {

// Reachability over base stations along directed backhaul arcs.
std::vector<std::uint8_t> closure(int nb, const std::vector<Arc>& arcs, ArcKind kind,
                                  std::vector<std::uint8_t> seed, bool forward) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Arc& a : arcs) {
      if (a.kind != kind) continue;
      const int from = forward ? a.tail : a.head;
      const int to = forward ? a.head : a.tail;
      if (seed[from] && !seed[to]) {
        seed[to] = 1;
        changed = true;
      }
    }
  }
  (void)nb;
  return seed;
}

// Drops backhaul arcs that lie on no simple source-to-sink path: a DL arc
// u->v is useless when every route from fiber to u already passes v, or
// every route from v to a UE passes u. UL is the mirror image. Flow on such
// an arc only circulates, so the optimum is unchanged.
std::vector<Arc> prune_detours_once(int nb, const std::vector<Arc>& arcs, const AnchorSet& anchors) {
  std::vector<std::uint8_t> dl_src = anchors.y, dl_dst(nb, 0), ul_src(nb, 0), ul_dst = anchors.y;
  for (const Arc& a : arcs) {
    if (a.kind == ArcKind::kAccessDownlink) dl_dst[a.tail] = 1;
    if (a.kind == ArcKind::kAccessUplink) ul_src[a.head] = 1;
  }
  auto reach_avoiding = [&](ArcKind kind, std::vector<std::uint8_t> from, int avoid, int to, bool forward) {
    from[avoid] = 0;
    std::vector<std::uint8_t> seen = from;
    std::vector<int> stack;
    for (int j = 0; j < nb; ++j) {
      if (seen[j]) stack.push_back(j);
    }
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (x == to) return true;
      for (const Arc& a : arcs) {
        if (a.kind != kind) continue;
        const int y0 = forward ? a.tail : a.head;
        const int y1 = forward ? a.head : a.tail;
        if (y0 == x && y1 != avoid && !seen[y1]) {
          seen[y1] = 1;
          stack.push_back(y1);
        }
      }
    }
    return false;
  };

  std::vector<Arc> out;
  for (const Arc& a : arcs) {
    bool keep = true;
    if (a.kind == ArcKind::kBackhaulDownlink) {
      keep = reach_avoiding(a.kind, dl_src, a.head, a.tail, true) &&
             reach_avoiding(a.kind, dl_dst, a.tail, a.head, false);
    } else if (a.kind == ArcKind::kBackhaulUplink) {
      keep = reach_avoiding(a.kind, ul_src, a.head, a.tail, true) &&
             reach_avoiding(a.kind, ul_dst, a.tail, a.head, false);
    }
    if (keep) out.push_back(a);
  }
  return out;
}

// Removed arcs are on no simple path, so later passes see the same paths.
// Repeats until no arc is left without a route on both sides.
std::vector<Arc> prune_detours(int nb, std::vector<Arc> arcs, const AnchorSet& anchors) {
  for (;;) {
    std::vector<Arc> out = prune_detours_once(nb, arcs, anchors);
    if (out.size() == arcs.size()) return out;
    arcs = std::move(out);
  }
}

}  // namespace

RateProblem assemble(const LinkTable& links, const ConnectivityPattern& pattern, const AnchorSet& anchors,
                     const BudgetConfig& budget, const AssembleOptions& options) {
  const int nb = links.num_bs();
  const int nu = links.num_ue();
  if (pattern.num_bs() != nb || pattern.num_ue() != nu) {
    throw ConfigError("connectivity pattern does not match the link table");
  }
  if (anchors.size() != nb) {
    throw ConfigError(fmt::format("anchor set has {} entries for {} base stations", anchors.size(), nb));
  }
  if (!options.ue_filter.empty() && static_cast<int>(options.ue_filter.size()) != nu) {
    throw ConfigError("UE filter length does not match the UE count");
  }
  if (!(budget.fiber_capacity_bps > 0.0)) throw ConfigError("fiber capacity must be positive");
  if (anchors.count() == 0) throw InfeasibleError("no fiber anywhere: the anchor set is empty");

  std::vector<Arc> all;
  for (int u = 0; u < nu; ++u) {
    const int un = links.ue_node(u);
    for (int b = 0; b < nb; ++b) {
      if (pattern.access.uplink(u, b) && links.exists(un, b)) {
        all.push_back({ArcKind::kAccessUplink, un, b, u, {b, -1}, links.capacity(un, b)});
      }
      if (pattern.access.downlink(b, u) && links.exists(b, un)) {
        all.push_back({ArcKind::kAccessDownlink, b, un, u, {b, -1}, links.capacity(b, un)});
      }
    }
  }
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nb; ++j) {
      if (i == j || !pattern.backhaul(i, j) || !links.exists(i, j)) continue;
      all.push_back({ArcKind::kBackhaulDownlink, i, j, -1, {i, j}, links.capacity(i, j)});
      all.push_back({ArcKind::kBackhaulUplink, i, j, -1, {i, j}, links.capacity(i, j)});
    }
  }

  // BSs fed from fiber in DL and BSs that can return traffic to fiber in UL.
  const std::vector<std::uint8_t> dl_fed = closure(nb, all, ArcKind::kBackhaulDownlink, anchors.y, true);
  const std::vector<std::uint8_t> ul_drains = closure(nb, all, ArcKind::kBackhaulUplink, anchors.y, false);

  std::vector<std::uint8_t> has_ul(nu, 0), has_dl(nu, 0), ul_ok(nu, 0), dl_ok(nu, 0);
  std::vector<std::uint8_t> attached(nb, 0);
  for (const Arc& a : all) {
    if (a.kind == ArcKind::kAccessUplink) {
      has_ul[a.ue] = 1;
      attached[a.head] = 1;
      if (ul_drains[a.head]) ul_ok[a.ue] = 1;
    } else if (a.kind == ArcKind::kAccessDownlink) {
      has_dl[a.ue] = 1;
      attached[a.tail] = 1;
      if (dl_fed[a.tail]) dl_ok[a.ue] = 1;
    }
  }

  RateProblem p;
  p.variant = pattern.variant;
  p.num_bs = nb;
  p.num_ue = nu;
  p.fiber_capacity_bps = budget.fiber_capacity_bps;
  p.anchors = anchors;

  std::vector<std::uint8_t> included(nu, 0);
  for (int u = 0; u < nu; ++u) {
    if (!has_ul[u] || !has_dl[u]) {
      p.excluded.push_back({u, ExclusionReason::kNoLink});
    } else if (!ul_ok[u] || !dl_ok[u]) {
      p.excluded.push_back({u, ExclusionReason::kStarved});
    } else if (!options.ue_filter.empty() && !options.ue_filter[u]) {
      p.excluded.push_back({u, ExclusionReason::kFiltered});
    } else {
      included[u] = 1;
    }
  }
  for (int b = 0; b < nb; ++b) {
    if (!anchors.is_anchor(b) && attached[b] && (!dl_fed[b] || !ul_drains[b])) p.starved_bs.push_back(b);
  }
  if (std::none_of(included.begin(), included.end(), [](std::uint8_t v) { return v != 0; })) {
    throw InfeasibleError(
        fmt::format("no servable UEs: {} of {} UEs have no route to fiber", p.excluded.size(), nu));
  }

  // DL: sources are anchors, sinks are included UEs. UL is the mirror image.
  std::vector<std::uint8_t> dl_sink(nb, 0), ul_source(nb, 0);
  for (const Arc& a : all) {
    if (a.kind == ArcKind::kAccessDownlink && included[a.ue]) dl_sink[a.tail] = 1;
    if (a.kind == ArcKind::kAccessUplink && included[a.ue]) ul_source[a.head] = 1;
  }
  dl_sink = closure(nb, all, ArcKind::kBackhaulDownlink, dl_sink, false);
  ul_source = closure(nb, all, ArcKind::kBackhaulUplink, ul_source, true);

  auto usable = [&](const Arc& a) {
    switch (a.kind) {
      case ArcKind::kAccessDownlink: return included[a.ue] && dl_fed[a.tail];
      case ArcKind::kAccessUplink: return included[a.ue] && ul_drains[a.head];
      case ArcKind::kBackhaulDownlink: return dl_fed[a.tail] && dl_sink[a.head];
      case ArcKind::kBackhaulUplink: return ul_source[a.tail] && ul_drains[a.head];
    }
    return false;
  };
  std::vector<Arc> kept;
  for (const Arc& a : all) {
    if (usable(a)) kept.push_back(a);
  }
  p.arcs = prune_detours(nb, kept, anchors);

  p.has_fiber_downlink.assign(nb, 0);
  p.has_fiber_uplink.assign(nb, 0);
  for (int b = 0; b < nb; ++b) {
    if (!anchors.is_anchor(b)) continue;
    p.has_fiber_downlink[b] = dl_sink[b];
    p.has_fiber_uplink[b] = ul_source[b];
  }

  p.incident.assign(nb, {});
  std::vector<int> group_of(nu, -1);
  for (int u = 0; u < nu; ++u) {
    if (!included[u]) continue;
    group_of[u] = static_cast<int>(p.groups.size());
    p.groups.push_back({u, {}, {}});
  }
  for (int k = 0; k < static_cast<int>(p.arcs.size()); ++k) {
    const Arc& a = p.arcs[k];
    for (int b : a.bs) {
      if (b >= 0) p.incident[b].push_back(k);
    }
    if (a.kind == ArcKind::kAccessUplink) p.groups[group_of[a.ue]].uplink_arcs.push_back(k);
    if (a.kind == ArcKind::kAccessDownlink) p.groups[group_of[a.ue]].downlink_arcs.push_back(k);
  }
  return p;
}

Solution zero_candidate(const RateProblem& problem) {
  Solution s;
  s.time.assign(problem.arcs.size(), 0.0);
  s.flow_bps.assign(problem.arcs.size(), 0.0);
  s.fiber_dl_bps.assign(problem.num_bs, 0.0);
  s.fiber_ul_bps.assign(problem.num_bs, 0.0);
  s.rate_ul_bps.assign(problem.num_ue, 0.0);
  s.rate_dl_bps.assign(problem.num_ue, 0.0);
  s.mean_log_rate = -std::numeric_limits<double>::infinity();
  return s;
}

void evaluate_rates(const RateProblem& problem, Solution& candidate) {
  candidate.rate_ul_bps.assign(problem.num_ue, 0.0);
  candidate.rate_dl_bps.assign(problem.num_ue, 0.0);
  double sum = 0.0;
  for (const UeGroup& g : problem.groups) {
    double ul = 0.0;
    double dl = 0.0;
    for (int k : g.uplink_arcs) ul += candidate.flow_bps[k];
    for (int k : g.downlink_arcs) dl += candidate.flow_bps[k];
    candidate.rate_ul_bps[g.ue] = ul;
    candidate.rate_dl_bps[g.ue] = dl;
    sum += (ul > 0.0 ? std::log(ul) : -std::numeric_limits<double>::infinity()) +
           (dl > 0.0 ? std::log(dl) : -std::numeric_limits<double>::infinity());
  }
  candidate.mean_log_rate = problem.num_rates() > 0 ? sum / problem.num_rates() : 0.0;
  candidate.gm_bps = std::exp(candidate.mean_log_rate);
}

double ResidualReport::max() const {
  return std::max({capacity, conservation_dl, conservation_ul, fiber, resource, nonnegativity});
}

ResidualReport validate(const RateProblem& problem, const Solution& c) {
  const std::size_t na = problem.arcs.size();
  const int nb = problem.num_bs;
  if (c.time.size() != na || c.flow_bps.size() != na || c.fiber_dl_bps.size() != static_cast<std::size_t>(nb) ||
      c.fiber_ul_bps.size() != static_cast<std::size_t>(nb)) {
    throw ConfigError("candidate solution does not match the problem shape");
  }
  const double cref = std::max(problem.max_capacity(), 1.0);
  const double mref = problem.fiber_capacity_bps;
  ResidualReport r;
  std::vector<double> dl(nb, 0.0), ul(nb, 0.0), budget(nb, 0.0);
  for (std::size_t k = 0; k < na; ++k) {
    const Arc& a = problem.arcs[k];
    r.capacity = std::max(r.capacity, (c.flow_bps[k] - c.time[k] * a.capacity_bps) / cref);
    r.nonnegativity = std::max({r.nonnegativity, -c.time[k], -c.flow_bps[k] / cref});
    for (int b : a.bs) {
      if (b >= 0) budget[b] += c.time[k];
    }
    const double f = c.flow_bps[k];
    switch (a.kind) {
      case ArcKind::kAccessDownlink: dl[a.tail] += f; break;
      case ArcKind::kAccessUplink: ul[a.head] += f; break;
      case ArcKind::kBackhaulDownlink:
        dl[a.tail] += f;
        dl[a.head] -= f;
        break;
      case ArcKind::kBackhaulUplink:
        ul[a.head] += f;
        ul[a.tail] -= f;
        break;
    }
  }
  for (int b = 0; b < nb; ++b) {
    const double md = c.fiber_dl_bps[b];
    const double mu = c.fiber_ul_bps[b];
    r.nonnegativity = std::max({r.nonnegativity, -md / cref, -mu / cref});
    r.conservation_dl = std::max(r.conservation_dl, std::abs(dl[b] - md) / cref);
    r.conservation_ul = std::max(r.conservation_ul, std::abs(ul[b] - mu) / cref);
    const double limit = problem.anchors.is_anchor(b) ? mref : 0.0;
    r.fiber = std::max(r.fiber, (md + mu - limit) / mref);
    r.resource = std::max(r.resource, budget[b] - 1.0);
  }
  return r;
}

}  // namespace iab
