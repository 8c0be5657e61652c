#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "iabplan/errors.hpp"
#include "iabplan/instances.hpp"
#include "iabplan/kkt.hpp"
#include "iabplan/metrics.hpp"
#include "iabplan/scenario.hpp"
#include "iabplan/solver.hpp"

namespace iab {
namespace {

using testing::Gen;

constexpr int kTrials = 40;

TEST(Property, GeneratedUesLieOnStreets) {
  Gen g(101);
  for (int i = 0; i < kTrials; ++i) {
    const GridSpec s = g.grid_spec();
    const Topology t = generate_grid(s);
    ASSERT_EQ(t.num_bs(), s.rows * s.cols);
    ASSERT_EQ(t.num_ue(), s.n_ues);
    for (const Site& u : t.ues) ASSERT_TRUE(t.on_street(u.pos)) << i;
  }
}

TEST(Property, AnchorSelectionIsIdempotent) {
  Gen g(102);
  for (int i = 0; i < kTrials; ++i) {
    const Topology t = generate_grid(g.grid_spec());
    AnchorRequest req;
    req.policy = g.coin() ? AnchorPolicy::kSeededRandom : AnchorPolicy::kGreedyCoverage;
    req.k = g.integer(1, t.num_bs());
    req.seed = g.seed();
    const AnchorSet a = select_anchors(t, req);
    EXPECT_EQ(a.count(), req.k);
    EXPECT_EQ(select_anchors(t, req).y, a.y);
    AnchorRequest manual;
    manual.policy = AnchorPolicy::kManual;
    manual.manual = a.ids();
    EXPECT_EQ(select_anchors(t, manual).y, a.y);
  }
}

TEST(Property, CapacityIsMonotoneAndBounded) {
  Gen g(103);
  for (int i = 0; i < kTrials; ++i) {
    BudgetConfig cfg;
    cfg.snr_cap_db = g.real(10.0, 40.0);
    cfg.bandwidth_hz = g.real(1e8, 2e9);
    const double ceiling = cfg.bandwidth_hz * std::log2(1.0 + std::pow(10.0, cfg.snr_cap_db / 10.0));
    double prev = 0.0;
    for (double gain = -160.0; gain <= -40.0; gain += g.real(0.1, 5.0)) {
      const double snr = std::pow(10.0, link_snr(gain, LinkDirection::kBsToUe, cfg) / 10.0);
      const double c = shannon_capacity(effective_snr(snr, cfg), cfg.bandwidth_hz);
      EXPECT_GE(c, prev);
      EXPECT_LT(c, ceiling);
      prev = c;
    }
  }
}

TEST(Property, PatternsNest) {
  Gen g(104);
  for (int i = 0; i < kTrials; ++i) {
    const int nb = g.integer(1, 6);
    const int nu = g.integer(1, 10);
    const LinkTable links = g.connected_link_table(nb, nu);
    const AnchorSet a = g.anchors(nb);
    const std::uint64_t seed = g.seed();
    const auto ss = make_scenario(Variant::kAccessSS, links, a, seed);
    const auto lb = make_scenario(Variant::kAccessLB, links, a, seed);
    const auto st = make_scenario(Variant::kIabST, links, a, seed);
    const auto mss = make_scenario(Variant::kIabMeshSS, links, a, seed);
    const auto mlb = make_scenario(Variant::kIabMeshLB, links, a, seed);
    EXPECT_TRUE(ss.access.uplink.subset_of(lb.access.uplink));
    EXPECT_TRUE(ss.access.downlink.subset_of(lb.access.downlink));
    EXPECT_TRUE(lb.access.uplink.subset_of(mlb.access.uplink));
    EXPECT_TRUE(st.backhaul.subset_of(mss.backhaul));
    EXPECT_TRUE(mss.access.uplink.subset_of(mlb.access.uplink));
    EXPECT_EQ(mss.backhaul, mlb.backhaul);
    for (int u = 0; u < nu; ++u) EXPECT_LE(ss.access.uplink.row_count(u), 1);
  }
}

TEST(Property, SpanningTreeIsASymmetricForest) {
  Gen g(105);
  for (int i = 0; i < kTrials; ++i) {
    const int nb = g.integer(1, 8);
    const LinkTable links = g.connected_link_table(nb, 0);
    const AnchorSet a = g.anchors(nb);
    const BoolMatrix tree = backhaul_spanning_tree(links, a);
    EXPECT_EQ(tree.count(), 2 * (nb - a.count()));
    for (int r = 0; r < nb; ++r) {
      for (int c = 0; c < nb; ++c) EXPECT_EQ(tree(r, c), tree(c, r));
    }
    // Every site reaches an anchor, so with nb - anchors edges it is a forest.
    std::vector<int> seen(nb, 0);
    std::queue<int> q;
    for (int j : a.ids()) {
      seen[j] = 1;
      q.push(j);
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < nb; ++v) {
        if (tree(u, v) && !seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    EXPECT_EQ(std::count(seen.begin(), seen.end(), 1), nb);
  }
}

struct Case {
  LinkTable links;
  AnchorSet anchors;
  ConnectivityPattern pattern;
  BudgetConfig budget;
};

// Redraws until the variant serves at least one UE.
Case random_case(Gen& g, Variant v) {
  for (;;) {
    Case c;
    const int nb = g.integer(1, 4);
    const int nu = g.integer(1, 4);
    c.links = g.connected_link_table(nb, nu);
    c.anchors = g.anchors(nb);
    c.budget.fiber_capacity_bps = g.coin() ? 200e9 : g.real(1e9, 20e9);
    c.pattern = make_scenario(v, c.links, c.anchors, g.seed());
    try {
      assemble(c.links, c.pattern, c.anchors, c.budget);
      return c;
    } catch (const InfeasibleError&) {
    }
  }
}

Variant random_variant(Gen& g) { return all_variants()[static_cast<std::size_t>(g.integer(0, 4))]; }

// DL: tail reachable from fiber, head reaches an access arc. UL mirrored.
bool arcs_connect(const RateProblem& p, ArcKind kind) {
  const bool dl = kind == ArcKind::kBackhaulDownlink;
  const ArcKind access = dl ? ArcKind::kAccessDownlink : ArcKind::kAccessUplink;
  std::vector<std::uint8_t> from_fiber = p.anchors.y, to_ue(p.num_bs, 0);
  for (const Arc& a : p.arcs) {
    if (a.kind == access) to_ue[dl ? a.tail : a.head] = 1;
  }
  // Orient every arc fiber-side first.
  auto near = [&](const Arc& a) { return dl ? a.tail : a.head; };
  auto far = [&](const Arc& a) { return dl ? a.head : a.tail; };
  for (bool changed = true; changed;) {
    changed = false;
    for (const Arc& a : p.arcs) {
      if (a.kind != kind) continue;
      if (from_fiber[near(a)] && !from_fiber[far(a)]) changed = from_fiber[far(a)] = 1;
      if (to_ue[far(a)] && !to_ue[near(a)]) changed = to_ue[near(a)] = 1;
    }
  }
  for (const Arc& a : p.arcs) {
    if (a.kind == kind && !(from_fiber[near(a)] && to_ue[far(a)])) return false;
  }
  return true;
}

TEST(Property, EveryBackhaulArcCanCarryFlow) {
  Gen g(112);
  for (int i = 0; i < 4 * kTrials; ++i) {
    const Case c = random_case(g, g.coin() ? Variant::kIabMeshSS : Variant::kIabMeshLB);
    const RateProblem p = assemble(c.links, c.pattern, c.anchors, c.budget);
    EXPECT_TRUE(arcs_connect(p, ArcKind::kBackhaulDownlink)) << i;
    EXPECT_TRUE(arcs_connect(p, ArcKind::kBackhaulUplink)) << i;
  }
}

TEST(Property, ScalingCapacitiesScalesTheGm) {
  Gen g(106);
  for (int i = 0; i < kTrials; ++i) {
    const Case c = random_case(g, random_variant(g));
    const double k = g.real(0.1, 10.0);
    BudgetConfig scaled_budget = c.budget;
    scaled_budget.fiber_capacity_bps *= k;
    const RateProblem p = assemble(c.links, c.pattern, c.anchors, c.budget);
    const RateProblem q = assemble(c.links.scaled(k), c.pattern, c.anchors, scaled_budget);
    const double a = solve(p).solution.gm_bps;
    const double b = solve(q).solution.gm_bps;
    EXPECT_NEAR(b / (k * a), 1.0, 4e-6) << i;
  }
}

ConnectivityPattern swapped(const ConnectivityPattern& p) {
  ConnectivityPattern s = p;
  const int nb = p.num_bs();
  const int nu = p.num_ue();
  for (int u = 0; u < nu; ++u) {
    for (int b = 0; b < nb; ++b) {
      s.access.uplink.set(u, b, p.access.downlink(b, u));
      s.access.downlink.set(b, u, p.access.uplink(u, b));
    }
  }
  for (int r = 0; r < nb; ++r) {
    for (int c = 0; c < nb; ++c) s.backhaul.set(r, c, p.backhaul(c, r));
  }
  return s;
}

TEST(Property, SwappingUplinkAndDownlinkKeepsTheGm) {
  Gen g(107);
  for (int i = 0; i < kTrials; ++i) {
    const Case c = random_case(g, random_variant(g));
    const RateProblem p = assemble(c.links, c.pattern, c.anchors, c.budget);
    const RateProblem q = assemble(c.links.transposed(), swapped(c.pattern), c.anchors, c.budget);
    const double a = solve(p).solution.gm_bps;
    const double b = solve(q).solution.gm_bps;
    EXPECT_NEAR(b / a, 1.0, 4e-6) << i;
  }
}

TEST(Property, SolutionsAreFeasibleAndConsistent) {
  Gen g(108);
  for (int i = 0; i < kTrials; ++i) {
    const Case c = random_case(g, random_variant(g));
    const RateProblem p = assemble(c.links, c.pattern, c.anchors, c.budget);
    const SolveResult r = solve(p);
    EXPECT_LE(validate(p, r.solution).max(), 1e-8) << i;
    EXPECT_TRUE(check_kkt(p, r.solution).passed()) << i;
    Solution again = r.solution;
    evaluate_rates(p, again);
    EXPECT_NEAR(again.gm_bps / r.solution.gm_bps, 1.0, 1e-9) << i;
    for (const UeGroup& u : p.groups) {
      EXPECT_GT(r.solution.rate_ul_bps[u.ue], 0.0);
      EXPECT_GT(r.solution.rate_dl_bps[u.ue], 0.0);
    }
  }
}

// Chains whose patterns nest, so each feasible set contains the previous.
TEST(Property, RicherPatternsNeverLose) {
  Gen g(109);
  const std::vector<std::vector<Variant>> chains = {
      {Variant::kAccessSS, Variant::kAccessLB, Variant::kIabMeshLB},
      {Variant::kIabST, Variant::kIabMeshSS, Variant::kIabMeshLB}};
  int compared = 0;
  for (int i = 0; i < kTrials; ++i) {
    const Case c = random_case(g, Variant::kAccessSS);
    ScenarioOptions opt;
    opt.tie_seed = g.seed();
    opt.parallel = false;
    for (const auto& chain : chains) {
      std::vector<ScenarioResult> res;
      try {
        res = run_scenarios(c.links, c.anchors, c.budget, chain, opt);
      } catch (const InfeasibleError&) {
        continue;
      }
      ++compared;
      for (std::size_t v = 1; v < res.size(); ++v) {
        EXPECT_LE(res[v - 1].report.gm_bps, res[v].report.gm_bps * std::exp(2e-6)) << i << " " << v;
      }
    }
  }
  EXPECT_GE(compared, kTrials);
}

TEST(Property, HopWeightsFormADistribution) {
  Gen g(110);
  for (int i = 0; i < kTrials; ++i) {
    const Variant v = g.coin() ? Variant::kIabST : Variant::kIabMeshLB;
    const Case c = random_case(g, v);
    const RateProblem p = assemble(c.links, c.pattern, c.anchors, c.budget);
    const SolveResult r = solve(p);
    for (bool uplink : {false, true}) {
      const HopReport h = hop_counts(p, r.solution, c.pattern, uplink);
      EXPECT_LE(h.decomposition_residual, 1e-6);
      for (const BsHops& b : h.per_bs) {
        if (!b.routed || b.weights.empty()) continue;
        double sum = 0.0;
        for (double w : b.weights) sum += w;
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_GE(b.hops, 1.0);
      }
      double mass = 0.0;
      for (const auto& [hops, frac] : h.cdf) mass = std::max(mass, frac);
      EXPECT_NEAR(mass, 1.0, 1e-12);
    }
  }
}

TEST(Property, TreeRoutesCarryTheDeliveredFlow) {
  Gen g(111);
  for (int i = 0; i < kTrials; ++i) {
    const Case c = random_case(g, Variant::kIabST);
    const RateProblem p = assemble(c.links, c.pattern, c.anchors, c.budget);
    const Solution s = solve(p).solution;
    const HopReport h = hop_counts(p, s, c.pattern);
    // Flow into each relay equals the flow its routes account for.
    for (int j = 0; j < p.num_bs; ++j) {
      if (p.anchors.is_anchor(j) || !h.per_bs[j].routed) continue;
      double in = 0.0;
      for (std::size_t k = 0; k < p.arcs.size(); ++k) {
        if (p.arcs[k].kind == ArcKind::kBackhaulDownlink && p.arcs[k].head == j) in += s.flow_bps[k];
      }
      double routed = 0.0;
      for (const Route& r : h.per_bs[j].routes) routed += r.rate_bps;
      EXPECT_NEAR(routed / in, 1.0, 1e-6) << i << " " << j;
    }
  }
}

}  // namespace
}  // namespace iab
