#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "iabplan/errors.hpp"
#include "iabplan/geometry.hpp"

namespace iab {
namespace {

GridSpec spec(int rows, int cols, double spacing, int ues, std::uint64_t seed) {
  GridSpec s;
  s.rows = rows;
  s.cols = cols;
  s.inter_site_m = spacing;
  s.n_ues = ues;
  s.seed = seed;
  return s;
}

TEST(Grid, DefaultLayoutHasEighteenSitesAndSixHundredUes) {
  const Topology t = generate_grid(spec(3, 6, 200.0, 600, 1));
  EXPECT_EQ(t.num_bs(), 18);
  EXPECT_EQ(t.num_ue(), 600);
}

TEST(Grid, MinimalGrid) {
  const Topology t = generate_grid(spec(1, 1, 200.0, 0, 99));
  EXPECT_EQ(t.num_bs(), 1);
  EXPECT_EQ(t.num_ue(), 0);
}

TEST(Grid, FixedSeedIsDeterministic) {
  const Topology a = generate_grid(spec(2, 2, 100.0, 10, 7));
  const Topology b = generate_grid(spec(2, 2, 100.0, 10, 7));
  EXPECT_EQ(topology_to_json(a), topology_to_json(b));
}

TEST(Grid, DifferentSeedsMoveUes) {
  const Topology a = generate_grid(spec(2, 2, 100.0, 10, 7));
  const Topology b = generate_grid(spec(2, 2, 100.0, 10, 8));
  EXPECT_NE(topology_to_json(a), topology_to_json(b));
}

TEST(Grid, UesLieOnStreets) {
  const Topology t = generate_grid(spec(3, 6, 200.0, 600, 3));
  for (const Site& u : t.ues) EXPECT_TRUE(t.on_street(u.pos)) << u.id;
  EXPECT_NO_THROW(validate_topology(t));
}

TEST(Grid, IdsAreContiguous) {
  const Topology t = generate_grid(spec(3, 4, 150.0, 50, 2));
  for (int i = 0; i < t.num_bs(); ++i) EXPECT_EQ(t.bs_sites[i].id, i);
  for (int i = 0; i < t.num_ue(); ++i) EXPECT_EQ(t.ues[i].id, i);
}

TEST(Grid, SitesSitOnTheLattice) {
  const Topology t = generate_grid(spec(2, 3, 120.0, 0, 1));
  ASSERT_EQ(t.num_bs(), 6);
  EXPECT_DOUBLE_EQ(t.bs_sites[4].pos.x_m, 120.0);
  EXPECT_DOUBLE_EQ(t.bs_sites[4].pos.y_m, 120.0);
}

TEST(Grid, MeanNearestSiteDistanceMatchesSpacing) {
  const Topology t = generate_grid(spec(3, 6, 200.0, 0, 1));
  const double d = mean_nearest_site_distance(t);
  EXPECT_NEAR(d, 200.0, 0.2 * 200.0);
  EXPECT_DOUBLE_EQ(d, 200.0);
}

TEST(Grid, ZeroStreetAreaWithUesIsRejected) {
  GridSpec s = spec(2, 2, 100.0, 5, 1);
  s.street_width_m = 0.0;
  EXPECT_THROW(generate_grid(s), ConfigError);
}

TEST(Grid, BadDimensionsAreRejected) {
  EXPECT_THROW(generate_grid(spec(0, 3, 100.0, 0, 1)), ConfigError);
  EXPECT_THROW(generate_grid(spec(1, 3, -1.0, 0, 1)), ConfigError);
  EXPECT_THROW(generate_grid(spec(1, 3, 100.0, -1, 1)), ConfigError);
}

TEST(Topology, JsonRoundTrip) {
  const Topology a = generate_grid(spec(2, 3, 150.0, 25, 11));
  const Topology b = topology_from_json(topology_to_json(a));
  EXPECT_EQ(topology_to_json(a), topology_to_json(b));
  ASSERT_EQ(b.num_ue(), 25);
  EXPECT_DOUBLE_EQ(a.ues[7].pos.x_m, b.ues[7].pos.x_m);
}

TEST(Topology, MalformedJsonIsConfigError) {
  EXPECT_THROW(topology_from_json("{"), ConfigError);
  EXPECT_THROW(topology_from_json(R"({"schema":"other/9"})"), ConfigError);
}

TEST(Topology, UeOffStreetFailsValidation) {
  Topology t = generate_grid(spec(2, 2, 100.0, 1, 1));
  t.ues[0].pos = {50.0, 50.0};
  EXPECT_THROW(validate_topology(t), ConfigError);
}

TEST(Topology, NodePositionsNumberSitesFirst) {
  const Topology t = generate_grid(spec(1, 2, 100.0, 3, 1));
  EXPECT_DOUBLE_EQ(t.node_position(1).x_m, t.bs_sites[1].pos.x_m);
  EXPECT_DOUBLE_EQ(t.node_position(2).y_m, t.ues[0].pos.y_m);
}

TEST(Anchors, ReferenceLayoutHasSevenOfEighteen) {
  const Topology t = generate_grid(spec(3, 6, 200.0, 0, 1));
  AnchorRequest req;
  req.policy = AnchorPolicy::kManual;
  req.manual = reference_anchor_layout();
  const AnchorSet a = select_anchors(t, req);
  EXPECT_EQ(a.size(), 18);
  EXPECT_EQ(a.count(), 7);
}

TEST(Anchors, FullRandomDeploymentIsAllOnes) {
  const Topology t = generate_grid(spec(2, 3, 100.0, 0, 1));
  AnchorRequest req;
  req.policy = AnchorPolicy::kSeededRandom;
  req.k = 6;
  const AnchorSet a = select_anchors(t, req);
  EXPECT_EQ(a.count(), 6);
  for (int j = 0; j < 6; ++j) EXPECT_TRUE(a.is_anchor(j));
}

TEST(Anchors, SeededRandomIsDeterministic) {
  const Topology t = generate_grid(spec(2, 2, 100.0, 0, 1));
  AnchorRequest req;
  req.policy = AnchorPolicy::kSeededRandom;
  req.k = 2;
  req.seed = 3;
  EXPECT_EQ(select_anchors(t, req).y, select_anchors(t, req).y);
  EXPECT_EQ(select_anchors(t, req).count(), 2);
}

TEST(Anchors, SeededRandomSetsAreNested) {
  const Topology t = generate_grid(spec(3, 6, 200.0, 0, 1));
  AnchorRequest req;
  req.policy = AnchorPolicy::kSeededRandom;
  req.seed = 5;
  std::vector<int> prev;
  for (int k = 1; k <= 18; ++k) {
    req.k = k;
    const std::vector<int> ids = select_anchors(t, req).ids();
    EXPECT_TRUE(std::includes(ids.begin(), ids.end(), prev.begin(), prev.end())) << k;
    prev = ids;
  }
}

TEST(Anchors, GreedyPicksKAndIsNested) {
  const Topology t = generate_grid(spec(3, 6, 200.0, 300, 4));
  AnchorRequest req;
  req.policy = AnchorPolicy::kGreedyCoverage;
  std::vector<int> prev;
  for (int k = 1; k <= 18; ++k) {
    req.k = k;
    const std::vector<int> ids = select_anchors(t, req).ids();
    EXPECT_EQ(static_cast<int>(ids.size()), k);
    EXPECT_TRUE(std::includes(ids.begin(), ids.end(), prev.begin(), prev.end())) << k;
    prev = ids;
  }
}

TEST(Anchors, GreedyPrefersTheSiteServingMostUes) {
  // Two sites; every UE is nearest to site 1.
  Topology t = generate_grid(spec(1, 2, 100.0, 0, 1));
  t.ues = {{0, {90.0, 0.0}}, {1, {100.0, 5.0}}, {2, {80.0, 0.0}}};
  AnchorRequest req;
  req.policy = AnchorPolicy::kGreedyCoverage;
  req.k = 1;
  EXPECT_EQ(select_anchors(t, req).ids(), std::vector<int>{1});
}

TEST(Anchors, KOutOfRangeIsRejected) {
  const Topology t = generate_grid(spec(2, 2, 100.0, 0, 1));
  AnchorRequest req;
  req.policy = AnchorPolicy::kSeededRandom;
  req.k = 0;
  EXPECT_THROW(select_anchors(t, req), ConfigError);
  req.k = 5;
  EXPECT_THROW(select_anchors(t, req), ConfigError);
}

TEST(Anchors, ManualListIsValidated) {
  const Topology t = generate_grid(spec(2, 2, 100.0, 0, 1));
  AnchorRequest req;
  req.policy = AnchorPolicy::kManual;
  req.manual = {0, 7};
  EXPECT_THROW(select_anchors(t, req), ConfigError);
  req.manual = {1, 1};
  EXPECT_THROW(select_anchors(t, req), ConfigError);
  req.manual = {};
  EXPECT_THROW(select_anchors(t, req), ConfigError);
  req.manual = {3, 1};
  EXPECT_EQ(select_anchors(t, req).ids(), (std::vector<int>{1, 3}));
}

TEST(Anchors, PolicyNamesRoundTrip) {
  for (AnchorPolicy p : {AnchorPolicy::kManual, AnchorPolicy::kSeededRandom, AnchorPolicy::kGreedyCoverage}) {
    EXPECT_EQ(anchor_policy_from_string(to_string(p)), p);
  }
  EXPECT_THROW(anchor_policy_from_string("best"), ConfigError);
}

TEST(Rect, ContainsAndIntersects) {
  const Rect a{0, 0, 10, 2};
  const Rect b{5, -5, 7, 5};
  EXPECT_TRUE(a.contains({10, 2}));
  EXPECT_FALSE(a.contains({10.1, 2}));
  EXPECT_TRUE(a.intersects(b));
  EXPECT_FALSE(a.intersects(Rect{11, 0, 12, 1}));
  EXPECT_DOUBLE_EQ(a.area(), 20.0);
}

}  // namespace
}  // namespace iab
