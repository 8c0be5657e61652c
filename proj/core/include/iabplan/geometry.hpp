#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iab {

struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

double distance_m(Point a, Point b);

// Axis-aligned street rectangle, meters.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(Point p) const;
  bool intersects(const Rect& other) const;
  double area() const { return (x_max - x_min) * (y_max - y_min); }
};

struct Site {
  int id = 0;
  Point pos;
};

// Candidate base-station sites and UEs on a street grid. Ids of both kinds
// are contiguous from 0 and index the vectors directly.
struct Topology {
  int grid_rows = 0;
  int grid_cols = 0;
  double block_size_m = 0.0;
  double street_width_m = 0.0;
  std::vector<Site> bs_sites;
  std::vector<Site> ues;
  std::vector<Rect> street_segments;

  int num_bs() const { return static_cast<int>(bs_sites.size()); }
  int num_ue() const { return static_cast<int>(ues.size()); }
  int num_nodes() const { return num_bs() + num_ue(); }

  // Global node numbering used by link tables and gain files:
  // base stations first (0..B-1), then UEs (B..B+U-1).
  Point node_position(int node) const;

  bool on_street(Point p) const;
};

struct GridSpec {
  int rows = 3;
  int cols = 6;
  double inter_site_m = 200.0;
  double street_width_m = 20.0;
  int n_ues = 600;
  std::uint64_t seed = 1;
};

// Sites sit on street intersections of a rows x cols lattice with spacing
// inter_site_m. One horizontal street runs through every site row and one
// vertical street through every site column; each street extends half a
// block past the outermost sites. UEs are uniform over the union of street
// rectangles (rejection sampling over the bounding box).
Topology generate_grid(const GridSpec& spec);

// Mean distance from each site to its nearest other site; 0 for < 2 sites.
double mean_nearest_site_distance(const Topology& topo);

// Checks id contiguity and that every UE is on a street. Throws ConfigError.
void validate_topology(const Topology& topo);

std::string topology_to_json(const Topology& topo);
Topology topology_from_json(std::string_view text);

// Fiber-drop decision per site (1 = anchor).
struct AnchorSet {
  std::vector<std::uint8_t> y;

  int size() const { return static_cast<int>(y.size()); }
  int count() const;
  bool is_anchor(int bs) const { return y.at(bs) != 0; }
  std::vector<int> ids() const;

  static AnchorSet from_ids(int num_bs, std::span<const int> ids);
  static AnchorSet all(int num_bs);
};

enum class AnchorPolicy { kManual, kSeededRandom, kGreedyCoverage };

std::string_view to_string(AnchorPolicy policy);
AnchorPolicy anchor_policy_from_string(std::string_view name);

struct AnchorRequest {
  AnchorPolicy policy = AnchorPolicy::kGreedyCoverage;
  int k = 1;
  std::vector<int> manual;
  std::uint64_t seed = 1;
};

// `ue_bs_strength` is an optional UE x BS row-major matrix (larger is
// stronger, e.g. gain in dB) used by the greedy policy; when empty the
// negative Euclidean distance stands in for it.
//
// Greedy coverage is a heuristic: each round picks the site that is the
// strongest remaining (unchosen) site for the most UEs whose best anchor
// link it would improve; ties go to the lower id. Seeded-random
// takes a prefix of a seeded permutation, so sets are nested in k.
AnchorSet select_anchors(const Topology& topo, const AnchorRequest& request,
                         std::span<const double> ue_bs_strength = {});

// Seven of the eighteen sites of the default 3x6 grid, spread so that every
// street carries an anchor. An approximation of a published layout, not a
// measured one.
std::vector<int> reference_anchor_layout();

}  // namespace iab
