#include "iabplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "iabplan/errors.hpp"
#include "rng.hpp"

namespace iab {

double distance_m(Point a, Point b) { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

bool Rect::contains(Point p) const {
  return p.x_m >= x_min && p.x_m <= x_max && p.y_m >= y_min && p.y_m <= y_max;
}

bool Rect::intersects(const Rect& other) const {
  return x_min <= other.x_max && other.x_min <= x_max && y_min <= other.y_max &&
         other.y_min <= y_max;
}

Point Topology::node_position(int node) const {
  if (node < 0 || node >= num_nodes()) {
    throw ConfigError(fmt::format("node {} outside topology with {} nodes", node, num_nodes()));
  }
  return node < num_bs() ? bs_sites[node].pos : ues[node - num_bs()].pos;
}

bool Topology::on_street(Point p) const {
  return std::any_of(street_segments.begin(), street_segments.end(),
                     [p](const Rect& r) { return r.contains(p); });
}

Topology generate_grid(const GridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) {
    throw ConfigError(fmt::format("grid must have at least one site, got {}x{}", spec.rows, spec.cols));
  }
  if (!(spec.inter_site_m > 0.0)) throw ConfigError("inter_site_m must be positive");
  if (spec.n_ues < 0) throw ConfigError("n_ues must be non-negative");
  if (spec.street_width_m < 0.0) throw ConfigError("street_width_m must be non-negative");
  if (spec.n_ues > 0 && !(spec.street_width_m > 0.0)) {
    throw ConfigError("zero street area: cannot place UEs");
  }

  Topology topo;
  topo.grid_rows = spec.rows;
  topo.grid_cols = spec.cols;
  topo.block_size_m = spec.inter_site_m;
  topo.street_width_m = spec.street_width_m;

  const double s = spec.inter_site_m;
  const double half_w = spec.street_width_m / 2.0;
  const double x_lo = -s / 2.0;
  const double x_hi = (spec.cols - 1) * s + s / 2.0;
  const double y_lo = -s / 2.0;
  const double y_hi = (spec.rows - 1) * s + s / 2.0;

  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      topo.bs_sites.push_back({r * spec.cols + c, {c * s, r * s}});
    }
  }
  for (int r = 0; r < spec.rows; ++r) {
    topo.street_segments.push_back({x_lo, r * s - half_w, x_hi, r * s + half_w});
  }
  for (int c = 0; c < spec.cols; ++c) {
    topo.street_segments.push_back({c * s - half_w, y_lo, c * s + half_w, y_hi});
  }

  detail::Rng rng(spec.seed);
  topo.ues.reserve(spec.n_ues);
  while (topo.num_ue() < spec.n_ues) {
    const Point p{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
    if (topo.on_street(p)) topo.ues.push_back({topo.num_ue(), p});
  }
  return topo;
}

double mean_nearest_site_distance(const Topology& topo) {
  if (topo.num_bs() < 2) return 0.0;
  double total = 0.0;
  for (const Site& a : topo.bs_sites) {
    double best = std::numeric_limits<double>::infinity();
    for (const Site& b : topo.bs_sites) {
      if (a.id != b.id) best = std::min(best, distance_m(a.pos, b.pos));
    }
    total += best;
  }
  return total / topo.num_bs();
}

void validate_topology(const Topology& topo) {
  for (int i = 0; i < topo.num_bs(); ++i) {
    if (topo.bs_sites[i].id != i) {
      throw ConfigError(fmt::format("bs_sites[{}] has id {}; ids must be contiguous from 0", i,
                                    topo.bs_sites[i].id));
    }
  }
  for (int i = 0; i < topo.num_ue(); ++i) {
    if (topo.ues[i].id != i) {
      throw ConfigError(
          fmt::format("ues[{}] has id {}; ids must be contiguous from 0", i, topo.ues[i].id));
    }
    if (!topo.on_street(topo.ues[i].pos)) {
      throw ConfigError(fmt::format("UE {} at ({}, {}) is not inside any street segment", i,
                                    topo.ues[i].pos.x_m, topo.ues[i].pos.y_m));
    }
  }
  for (const Rect& r : topo.street_segments) {
    if (r.x_max < r.x_min || r.y_max < r.y_min) throw ConfigError("street segment with negative extent");
  }
}

}  // namespace iab
