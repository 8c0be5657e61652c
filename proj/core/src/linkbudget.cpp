#include "iabplan/linkbudget.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include <fmt/format.h>

#include "iabplan/errors.hpp"

namespace iab {

namespace {

constexpr double kSpeedOfLight = 299'792'458.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double rect_distance(const Rect& r, Point p) {
  const double dx = std::max({r.x_min - p.x_m, 0.0, p.x_m - r.x_max});
  const double dy = std::max({r.y_min - p.y_m, 0.0, p.y_m - r.y_max});
  return std::hypot(dx, dy);
}

std::vector<int> segments_at(const Topology& topo, Point p) {
  std::vector<int> out;
  const int n = static_cast<int>(topo.street_segments.size());
  for (int i = 0; i < n; ++i) {
    if (topo.street_segments[i].contains(p)) out.push_back(i);
  }
  if (out.empty() && n > 0) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (rect_distance(topo.street_segments[i], p) < rect_distance(topo.street_segments[best], p)) best = i;
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace

void BudgetConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(atmospheric_db_per_km >= 0.0, "atmospheric_db_per_km must be non-negative");
  require(polarization_loss_db >= 0.0, "polarization_loss_db must be non-negative");
  require(alignment_error_db >= 0.0, "alignment_error_db must be non-negative");
  require(implementation_loss_db >= 0.0, "implementation_loss_db must be non-negative");
  require(noise_figure_db >= 0.0, "noise_figure_db must be non-negative");
  require(corner_loss_db >= 0.0, "corner_loss_db must be non-negative");
  require(fiber_capacity_bps > 0.0, "fiber_capacity_bps must be positive");
  require(min_distance_m > 0.0, "min_distance_m must be positive");
  require(snr_cap_db > min_snr_db, "snr_cap_db must exceed min_snr_db");
  require(std::isfinite(tx_power_dbm) && std::isfinite(bs_eirp_dbm) && std::isfinite(bs_array_gain_db),
          "power and gain settings must be finite");
}

double free_space_path_loss_db(double distance_m, double carrier_hz) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * carrier_hz / kSpeedOfLight);
}

int street_corners(const Topology& topo, Point a, Point b) {
  const auto& segs = topo.street_segments;
  const int n = static_cast<int>(segs.size());
  if (n == 0) return 0;
  const std::vector<int> from = segments_at(topo, a);
  const std::vector<int> to = segments_at(topo, b);

  std::vector<int> dist(n, -1);
  std::deque<int> queue;
  for (int s : from) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    if (std::find(to.begin(), to.end(), s) != to.end()) return dist[s];
    for (int t = 0; t < n; ++t) {
      if (dist[t] < 0 && segs[s].intersects(segs[t])) {
        dist[t] = dist[s] + 1;
        queue.push_back(t);
      }
    }
  }
  return -1;
}

double synth_gain(const Topology& topo, int from_node, int to_node, const BudgetConfig& cfg) {
  const Point a = topo.node_position(from_node);
  const Point b = topo.node_position(to_node);
  const int corners = street_corners(topo, a, b);
  if (corners < 0) return kAbsentGain;
  const double d = std::max(distance_m(a, b), cfg.min_distance_m);
  return -free_space_path_loss_db(d, cfg.carrier_hz) - cfg.atmospheric_db_per_km * d / 1000.0 -
         cfg.corner_loss_db * corners;
}

GainMatrix::GainMatrix(int num_nodes)
    : n_(num_nodes), db_(static_cast<std::size_t>(num_nodes) * num_nodes, kAbsentGain) {}

std::size_t GainMatrix::index(int from, int to) const {
  if (from < 0 || from >= n_ || to < 0 || to >= n_) {
    throw ConfigError(fmt::format("gain index ({}, {}) outside {} nodes", from, to, n_));
  }
  return static_cast<std::size_t>(from) * n_ + to;
}

GainMatrix synth_gain_matrix(const Topology& topo, const BudgetConfig& cfg) {
  GainMatrix g(topo.num_nodes());
  const int nb = topo.num_bs();
  for (int i = 0; i < topo.num_nodes(); ++i) {
    for (int j = 0; j < topo.num_nodes(); ++j) {
      if (i == j || (i >= nb && j >= nb)) continue;
      g.set(i, j, synth_gain(topo, i, j, cfg));
    }
  }
  return g;
}

double noise_dbm(const BudgetConfig& cfg) {
  return -174.0 + 10.0 * std::log10(cfg.bandwidth_hz) + cfg.noise_figure_db;
}

double link_snr(double gain_db, LinkDirection direction, const BudgetConfig& cfg) {
  if (!std::isfinite(gain_db)) return kAbsentGain;
  const bool tx_bs = direction != LinkDirection::kUeToBs;
  const bool rx_bs = direction != LinkDirection::kBsToUe;
  const double eirp = tx_bs ? cfg.bs_eirp_dbm : cfg.tx_power_dbm;
  const double rx_gain = rx_bs ? cfg.bs_array_gain_db : 0.0;
  return eirp + gain_db + rx_gain - cfg.polarization_loss_db - cfg.alignment_error_db -
         cfg.implementation_loss_db - noise_dbm(cfg);
}

double effective_snr(double snr_linear, const BudgetConfig& cfg) {
  if (!(snr_linear > 0.0)) return 0.0;
  const double cap = db_to_linear(cfg.snr_cap_db);
  if (std::isinf(snr_linear)) return cfg.combining == SnrCombining::kHarmonicMean ? 2.0 * cap : cap;
  if (cfg.combining == SnrCombining::kHarmonicMean) return 2.0 * snr_linear * cap / (snr_linear + cap);
  return 1.0 / (1.0 / snr_linear + 1.0 / cap);
}

double shannon_capacity(double eff_snr_linear, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + std::max(eff_snr_linear, 0.0));
}

}  // namespace iab
