#pragma once

#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "iabplan/connectivity.hpp"
#include "iabplan/geometry.hpp"
#include "iabplan/linkbudget.hpp"

namespace iab::testing {

// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::uint64_t seed() { return rng_(); }

  GridSpec grid_spec(int max_sites = 12, int max_ues = 80) {
    GridSpec s;
    do {
      s.rows = integer(1, 3);
      s.cols = integer(1, 6);
    } while (s.rows * s.cols > max_sites);
    s.inter_site_m = real(80.0, 300.0);
    s.street_width_m = real(5.0, 30.0);
    s.n_ues = integer(0, max_ues);
    s.seed = seed();
    return s;
  }

  // Capacities in [0.2, 10] Gbps with each directed BS-BS and access link
  // present with probability `density`. Every UE keeps at least one link in
  // each direction.
  LinkTable link_table(int nb, int nu, double density = 0.6) {
    std::vector<std::tuple<int, int, double>> links;
    for (int i = 0; i < nb; ++i) {
      for (int j = 0; j < nb; ++j) {
        if (i != j && coin(density)) links.emplace_back(i, j, real(0.2e9, 10e9));
      }
    }
    for (int u = 0; u < nu; ++u) {
      const int ue = nb + u;
      const int home = integer(0, nb - 1);
      for (int j = 0; j < nb; ++j) {
        if (j == home || coin(density * 0.5)) {
          links.emplace_back(j, ue, real(0.2e9, 10e9));
          links.emplace_back(ue, j, real(0.2e9, 10e9));
        }
      }
    }
    return LinkTable::from_capacities(nb, nu, links);
  }

  // Tree-connected backhaul so every BS can reach an anchor: BS i > 0 links
  // both ways to a random earlier BS.
  LinkTable connected_link_table(int nb, int nu, double density = 0.4) {
    std::vector<std::tuple<int, int, double>> links;
    for (int i = 1; i < nb; ++i) {
      const int p = integer(0, i - 1);
      links.emplace_back(i, p, real(0.5e9, 10e9));
      links.emplace_back(p, i, real(0.5e9, 10e9));
    }
    for (int i = 0; i < nb; ++i) {
      for (int j = 0; j < nb; ++j) {
        if (i == j) continue;
        bool present = false;
        for (const auto& [a, b, c] : links) present = present || (a == i && b == j);
        if (!present && coin(density)) links.emplace_back(i, j, real(0.2e9, 10e9));
      }
    }
    for (int u = 0; u < nu; ++u) {
      const int ue = nb + u;
      const int home = integer(0, nb - 1);
      for (int j = 0; j < nb; ++j) {
        if (j == home || coin(0.3)) {
          links.emplace_back(j, ue, real(0.2e9, 10e9));
          links.emplace_back(ue, j, real(0.2e9, 10e9));
        }
      }
    }
    return LinkTable::from_capacities(nb, nu, links);
  }

  AnchorSet anchors(int nb) {
    std::vector<int> ids;
    for (int j = 0; j < nb; ++j) {
      if (coin(0.35)) ids.push_back(j);
    }
    if (ids.empty()) ids.push_back(integer(0, nb - 1));
    return AnchorSet::from_ids(nb, ids);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace iab::testing
