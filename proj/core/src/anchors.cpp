#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "iabplan/errors.hpp"
#include "iabplan/geometry.hpp"
#include "rng.hpp"

namespace iab {

int AnchorSet::count() const {
  return static_cast<int>(std::count_if(y.begin(), y.end(), [](std::uint8_t v) { return v != 0; }));
}

std::vector<int> AnchorSet::ids() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (y[i]) out.push_back(i);
  }
  return out;
}

AnchorSet AnchorSet::from_ids(int num_bs, std::span<const int> ids) {
  AnchorSet set;
  set.y.assign(num_bs, 0);
  for (int id : ids) {
    if (id < 0 || id >= num_bs) {
      throw ConfigError(fmt::format("anchor id {} is not a site (have {} sites)", id, num_bs));
    }
    if (set.y[id]) throw ConfigError(fmt::format("anchor id {} listed twice", id));
    set.y[id] = 1;
  }
  if (set.count() == 0) throw ConfigError("anchor set is empty");
  return set;
}

AnchorSet AnchorSet::all(int num_bs) {
  AnchorSet set;
  set.y.assign(num_bs, 1);
  return set;
}

std::string_view to_string(AnchorPolicy policy) {
  switch (policy) {
    case AnchorPolicy::kManual: return "manual";
    case AnchorPolicy::kSeededRandom: return "random";
    case AnchorPolicy::kGreedyCoverage: return "greedy";
  }
  return "unknown";
}

AnchorPolicy anchor_policy_from_string(std::string_view name) {
  if (name == "manual") return AnchorPolicy::kManual;
  if (name == "random" || name == "seeded-random") return AnchorPolicy::kSeededRandom;
  if (name == "greedy" || name == "greedy-coverage") return AnchorPolicy::kGreedyCoverage;
  throw ConfigError(fmt::format("unknown anchor policy '{}'", name));
}

namespace {

AnchorSet greedy_coverage(const Topology& topo, int k, std::span<const double> strength) {
  const int nb = topo.num_bs();
  const int nu = topo.num_ue();
  std::vector<double> local;
  if (strength.empty()) {
    local.resize(static_cast<std::size_t>(nu) * nb);
    for (int u = 0; u < nu; ++u) {
      for (int b = 0; b < nb; ++b) local[u * nb + b] = -distance_m(topo.ues[u].pos, topo.bs_sites[b].pos);
    }
    strength = local;
  } else if (strength.size() != static_cast<std::size_t>(nu) * nb) {
    throw ConfigError(fmt::format("strength matrix has {} entries, expected {}", strength.size(),
                                  static_cast<std::size_t>(nu) * nb));
  }

  AnchorSet set;
  set.y.assign(nb, 0);
  std::vector<double> best(nu, -std::numeric_limits<double>::infinity());
  for (int round = 0; round < k; ++round) {
    std::vector<int> votes(nb, 0);
    for (int u = 0; u < nu; ++u) {
      int arg = -1;
      for (int b = 0; b < nb; ++b) {
        if (set.y[b]) continue;
        if (arg < 0 || strength[u * nb + b] > strength[u * nb + arg]) arg = b;
      }
      if (arg >= 0 && strength[u * nb + arg] > best[u]) ++votes[arg];
    }
    int pick = -1;
    for (int b = 0; b < nb; ++b) {
      if (set.y[b]) continue;
      if (pick < 0 || votes[b] > votes[pick]) pick = b;
    }
    set.y[pick] = 1;
    for (int u = 0; u < nu; ++u) best[u] = std::max(best[u], strength[u * nb + pick]);
  }
  return set;
}

}  // namespace

AnchorSet select_anchors(const Topology& topo, const AnchorRequest& request,
                         std::span<const double> ue_bs_strength) {
  const int nb = topo.num_bs();
  if (request.policy == AnchorPolicy::kManual) return AnchorSet::from_ids(nb, request.manual);
  if (request.k < 1 || request.k > nb) {
    throw ConfigError(fmt::format("anchor count k={} outside [1, {}]", request.k, nb));
  }
  if (request.policy == AnchorPolicy::kGreedyCoverage) return greedy_coverage(topo, request.k, ue_bs_strength);

  std::vector<int> order(nb);
  std::iota(order.begin(), order.end(), 0);
  detail::Rng rng(request.seed);
  for (int i = 0; i < request.k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(nb - i)));
    std::swap(order[i], order[j]);
  }
  return AnchorSet::from_ids(nb, std::span<const int>(order.data(), request.k));
}

std::vector<int> reference_anchor_layout() { return {1, 4, 6, 9, 12, 14, 17}; }

}  // namespace iab
