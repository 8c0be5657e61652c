#include "iabplan/connectivity.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>
#include <json.hpp>

#include "iabplan/errors.hpp"
#include "rng.hpp"

namespace iab {

namespace {

constexpr std::array<Variant, 5> kVariants = {Variant::kAccessSS, Variant::kAccessLB, Variant::kIabST,
                                              Variant::kIabMeshSS, Variant::kIabMeshLB};

bool candidate(std::span<const std::uint8_t> candidates, int bs) {
  return candidates.empty() || candidates[bs] != 0;
}

void check_candidates(const LinkTable& links, std::span<const std::uint8_t> candidates) {
  if (!candidates.empty() && static_cast<int>(candidates.size()) != links.num_bs()) {
    throw ConfigError(fmt::format("candidate mask has {} entries for {} base stations",
                                  candidates.size(), links.num_bs()));
  }
}

void collect_unlinked(AccessPattern& access) {
  access.unlinked_ues.clear();
  for (int u = 0; u < access.uplink.rows(); ++u) {
    bool any = access.uplink.row_count(u) > 0;
    for (int b = 0; !any && b < access.downlink.rows(); ++b) any = access.downlink(b, u);
    if (!any) access.unlinked_ues.push_back(u);
  }
}

}  // namespace

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kAccessSS: return "AccessSS";
    case Variant::kAccessLB: return "AccessLB";
    case Variant::kIabST: return "IabST";
    case Variant::kIabMeshSS: return "IabMeshSS";
    case Variant::kIabMeshLB: return "IabMeshLB";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  for (Variant v : kVariants) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError(fmt::format("unknown scenario '{}'", name));
}

std::span<const Variant> all_variants() { return kVariants; }

bool has_backhaul(Variant variant) {
  return variant != Variant::kAccessSS && variant != Variant::kAccessLB;
}

int BoolMatrix::count() const {
  return static_cast<int>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

int BoolMatrix::row_count(int r) const {
  int n = 0;
  for (int c = 0; c < cols_; ++c) n += (*this)(r, c) ? 1 : 0;
  return n;
}

bool BoolMatrix::subset_of(const BoolMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

AccessPattern access_signal_strength(const LinkTable& links, std::uint64_t seed,
                                     std::span<const std::uint8_t> candidates) {
  check_candidates(links, candidates);
  const int nb = links.num_bs();
  const int nu = links.num_ue();
  AccessPattern access{BoolMatrix(nu, nb), BoolMatrix(nb, nu), {}};
  for (int u = 0; u < nu; ++u) {
    const int un = links.ue_node(u);
    const std::uint64_t ue_seed = detail::mix_seed(seed, static_cast<std::uint64_t>(u));
    int pick = -1;
    for (int b = 0; b < nb; ++b) {
      if (!candidate(candidates, b) || !links.exists(un, b)) continue;
      if (pick < 0) {
        pick = b;
        continue;
      }
      const double c = links.capacity(un, b);
      const double best = links.capacity(un, pick);
      if (c > best || (c == best && detail::mix_seed(ue_seed, b) < detail::mix_seed(ue_seed, pick))) pick = b;
    }
    if (pick < 0) continue;
    access.uplink.set(u, pick);
    if (links.exists(pick, un)) access.downlink.set(pick, u);
  }
  collect_unlinked(access);
  return access;
}

AccessPattern access_load_balanced(const LinkTable& links, std::span<const std::uint8_t> candidates) {
  check_candidates(links, candidates);
  const int nb = links.num_bs();
  const int nu = links.num_ue();
  AccessPattern access{BoolMatrix(nu, nb), BoolMatrix(nb, nu), {}};
  for (int u = 0; u < nu; ++u) {
    const int un = links.ue_node(u);
    for (int b = 0; b < nb; ++b) {
      if (!candidate(candidates, b)) continue;
      if (links.exists(un, b)) access.uplink.set(u, b);
      if (links.exists(b, un)) access.downlink.set(b, u);
    }
  }
  collect_unlinked(access);
  return access;
}

BoolMatrix backhaul_mesh(const LinkTable& links) {
  const int nb = links.num_bs();
  BoolMatrix b(nb, nb);
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nb; ++j) {
      if (i != j && links.exists(i, j)) b.set(i, j);
    }
  }
  return b;
}

BoolMatrix backhaul_spanning_tree(const LinkTable& links, const AnchorSet& anchors) {
  const int nb = links.num_bs();
  if (anchors.size() != nb) {
    throw ConfigError(fmt::format("anchor set has {} entries for {} base stations", anchors.size(), nb));
  }
  BoolMatrix tree(nb, nb);
  std::vector<std::uint8_t> connected = anchors.y;
  int remaining = nb - anchors.count();
  while (remaining > 0) {
    int best_c = -1;
    int best_v = -1;
    for (int c = 0; c < nb; ++c) {
      if (!connected[c]) continue;
      for (int v = 0; v < nb; ++v) {
        if (connected[v] || !links.exists(c, v) || !links.exists(v, c)) continue;
        if (best_c < 0) {
          best_c = c;
          best_v = v;
          continue;
        }
        const LinkEntry& e = links.at(c, v);
        const LinkEntry& best = links.at(best_c, best_v);
        if (e.gain_db > best.gain_db || (e.gain_db == best.gain_db && e.capacity_bps > best.capacity_bps)) {
          best_c = c;
          best_v = v;
        }
      }
    }
    if (best_c < 0) {
      std::vector<int> stranded;
      for (int v = 0; v < nb; ++v) {
        if (!connected[v]) stranded.push_back(v);
      }
      throw ConnectivityError(
          fmt::format("base stations [{}] cannot reach any anchor", fmt::join(stranded, ", ")),
          std::move(stranded));
    }
    tree.set(best_c, best_v);
    tree.set(best_v, best_c);
    connected[best_v] = 1;
    --remaining;
  }
  return tree;
}

ConnectivityPattern make_scenario(Variant variant, const LinkTable& links, const AnchorSet& anchors,
                                  std::uint64_t seed) {
  if (anchors.size() != links.num_bs()) {
    throw ConfigError(fmt::format("anchor set has {} entries for {} base stations", anchors.size(),
                                  links.num_bs()));
  }
  ConnectivityPattern p;
  p.variant = variant;
  p.backhaul = BoolMatrix(links.num_bs(), links.num_bs());
  switch (variant) {
    case Variant::kAccessSS:
      p.access = access_signal_strength(links, seed, anchors.y);
      break;
    case Variant::kAccessLB:
      p.access = access_load_balanced(links, anchors.y);
      break;
    case Variant::kIabST:
      p.access = access_signal_strength(links, seed);
      p.backhaul = backhaul_spanning_tree(links, anchors);
      break;
    case Variant::kIabMeshSS:
      p.access = access_signal_strength(links, seed);
      p.backhaul = backhaul_mesh(links);
      break;
    case Variant::kIabMeshLB:
      p.access = access_load_balanced(links);
      p.backhaul = backhaul_mesh(links);
      break;
  }
  return p;
}

std::string pattern_to_json(const ConnectivityPattern& pattern) {
  using nlohmann::json;
  json ul = json::array();
  json dl = json::array();
  json bh = json::array();
  for (int u = 0; u < pattern.num_ue(); ++u) {
    for (int b = 0; b < pattern.num_bs(); ++b) {
      if (pattern.access.uplink(u, b)) ul.push_back({u, b});
    }
  }
  for (int b = 0; b < pattern.num_bs(); ++b) {
    for (int u = 0; u < pattern.num_ue(); ++u) {
      if (pattern.access.downlink(b, u)) dl.push_back({b, u});
    }
    for (int j = 0; j < pattern.num_bs(); ++j) {
      if (pattern.backhaul(b, j)) bh.push_back({b, j});
    }
  }
  json doc{{"variant", std::string(to_string(pattern.variant))},
           {"num_bs", pattern.num_bs()},
           {"num_ue", pattern.num_ue()},
           {"uplink_ue_bs", std::move(ul)},
           {"downlink_bs_ue", std::move(dl)},
           {"backhaul", std::move(bh)},
           {"unlinked_ues", pattern.access.unlinked_ues}};
  return doc.dump(2);
}

}  // namespace iab
