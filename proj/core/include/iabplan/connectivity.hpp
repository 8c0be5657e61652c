#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iabplan/geometry.hpp"
#include "iabplan/linkbudget.hpp"

namespace iab {

enum class Variant { kAccessSS, kAccessLB, kIabST, kIabMeshSS, kIabMeshLB };

std::string_view to_string(Variant variant);
Variant variant_from_string(std::string_view name);
std::span<const Variant> all_variants();
bool has_backhaul(Variant variant);

class BoolMatrix {
 public:
  BoolMatrix() = default;
  BoolMatrix(int rows, int cols) : rows_(rows), cols_(cols), bits_(static_cast<std::size_t>(rows) * cols, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool operator()(int r, int c) const { return bits_[static_cast<std::size_t>(r) * cols_ + c] != 0; }
  void set(int r, int c, bool value = true) { bits_[static_cast<std::size_t>(r) * cols_ + c] = value ? 1 : 0; }
  int count() const;
  int row_count(int r) const;
  bool subset_of(const BoolMatrix& other) const;
  bool operator==(const BoolMatrix& other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Access availability. `uplink` is UE x BS (link UE->BS), `downlink` is
// BS x UE (link BS->UE).
struct AccessPattern {
  BoolMatrix uplink;
  BoolMatrix downlink;
  std::vector<int> unlinked_ues;  // UEs with an all-zero access row
};

struct ConnectivityPattern {
  Variant variant = Variant::kAccessSS;
  AccessPattern access;
  BoolMatrix backhaul;  // BS x BS, directed

  int num_bs() const { return backhaul.rows(); }
  int num_ue() const { return access.uplink.rows(); }
};

// `candidates` restricts the base stations a UE may attach to (empty: all).
// Each UE attaches to the BS with the highest uplink capacity; exact ties are
// broken by a uniform draw seeded from (seed, ue), so the choice does not
// depend on iteration order or on the candidate set.
AccessPattern access_signal_strength(const LinkTable& links, std::uint64_t seed,
                                     std::span<const std::uint8_t> candidates = {});
AccessPattern access_load_balanced(const LinkTable& links,
                                   std::span<const std::uint8_t> candidates = {});

BoolMatrix backhaul_mesh(const LinkTable& links);

// Grows a forest from the anchors: each round adds the single strongest-gain
// edge between a connected and an unconnected BS (gain measured from the
// connected side; the link must exist in both directions). Equal gains fall
// back to capacity, then to the lower (connected, unconnected) id pair. Tree edges are set in both
// directions. Throws ConnectivityError listing BSs that cannot be reached.
BoolMatrix backhaul_spanning_tree(const LinkTable& links, const AnchorSet& anchors);

// Access-only variants deploy only the anchor sites, so UEs choose among
// anchors; IAB variants use every site.
ConnectivityPattern make_scenario(Variant variant, const LinkTable& links,
                                  const AnchorSet& anchors, std::uint64_t seed);

std::string pattern_to_json(const ConnectivityPattern& pattern);

}  // namespace iab
