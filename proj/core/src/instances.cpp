#include "iabplan/instances.hpp"

#include <cmath>
#include <tuple>

#include "rng.hpp"

namespace iab {

namespace {

using Link = std::tuple<int, int, double>;

Instance make(int nb, int nu, const std::vector<Link>& links, std::vector<int> anchor_ids, Variant variant,
              double fiber_bps = 200e9) {
  Instance inst;
  inst.links = LinkTable::from_capacities(nb, nu, links);
  inst.anchors = AnchorSet::from_ids(nb, anchor_ids);
  inst.budget.fiber_capacity_bps = fiber_bps;
  inst.pattern = make_scenario(variant, inst.links, inst.anchors, 1);
  return inst;
}

}  // namespace

RateProblem Instance::assemble() const { return iab::assemble(links, pattern, anchors, budget); }

Instance single_link_instance(double capacity_bps) {
  return make(1, 1, {{0, 1, capacity_bps}, {1, 0, capacity_bps}}, {0}, Variant::kAccessSS);
}

Instance relay_chain_instance(double backhaul_bps, double access_bps) {
  return make(2, 1, {{0, 1, backhaul_bps}, {1, 0, backhaul_bps}, {1, 2, access_bps}, {2, 1, access_bps}}, {0},
              Variant::kIabST);
}

Instance random_small_instance(std::uint64_t seed, bool one_ue_single_path) {
  detail::Rng rng(detail::mix_seed(seed, 0x5a11));
  auto cap = [&] { return rng.uniform(0.5e9, 10e9); };
  const int shape = one_ue_single_path ? 0 : static_cast<int>(rng.below(3));
  const double fiber = !one_ue_single_path && rng.below(2) == 0 ? rng.uniform(1e9, 20e9) : 200e9;

  if (shape == 1) {
    // One UE load-balanced over two anchors.
    return make(2, 1, {{0, 2, cap()}, {2, 0, cap()}, {1, 2, cap()}, {2, 1, cap()}}, {0, 1}, Variant::kAccessLB,
                fiber);
  }
  if (shape == 2) {
    // Two UEs on one anchor.
    return make(1, 2, {{0, 1, cap()}, {1, 0, cap()}, {0, 2, cap()}, {2, 0, cap()}}, {0}, Variant::kAccessSS,
                fiber);
  }
  const int relays = static_cast<int>(rng.below(3));
  std::vector<Link> links;
  for (int i = 0; i < relays; ++i) {
    links.emplace_back(i, i + 1, cap());
    links.emplace_back(i + 1, i, cap());
  }
  const int ue = relays + 1;
  links.emplace_back(relays, ue, cap());
  links.emplace_back(ue, relays, cap());
  return make(relays + 1, 1, links, {0}, relays == 0 ? Variant::kAccessSS : Variant::kIabST, fiber);
}

GridInstance random_grid_instance(std::uint64_t seed, int min_bs, int max_bs, int min_ue, int max_ue) {
  detail::Rng rng(detail::mix_seed(seed, 0x9e1d));
  GridSpec spec;
  do {
    spec.rows = 1 + static_cast<int>(rng.below(3));
    spec.cols = 2 + static_cast<int>(rng.below(5));
  } while (spec.rows * spec.cols < min_bs || spec.rows * spec.cols > max_bs);
  spec.n_ues = min_ue + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_ue - min_ue + 1)));
  spec.seed = detail::mix_seed(seed, 0x7e5);

  GridInstance g;
  g.topology = generate_grid(spec);
  g.links = build_link_table(g.topology, synth_gain_matrix(g.topology, g.budget), g.budget);
  const int nb = g.topology.num_bs();
  AnchorRequest req;
  req.policy = AnchorPolicy::kSeededRandom;
  req.k = std::max(1, static_cast<int>(std::lround(nb * rng.uniform(0.2, 0.5))));
  req.seed = detail::mix_seed(seed, 0xa7c);
  g.anchors = select_anchors(g.topology, req);
  return g;
}

GridInstance reference_grid_instance(std::uint64_t ue_seed, int n_ues) {
  GridSpec spec;
  spec.n_ues = n_ues;
  spec.seed = ue_seed;
  GridInstance g;
  g.topology = generate_grid(spec);
  g.links = build_link_table(g.topology, synth_gain_matrix(g.topology, g.budget), g.budget);
  g.anchors = AnchorSet::from_ids(g.topology.num_bs(), reference_anchor_layout());
  return g;
}

}  // namespace iab
