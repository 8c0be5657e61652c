#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "iabplan/errors.hpp"
#include "iabplan/linkbudget.hpp"

namespace iab {

LinkTable::LinkTable(int num_bs, int num_ue)
    : num_bs_(num_bs),
      num_ue_(num_ue),
      entries_(static_cast<std::size_t>(num_bs + num_ue) * (num_bs + num_ue)) {
  if (num_bs < 0 || num_ue < 0) throw ConfigError("negative link table dimensions");
}

std::size_t LinkTable::index(int from, int to) const {
  const int n = num_nodes();
  if (from < 0 || from >= n || to < 0 || to >= n) {
    throw ConfigError(fmt::format("link ({}, {}) outside {} nodes", from, to, n));
  }
  return static_cast<std::size_t>(from) * n + to;
}

std::size_t LinkTable::entry_count() const {
  const auto b = static_cast<std::size_t>(num_bs_);
  const auto u = static_cast<std::size_t>(num_ue_);
  return b * (b > 0 ? b - 1 : 0) + 2 * b * u;
}

LinkTable LinkTable::transposed() const {
  LinkTable out(num_bs_, num_ue_);
  for (int i = 0; i < num_nodes(); ++i) {
    for (int j = 0; j < num_nodes(); ++j) out.set(j, i, at(i, j));
  }
  return out;
}

LinkTable LinkTable::scaled(double factor) const {
  if (!(factor > 0.0)) throw ConfigError("scale factor must be positive");
  LinkTable out = *this;
  for (LinkEntry& e : out.entries_) e.capacity_bps *= factor;
  return out;
}

LinkTable LinkTable::from_capacities(int num_bs, int num_ue,
                                     std::span<const std::tuple<int, int, double>> links) {
  LinkTable out(num_bs, num_ue);
  for (const auto& [from, to, cap] : links) {
    if (!out.is_bs(from) && !out.is_bs(to)) {
      throw ConfigError(fmt::format("UE-UE link ({}, {}) is not allowed", from, to));
    }
    if (from == to) throw ConfigError(fmt::format("self link at node {}", from));
    if (!(cap > 0.0) || !std::isfinite(cap)) {
      throw ConfigError(fmt::format("link ({}, {}) needs a positive capacity", from, to));
    }
    LinkEntry e;
    e.capacity_bps = cap;
    e.exists = true;
    out.set(from, to, e);
  }
  return out;
}

LinkTable build_link_table(int num_bs, int num_ue, const GainMatrix& gains, const BudgetConfig& cfg) {
  cfg.validate();
  LinkTable table(num_bs, num_ue);
  if (gains.num_nodes() != table.num_nodes()) {
    throw ConfigError(fmt::format("gain matrix has {} nodes, topology has {}", gains.num_nodes(),
                                  table.num_nodes()));
  }
  for (int i = 0; i < table.num_nodes(); ++i) {
    for (int j = 0; j < table.num_nodes(); ++j) {
      if (i == j) continue;
      const bool bi = table.is_bs(i);
      const bool bj = table.is_bs(j);
      if (!bi && !bj) continue;
      const LinkDirection dir =
          bi && bj ? LinkDirection::kBsToBs : (bi ? LinkDirection::kBsToUe : LinkDirection::kUeToBs);
      LinkEntry e;
      e.gain_db = gains.at(i, j);
      e.snr_db = link_snr(e.gain_db, dir, cfg);
      e.exists = std::isfinite(e.snr_db) && e.snr_db >= cfg.min_snr_db;
      if (e.exists) {
        e.eff_snr_linear = effective_snr(std::pow(10.0, e.snr_db / 10.0), cfg);
        e.capacity_bps = shannon_capacity(e.eff_snr_linear, cfg.bandwidth_hz);
      }
      table.set(i, j, e);
    }
  }
  return table;
}

LinkTable build_link_table(const Topology& topo, const GainMatrix& gains, const BudgetConfig& cfg) {
  return build_link_table(topo.num_bs(), topo.num_ue(), gains, cfg);
}

void write_link_table_csv(const LinkTable& table, std::ostream& out) {
  out << "from,to,gain_db,snr_db,capacity_bps,exists\n";
  for (int i = 0; i < table.num_nodes(); ++i) {
    for (int j = 0; j < table.num_nodes(); ++j) {
      if (i == j || (!table.is_bs(i) && !table.is_bs(j))) continue;
      const LinkEntry& e = table.at(i, j);
      if (!std::isfinite(e.gain_db)) continue;
      out << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{}\n", i, j, e.gain_db, e.snr_db, e.capacity_bps,
                         e.exists ? 1 : 0);
    }
  }
}

}  // namespace iab
