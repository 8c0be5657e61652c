#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "iabplan/program.hpp"

namespace iab {

void dump_problem(const RateProblem& problem, std::ostream& out) {
  const int na = static_cast<int>(problem.arcs.size());
  const int nb = problem.num_bs;

  std::vector<std::string> names;
  for (int k = 0; k < na; ++k) names.push_back(fmt::format("t{}", k));
  for (int k = 0; k < na; ++k) names.push_back(fmt::format("f{}", k));
  std::vector<int> md(nb, -1), mu(nb, -1);
  for (int b = 0; b < nb; ++b) {
    if (problem.has_fiber_downlink[b]) {
      md[b] = static_cast<int>(names.size());
      names.push_back(fmt::format("MD{}", b));
    }
    if (problem.has_fiber_uplink[b]) {
      mu[b] = static_cast<int>(names.size());
      names.push_back(fmt::format("MU{}", b));
    }
  }

  struct Row {
    std::string name;
    char sense;
    double rhs;
  };
  std::vector<Row> rows;
  std::vector<std::tuple<int, int, double>> coef;
  for (int k = 0; k < na; ++k) {
    const int r = static_cast<int>(rows.size());
    rows.push_back({fmt::format("cap{}", k), 'L', 0.0});
    coef.emplace_back(r, na + k, 1.0);
    coef.emplace_back(r, k, -problem.arcs[k].capacity_bps);
  }
  for (int b = 0; b < nb; ++b) {
    if (problem.incident[b].empty()) continue;
    const int r = static_cast<int>(rows.size());
    rows.push_back({fmt::format("res{}", b), 'L', 1.0});
    for (int k : problem.incident[b]) coef.emplace_back(r, k, 1.0);
  }
  for (int dir = 0; dir < 2; ++dir) {
    const bool down = dir == 0;
    for (int b = 0; b < nb; ++b) {
      std::vector<std::tuple<int, int, double>> row;
      for (int k = 0; k < na; ++k) {
        const Arc& a = problem.arcs[k];
        if (is_downlink(a.kind) != down) continue;
        const double sign = down ? 1.0 : -1.0;
        if (a.tail == b) row.emplace_back(0, na + k, sign);
        if (a.head == b) row.emplace_back(0, na + k, -sign);
      }
      const int m = down ? md[b] : mu[b];
      if (m >= 0) row.emplace_back(0, m, -1.0);
      if (row.empty()) continue;
      const int r = static_cast<int>(rows.size());
      rows.push_back({fmt::format("{}{}", down ? "cons_dl" : "cons_ul", b), 'E', 0.0});
      for (auto& [_, col, v] : row) coef.emplace_back(r, col, v);
    }
  }
  for (int b = 0; b < nb; ++b) {
    if (md[b] < 0 && mu[b] < 0) continue;
    const int r = static_cast<int>(rows.size());
    rows.push_back({fmt::format("fiber{}", b), 'L', problem.fiber_capacity_bps});
    if (md[b] >= 0) coef.emplace_back(r, md[b], 1.0);
    if (mu[b] >= 0) coef.emplace_back(r, mu[b], 1.0);
  }

  out << "# iabplan rate problem\n";
  out << "# maximize (1/R) sum over rates of ln(sum of listed flow columns); all columns >= 0\n";
  out << fmt::format("variant {}\n", to_string(problem.variant));
  out << fmt::format("variables {}\n", names.size());
  for (std::size_t i = 0; i < names.size(); ++i) out << fmt::format("{} {}\n", i, names[i]);
  out << fmt::format("rows {}\n", rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << fmt::format("{} {} {} {:.17g}\n", i, rows[i].name, rows[i].sense, rows[i].rhs);
  }
  out << fmt::format("coefficients {}\n", coef.size());
  for (const auto& [r, c, v] : coef) out << fmt::format("{} {} {:.17g}\n", r, c, v);
  out << fmt::format("objective {}\n", problem.num_rates());
  for (const UeGroup& g : problem.groups) {
    out << fmt::format("ue {} ul", g.ue);
    for (int k : g.uplink_arcs) out << ' ' << na + k;
    out << '\n' << fmt::format("ue {} dl", g.ue);
    for (int k : g.downlink_arcs) out << ' ' << na + k;
    out << '\n';
  }
}

}  // namespace iab
