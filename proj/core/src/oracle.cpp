#include "iabplan/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <fmt/format.h>

#include "iabplan/errors.hpp"

namespace iab {

namespace {

struct Search {
  int resolution = 0;
  int rows = 0;
  std::vector<int> access;                  // arc index per enumerated dimension
  std::vector<std::vector<double>> coef;    // per dimension: usage per row for t = 1
  std::vector<double> limit;                // per row
  std::vector<std::vector<int>> group_dims; // per rate: dimensions feeding it
  std::vector<double> cap;                  // per dimension
  std::vector<std::uint8_t> maximized;      // per dimension: set to its largest feasible level
  std::vector<std::vector<double>> log_table;  // per rate fed by one dimension: ln rate per level

  std::vector<std::vector<double>> step;  // coef / resolution
  std::vector<double> bound;              // limit with rounding slack

  std::vector<int> level;
  std::vector<double> usage;
  std::vector<std::vector<double>> saved;  // usage on entry, per depth
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_level;
  std::vector<double> max_rate;  // per rate, over all visited points
  std::int64_t points = 0;
  std::int64_t max_points = 0;

  // Rates never fall as a level rises. The last dimension of each group of
  // dimensions linked through shared rows can therefore take its largest
  // feasible level once the rest of its group is fixed.
  void mark_maximized() {
    const std::size_t n = access.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t d = 0; d < n; ++d) parent[d] = d;
    auto find = [&parent](std::size_t d) {
      while (parent[d] != d) d = parent[d] = parent[parent[d]];
      return d;
    };
    for (int r = 0; r < rows; ++r) {
      std::size_t first = n;
      for (std::size_t d = 0; d < n; ++d) {
        if (coef[d][r] <= 0.0) continue;
        if (first == n) first = d;
        else parent[find(d)] = find(first);
      }
    }
    maximized.assign(n, 0);
    for (std::size_t d = 0; d < n; ++d) {
      bool last = true;
      for (std::size_t e = d + 1; e < n; ++e) last = last && find(e) != find(d);
      maximized[d] = last ? 1 : 0;
    }
  }

  void build_tables() {
    step = coef;
    for (auto& row : step) {
      for (double& v : row) v /= resolution;
    }
    bound = limit;
    for (double& b : bound) b *= 1.0 + 1e-12;
    log_table.assign(group_dims.size(), {});
    for (std::size_t g = 0; g < group_dims.size(); ++g) {
      if (group_dims[g].size() != 1) continue;
      const double c = cap[group_dims[g][0]];
      auto& t = log_table[g];
      t.resize(static_cast<std::size_t>(resolution) + 1);
      t[0] = -std::numeric_limits<double>::infinity();
      for (int l = 1; l <= resolution; ++l) t[l] = std::log(c * l / resolution);
    }
  }

  void leaf() {
    if (++points > max_points) {
      throw ConfigError(fmt::format("oracle search exceeds the limit of {} points", max_points));
    }
    double obj = 0.0;
    for (std::size_t g = 0; g < group_dims.size(); ++g) {
      const std::vector<int>& dims = group_dims[g];
      if (dims.size() == 1) {
        const int l = level[dims[0]];
        max_rate[g] = std::max(max_rate[g], cap[dims[0]] * l / resolution);
        obj += log_table[g][l];
        continue;
      }
      double r = 0.0;
      for (int d : dims) r += cap[d] * level[d];
      r /= resolution;
      max_rate[g] = std::max(max_rate[g], r);
      obj += r > 0.0 ? std::log(r) : -std::numeric_limits<double>::infinity();
    }
    if (obj > best) {
      best = obj;
      best_level = level;
    }
  }

  int largest_level(std::size_t dim) const {
    double top = resolution;
    for (int r = 0; r < rows; ++r) {
      if (coef[dim][r] <= 0.0) continue;
      top = std::min(top, std::floor((bound[r] - usage[r]) / step[dim][r] + 1e-9));
    }
    return std::max(0, static_cast<int>(top));
  }

  void recurse(std::size_t dim) {
    if (dim == access.size()) {
      leaf();
      return;
    }
    if (dim + 1 == access.size() && maximized[dim]) {
      level[dim] = largest_level(dim);
      leaf();
      level[dim] = 0;
      return;
    }
    std::vector<double>& before = saved[dim];
    before = usage;
    const std::vector<double>& st = step[dim];
    const int lo = maximized[dim] ? largest_level(dim) : 0;
    for (int l = lo; l <= resolution; ++l) {
      bool ok = true;
      for (int r = 0; r < rows; ++r) {
        usage[r] = before[r] + st[r] * l;
        ok = ok && usage[r] <= bound[r];
      }
      if (!ok) break;
      level[dim] = l;
      recurse(dim + 1);
      if (maximized[dim]) break;
    }
    usage = before;
    level[dim] = 0;
  }
};

}  // namespace

OracleBracket brute_force_oracle(const RateProblem& problem, int resolution, std::int64_t max_points) {
  if (resolution < 1) throw ConfigError("oracle resolution must be at least 1");
  if (problem.num_time_variables() > 6) {
    throw ConfigError(fmt::format("oracle supports at most 6 time variables, problem has {}",
                                  problem.num_time_variables()));
  }
  const int nb = problem.num_bs;
  const int na = static_cast<int>(problem.arcs.size());

  // Unique route per BS: the single DL backhaul arc feeding it and the single
  // UL backhaul arc draining it.
  std::vector<int> feed(nb, -1), drain(nb, -1);
  for (int k = 0; k < na; ++k) {
    const Arc& a = problem.arcs[k];
    if (a.kind == ArcKind::kBackhaulDownlink) {
      if (feed[a.head] >= 0 || problem.has_fiber_downlink[a.head]) {
        throw ConfigError(fmt::format("BS {} has more than one downlink route", a.head));
      }
      feed[a.head] = k;
    } else if (a.kind == ArcKind::kBackhaulUplink) {
      if (drain[a.tail] >= 0 || problem.has_fiber_uplink[a.tail]) {
        throw ConfigError(fmt::format("BS {} has more than one uplink route", a.tail));
      }
      drain[a.tail] = k;
    }
  }

  Search s;
  s.resolution = resolution;
  std::vector<int> res_row(nb, -1), fib_row(nb, -1);
  for (int j = 0; j < nb; ++j) {
    if (!problem.incident[j].empty()) {
      res_row[j] = s.rows++;
      s.limit.push_back(1.0);
    }
  }
  for (int j = 0; j < nb; ++j) {
    if (problem.has_fiber_downlink[j] || problem.has_fiber_uplink[j]) {
      fib_row[j] = s.rows++;
      s.limit.push_back(problem.fiber_capacity_bps);
    }
  }

  std::vector<int> dim_of(na, -1);
  std::vector<std::vector<double>> derived(na);  // backhaul t per unit access t
  for (int k = 0; k < na; ++k) {
    const Arc& a = problem.arcs[k];
    if (!is_access(a.kind)) continue;
    const int d = static_cast<int>(s.access.size());
    dim_of[k] = d;
    s.access.push_back(k);
    s.cap.push_back(a.capacity_bps);
    std::vector<double> c(s.rows, 0.0);
    std::vector<double> bt(na, 0.0);
    bt[k] = 1.0;
    c[res_row[a.bs[0]]] += 1.0;
    int cur = a.bs[0];
    const bool down = a.kind == ArcKind::kAccessDownlink;
    for (int hops = 0;; ++hops) {
      const int e = down ? feed[cur] : drain[cur];
      if (e < 0) break;
      if (hops > nb) throw ConfigError("backhaul route contains a cycle");
      const double t = a.capacity_bps / problem.arcs[e].capacity_bps;
      bt[e] += t;
      for (int j : problem.arcs[e].bs) c[res_row[j]] += t;
      cur = down ? problem.arcs[e].tail : problem.arcs[e].head;
    }
    if (fib_row[cur] < 0) throw ConfigError(fmt::format("route of arc {} does not end at fiber", k));
    c[fib_row[cur]] += a.capacity_bps;
    s.coef.push_back(std::move(c));
    derived[k] = std::move(bt);
  }

  if (s.access.empty()) throw ConfigError("oracle needs at least one access arc");
  s.max_points = max_points;
  for (const UeGroup& g : problem.groups) {
    std::vector<int> ul, dl;
    for (int k : g.uplink_arcs) ul.push_back(dim_of[k]);
    for (int k : g.downlink_arcs) dl.push_back(dim_of[k]);
    s.group_dims.push_back(ul);
    s.group_dims.push_back(dl);
  }

  s.max_rate.assign(s.group_dims.size(), 0.0);
  s.mark_maximized();
  s.build_tables();
  s.level.assign(s.access.size(), 0);
  s.usage.assign(s.rows, 0.0);
  s.saved.assign(s.access.size(), s.usage);
  s.recurse(0);

  OracleBracket out;
  out.points_evaluated = s.points;
  if (!std::isfinite(s.best)) {
    out.upper_gm_bps = std::numeric_limits<double>::infinity();
    return out;
  }

  // Rounding the optimum down to the grid loses at most delta per rate, so
  // sum ln(r* - delta) <= best. A lower bound L on each optimal rate turns
  // that into sum ln r* <= best + sum ln(L / (L - delta)). Optimality gives
  // sum_h r_h / r*_h <= n for every feasible r; with r the best grid point
  // and r*_h no larger than the best grid value of rate h plus delta, this
  // bounds r*_g from below.
  const std::size_t n = s.group_dims.size();
  std::vector<double> r(n, 0.0), delta(n, 0.0);
  for (std::size_t g = 0; g < n; ++g) {
    for (int d : s.group_dims[g]) {
      r[g] += s.cap[d] * s.best_level[d] / resolution;
      delta[g] += s.cap[d] / resolution;
    }
  }
  double share = 0.0;
  for (std::size_t g = 0; g < n; ++g) share += r[g] / (s.max_rate[g] + delta[g]);
  double widen = 0.0;
  for (std::size_t g = 0; g < n; ++g) {
    const double others = share - r[g] / (s.max_rate[g] + delta[g]);
    const double lower = r[g] / (static_cast<double>(n) - others);
    widen += lower > delta[g] ? std::log(lower / (lower - delta[g])) : std::numeric_limits<double>::infinity();
  }
  const double n_rates = static_cast<double>(n);
  out.lower_gm_bps = std::exp(s.best / n_rates);
  out.upper_gm_bps = out.lower_gm_bps * std::exp(widen / n_rates);

  out.best_time.assign(na, 0.0);
  for (int k = 0; k < na; ++k) {
    if (dim_of[k] < 0) continue;
    const double t = static_cast<double>(s.best_level[dim_of[k]]) / resolution;
    for (int e = 0; e < na; ++e) out.best_time[e] += derived[k][e] * t;
  }
  return out;
}

}  // namespace iab
