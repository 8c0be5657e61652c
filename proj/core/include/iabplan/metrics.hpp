#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "iabplan/program.hpp"

namespace iab {

struct UeRate {
  int ue = 0;
  double uplink_bps = 0.0;
  double downlink_bps = 0.0;
};

struct RateReport {
  std::string label;
  Variant variant = Variant::kAccessSS;
  int anchor_count = 0;
  int total_ues = 0;
  int excluded_ues = 0;
  double gm_bps = 0.0;
  std::vector<UeRate> rates;  // included UEs only, ascending id
};

RateReport make_rate_report(const RateProblem& problem, const Solution& solution,
                            std::string label = {});

// exp(mean ln rate) over the report's UL and DL rates.
double report_gm(const RateReport& report);

enum class RateDirection { kUplink, kDownlink, kCombined };

struct CdfPoint {
  double rate_bps = 0.0;
  double percentile = 0.0;  // fraction of samples <= rate
};

// Empirical CDF. kCombined pools UL and DL samples. With
// `include_excluded`, excluded UEs contribute samples at rate 0.
std::vector<CdfPoint> rate_cdf(const RateReport& report, RateDirection direction,
                               bool include_excluded = false);

// Smallest sample whose percentile reaches q.
double cdf_quantile(const std::vector<CdfPoint>& cdf, double q);

void write_cdf_csv(const std::vector<CdfPoint>& cdf, std::ostream& out);
void write_rate_report_csv(const RateReport& report, std::ostream& out);

struct Route {
  std::vector<int> nodes;  // anchor first
  double rate_bps = 0.0;
};

struct BsHops {
  int bs = 0;
  double hops = 0.0;        // +inf when no route exists
  bool routed = false;      // false: hop count is the structural BFS distance
  std::vector<Route> routes;
  std::vector<double> weights;  // per route, sum to 1 when routed
};

struct HopReport {
  std::vector<BsHops> per_bs;
  std::vector<std::pair<double, double>> cdf;  // (hops, fraction of BSs)
  double mass_at_zero = 0.0;
  double mean_hops = 0.0;  // over BSs with a finite hop count
  double decomposition_residual = 0.0;  // unbalanced leftover, relative to delivered flow
  double circulating = 0.0;  // share of backhaul flow on cycles, not on any route
};

// Rate-weighted hop count per BS. Backhaul flow of one direction is peeled
// into paths, shortest first with ties to the lexicographically smallest node
// sequence; every path prefix ending at a BS is one of its routes. Anchors
// are at 0 hops. Flow left on cycles after peeling is reported, not routed.
// BSs with negligible routed inflow take their structural BFS distance.
// Throws SolverError when the leftover is unbalanced by more than 1e-6 of the
// delivered flow (a conservation violation).
HopReport hop_counts(const RateProblem& problem, const Solution& solution,
                     const ConnectivityPattern& pattern, bool uplink = false);

struct CompareRow {
  std::string label;
  Variant variant = Variant::kAccessSS;
  int anchor_count = 0;
  double gm_mbps = 0.0;
  int included_ues = 0;
  int excluded_ues = 0;
};

struct CompareTable {
  std::vector<CompareRow> rows;

  std::string to_text() const;
  std::string to_json() const;
};

// Rows ordered by (variant, anchor count, label). Throws ConfigError on
// empty input.
CompareTable compare_table(const std::vector<RateReport>& reports);

}  // namespace iab
