#include "iabplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "iabplan/errors.hpp"

namespace iab {

RateReport make_rate_report(const RateProblem& problem, const Solution& solution, std::string label) {
  RateReport r;
  r.label = label.empty() ? std::string(to_string(problem.variant)) : std::move(label);
  r.variant = problem.variant;
  r.anchor_count = problem.anchors.count();
  r.total_ues = problem.num_ue;
  r.excluded_ues = static_cast<int>(problem.excluded.size());
  for (const UeGroup& g : problem.groups) {
    r.rates.push_back({g.ue, solution.rate_ul_bps[g.ue], solution.rate_dl_bps[g.ue]});
  }
  std::sort(r.rates.begin(), r.rates.end(), [](const UeRate& a, const UeRate& b) { return a.ue < b.ue; });
  r.gm_bps = solution.gm_bps;
  return r;
}

double report_gm(const RateReport& report) {
  if (report.rates.empty()) return 0.0;
  double sum = 0.0;
  for (const UeRate& u : report.rates) sum += std::log(u.uplink_bps) + std::log(u.downlink_bps);
  return std::exp(sum / (2.0 * static_cast<double>(report.rates.size())));
}

std::vector<CdfPoint> rate_cdf(const RateReport& report, RateDirection direction, bool include_excluded) {
  std::vector<double> samples;
  for (const UeRate& u : report.rates) {
    if (direction != RateDirection::kDownlink) samples.push_back(u.uplink_bps);
    if (direction != RateDirection::kUplink) samples.push_back(u.downlink_bps);
  }
  if (include_excluded) {
    const int per_ue = direction == RateDirection::kCombined ? 2 : 1;
    samples.insert(samples.end(), static_cast<std::size_t>(report.excluded_ues) * per_ue, 0.0);
  }
  if (samples.empty()) throw ConfigError("rate CDF of an empty report");
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> cdf;
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double pct = static_cast<double>(i + 1) / n;
    if (!cdf.empty() && cdf.back().rate_bps == samples[i]) {
      cdf.back().percentile = pct;
    } else {
      cdf.push_back({samples[i], pct});
    }
  }
  return cdf;
}

double cdf_quantile(const std::vector<CdfPoint>& cdf, double q) {
  if (cdf.empty()) throw ConfigError("quantile of an empty CDF");
  for (const CdfPoint& p : cdf) {
    if (p.percentile >= q - 1e-12) return p.rate_bps;
  }
  return cdf.back().rate_bps;
}

void write_cdf_csv(const std::vector<CdfPoint>& cdf, std::ostream& out) {
  out << "rate_mbps,percentile\n";
  for (const CdfPoint& p : cdf) out << fmt::format("{:.6f},{:.6f}\n", p.rate_bps / 1e6, p.percentile);
}

void write_rate_report_csv(const RateReport& report, std::ostream& out) {
  out << "ue,uplink_mbps,downlink_mbps\n";
  for (const UeRate& u : report.rates) {
    out << fmt::format("{},{:.6f},{:.6f}\n", u.ue, u.uplink_bps / 1e6, u.downlink_bps / 1e6);
  }
}

CompareTable compare_table(const std::vector<RateReport>& reports) {
  if (reports.empty()) throw ConfigError("compare table needs at least one report");
  CompareTable t;
  for (const RateReport& r : reports) {
    t.rows.push_back({r.label, r.variant, r.anchor_count, r.gm_bps / 1e6, static_cast<int>(r.rates.size()),
                      r.excluded_ues});
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const CompareRow& a, const CompareRow& b) {
    return std::tie(a.variant, a.anchor_count, a.label) < std::tie(b.variant, b.anchor_count, b.label);
  });
  return t;
}

std::string CompareTable::to_text() const {
  std::size_t width = 8;
  for (const CompareRow& r : rows) width = std::max(width, r.label.size());
  std::string out = fmt::format("{:<{}}  {:>7}  {:>12}  {:>6}  {:>8}\n", "scenario", width, "anchors",
                                "gm_mbps", "ues", "excluded");
  for (const CompareRow& r : rows) {
    out += fmt::format("{:<{}}  {:>7}  {:>12.3f}  {:>6}  {:>8}\n", r.label, width, r.anchor_count, r.gm_mbps,
                       r.included_ues, r.excluded_ues);
  }
  return out;
}

std::string CompareTable::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CompareRow& r : rows) {
    arr.push_back({{"scenario", r.label},
                   {"variant", std::string(to_string(r.variant))},
                   {"anchors", r.anchor_count},
                   {"gm_mbps", r.gm_mbps},
                   {"included_ues", r.included_ues},
                   {"excluded_ues", r.excluded_ues}});
  }
  return arr.dump(2);
}

}  // namespace iab
