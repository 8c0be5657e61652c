#include <json.hpp>

#include "iabplan/errors.hpp"
#include "iabplan/geometry.hpp"

namespace iab {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "iabplan.topology/1";

json sites_to_json(const std::vector<Site>& sites) {
  json out = json::array();
  for (const Site& s : sites) out.push_back({{"id", s.id}, {"x_m", s.pos.x_m}, {"y_m", s.pos.y_m}});
  return out;
}

std::vector<Site> sites_from_json(const json& arr) {
  std::vector<Site> out;
  for (const json& s : arr) {
    out.push_back({s.at("id").get<int>(), {s.at("x_m").get<double>(), s.at("y_m").get<double>()}});
  }
  return out;
}

}  // namespace

std::string topology_to_json(const Topology& topo) {
  json doc;
  doc["schema"] = kSchema;
  doc["grid_rows"] = topo.grid_rows;
  doc["grid_cols"] = topo.grid_cols;
  doc["block_size_m"] = topo.block_size_m;
  doc["street_width_m"] = topo.street_width_m;
  doc["bs_sites"] = sites_to_json(topo.bs_sites);
  doc["ues"] = sites_to_json(topo.ues);
  json streets = json::array();
  for (const Rect& r : topo.street_segments) {
    streets.push_back({{"x_min", r.x_min}, {"y_min", r.y_min}, {"x_max", r.x_max}, {"y_max", r.y_max}});
  }
  doc["street_segments"] = std::move(streets);
  return doc.dump(2);
}

Topology topology_from_json(std::string_view text) {
  Topology topo;
  try {
    const json doc = json::parse(text);
    if (doc.value("schema", std::string(kSchema)) != kSchema) {
      throw ConfigError("unsupported topology schema " + doc.at("schema").get<std::string>());
    }
    topo.grid_rows = doc.value("grid_rows", 0);
    topo.grid_cols = doc.value("grid_cols", 0);
    topo.block_size_m = doc.value("block_size_m", 0.0);
    topo.street_width_m = doc.value("street_width_m", 0.0);
    topo.bs_sites = sites_from_json(doc.at("bs_sites"));
    topo.ues = sites_from_json(doc.at("ues"));
    for (const json& r : doc.at("street_segments")) {
      topo.street_segments.push_back({r.at("x_min").get<double>(), r.at("y_min").get<double>(),
                                      r.at("x_max").get<double>(), r.at("y_max").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed topology JSON: ") + e.what());
  }
  validate_topology(topo);
  return topo;
}

}  // namespace iab
