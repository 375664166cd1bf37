#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rideauction/instance.hpp"

namespace rideauction {

inline constexpr int kInstanceSchemaVersion = 1;

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& at) {
  if (!obj.is_object()) throw InputError("expected object", at);
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError("missing field", at.empty() ? key : at + "." + key);
  return *it;
}

inline double number(const json& v, const std::string& at) {
  if (!v.is_number()) throw InputError("expected number", at);
  return v.get<double>();
}

inline std::int64_t integer(const json& v, const std::string& at) {
  if (!v.is_number_integer()) throw InputError("expected integer", at);
  return v.get<std::int64_t>();
}

inline Location location_from_json(const json& v, const std::string& at) {
  if (v.is_number_integer()) {
    const auto id = v.get<std::int64_t>();
    if (id < 0) throw InputError("node id must be >= 0", at);
    return NodeId{static_cast<std::size_t>(id)};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Point{v[0].get<double>(), v[1].get<double>()};
  throw InputError("location must be a node id or [x, y]", at);
}

inline json location_to_json(const Location& loc) {
  if (const auto* id = std::get_if<NodeId>(&loc)) return id->value;
  const Point& p = std::get<Point>(loc);
  return json::array({p.x, p.y});
}

inline TravelTimeOracle oracle_from_json(const json& v) {
  const std::string mode = require(v, "mode", "oracle").is_string() ? v["mode"].get<std::string>() : "";
  if (mode == "matrix") {
    const json& m = require(v, "matrix", "oracle");
    if (!m.is_array()) throw InputError("expected array of rows", "oracle.matrix");
    std::vector<std::vector<double>> rows;
    rows.reserve(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) {
      const std::string at = "oracle.matrix[" + std::to_string(a) + "]";
      if (!m[a].is_array()) throw InputError("expected array", at);
      auto& row = rows.emplace_back();
      row.reserve(m[a].size());
      for (std::size_t b = 0; b < m[a].size(); ++b) row.push_back(number(m[a][b], at + "[" + std::to_string(b) + "]"));
    }
    return TravelTimeOracle::matrix(std::move(rows));
  }
  if (mode == "planar") {
    const double speed = number(require(v, "speed", "oracle"), "oracle.speed");
    const json& metric = require(v, "metric", "oracle");
    if (metric == "euclidean") return TravelTimeOracle::planar(speed, PlanarMetric::euclidean);
    if (metric == "manhattan-grid") return TravelTimeOracle::planar(speed, PlanarMetric::manhattan_grid);
    throw InputError("metric must be \"euclidean\" or \"manhattan-grid\"", "oracle.metric");
  }
  throw InputError("mode must be \"matrix\" or \"planar\"", "oracle.mode");
}

inline json oracle_to_json(const TravelTimeOracle& o) {
  if (o.is_matrix()) return {{"mode", "matrix"}, {"matrix", o.minutes()}};
  return {{"mode", "planar"},
          {"speed", o.speed()},
          {"metric", o.metric() == PlanarMetric::euclidean ? "euclidean" : "manhattan-grid"}};
}

}  // namespace detail

// Parses and validates an instance document. Private trip times are derived
// from the oracle; they are never read from the document.
inline Instance instance_from_json(const nlohmann::json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw InputError("instance document must be a JSON object");
  if (auto it = doc.find("version"); it != doc.end() && *it != kInstanceSchemaVersion)
    throw InputError("unsupported schema version", "version");

  Instance inst;
  inst.oracle = oracle_from_json(require(doc, "oracle", ""));

  const json& cfg = require(doc, "config", "");
  inst.config.max_wait = number(require(cfg, "max_wait", "config"), "config.max_wait");
  inst.config.max_detour = number(require(cfg, "max_detour", "config"), "config.max_detour");
  inst.config.per_minute_price = number(require(cfg, "per_minute_price", "config"), "config.per_minute_price");
  inst.config.batch_interval = number(require(cfg, "batch_interval", "config"), "config.batch_interval");
  if (auto it = cfg.find("flat_fee"); it != cfg.end() && !it->is_null())
    inst.config.flat_fee = number(*it, "config.flat_fee");

  const json& reqs = require(doc, "requests", "");
  if (!reqs.is_array()) throw InputError("expected array", "requests");
  for (std::size_t n = 0; n < reqs.size(); ++n) {
    const std::string at = "requests[" + std::to_string(n) + "]";
    RideRequest r;
    r.id = integer(require(reqs[n], "id", at), at + ".id");
    r.origin = location_from_json(require(reqs[n], "origin", at), at + ".origin");
    r.destination = location_from_json(require(reqs[n], "destination", at), at + ".destination");
    r.value_of_time = number(require(reqs[n], "value_of_time", at), at + ".value_of_time");
    inst.requests.push_back(r);
  }

  const json& vehs = require(doc, "vehicles", "");
  if (!vehs.is_array()) throw InputError("expected array", "vehicles");
  for (std::size_t n = 0; n < vehs.size(); ++n) {
    const std::string at = "vehicles[" + std::to_string(n) + "]";
    Vehicle v;
    v.id = integer(require(vehs[n], "id", at), at + ".id");
    v.position = location_from_json(require(vehs[n], "position", at), at + ".position");
    v.cost_rate = number(require(vehs[n], "cost_rate", at), at + ".cost_rate");
    v.capacity = static_cast<int>(integer(require(vehs[n], "capacity", at), at + ".capacity"));
    inst.vehicles.push_back(v);
  }

  // Location checks must precede derivation so errors keep their field path.
  for (std::size_t n = 0; n < inst.requests.size(); ++n) {
    const std::string at = "requests[" + std::to_string(n) + "]";
    if (!inst.oracle.resolvable(inst.requests[n].origin)) throw InputError("unresolvable location", at + ".origin");
    if (!inst.oracle.resolvable(inst.requests[n].destination))
      throw InputError("unresolvable location", at + ".destination");
  }
  derive_private_times(inst);
  validate(inst);
  return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  using namespace detail;
  json doc;
  doc["version"] = kInstanceSchemaVersion;
  doc["oracle"] = oracle_to_json(inst.oracle);
  json reqs = json::array();
  for (const auto& r : inst.requests)
    reqs.push_back({{"id", r.id},
                    {"origin", location_to_json(r.origin)},
                    {"destination", location_to_json(r.destination)},
                    {"value_of_time", r.value_of_time}});
  doc["requests"] = std::move(reqs);
  json vehs = json::array();
  for (const auto& v : inst.vehicles)
    vehs.push_back({{"id", v.id},
                    {"position", location_to_json(v.position)},
                    {"cost_rate", v.cost_rate},
                    {"capacity", v.capacity}});
  doc["vehicles"] = std::move(vehs);
  json cfg = {{"max_wait", inst.config.max_wait},
              {"max_detour", inst.config.max_detour},
              {"per_minute_price", inst.config.per_minute_price},
              {"batch_interval", inst.config.batch_interval}};
  if (inst.config.flat_fee) cfg["flat_fee"] = *inst.config.flat_fee;
  doc["config"] = std::move(cfg);
  return doc;
}

inline Instance load_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  return instance_from_json(doc);
}

inline std::string save_instance(const Instance& inst) { return instance_to_json(inst).dump(); }

inline Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_instance(buf.str());
}

inline void save_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << save_instance(inst) << '\n';
}

}  // namespace rideauction
