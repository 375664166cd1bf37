#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace rideauction {

// Bad input: malformed documents, unresolvable locations, broken invariants.
// `path` names the offending field when known, e.g. "requests[2].id".
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what, std::string path = {})
      : std::invalid_argument(path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct NodeId {
  std::size_t value = 0;
  friend bool operator==(NodeId, NodeId) = default;
};

// Planar coordinates in meters.
struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using Location = std::variant<NodeId, Point>;

enum class PlanarMetric { euclidean, manhattan_grid };

// Travel times are minutes. Matrix mode may be asymmetric and need not obey
// the triangle inequality.
class TravelTimeOracle {
 public:
  static TravelTimeOracle matrix(std::vector<std::vector<double>> minutes) {
    const std::size_t n = minutes.size();
    for (std::size_t a = 0; a < n; ++a) {
      if (minutes[a].size() != n)
        throw InputError("matrix must be square", "oracle.matrix[" + std::to_string(a) + "]");
      for (std::size_t b = 0; b < n; ++b) {
        const double t = minutes[a][b];
        const std::string path =
            "oracle.matrix[" + std::to_string(a) + "][" + std::to_string(b) + "]";
        if (!std::isfinite(t) || t < 0.0) throw InputError("travel time must be finite and >= 0", path);
        if (a == b && t != 0.0) throw InputError("diagonal must be zero", path);
      }
    }
    TravelTimeOracle o;
    o.mode_ = Mode::matrix;
    o.matrix_ = std::move(minutes);
    return o;
  }

  static TravelTimeOracle planar(double speed_m_per_min, PlanarMetric metric) {
    if (!std::isfinite(speed_m_per_min) || speed_m_per_min <= 0.0)
      throw InputError("speed must be positive", "oracle.speed");
    TravelTimeOracle o;
    o.mode_ = Mode::planar;
    o.speed_ = speed_m_per_min;
    o.metric_ = metric;
    return o;
  }

  bool is_matrix() const noexcept { return mode_ == Mode::matrix; }
  const std::vector<std::vector<double>>& minutes() const noexcept { return matrix_; }
  std::size_t node_count() const noexcept { return matrix_.size(); }
  double speed() const noexcept { return speed_; }
  PlanarMetric metric() const noexcept { return metric_; }

  bool resolvable(const Location& loc) const noexcept {
    if (mode_ == Mode::matrix) {
      const auto* id = std::get_if<NodeId>(&loc);
      return id != nullptr && id->value < matrix_.size();
    }
    const auto* p = std::get_if<Point>(&loc);
    return p != nullptr && std::isfinite(p->x) && std::isfinite(p->y);
  }

  double operator()(const Location& a, const Location& b) const {
    if (!resolvable(a) || !resolvable(b)) throw InputError("unresolvable location");
    if (mode_ == Mode::matrix) return matrix_[std::get<NodeId>(a).value][std::get<NodeId>(b).value];
    const Point& p = std::get<Point>(a);
    const Point& q = std::get<Point>(b);
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    const double meters =
        metric_ == PlanarMetric::euclidean ? std::hypot(dx, dy) : std::abs(dx) + std::abs(dy);
    return meters / speed_;
  }

 private:
  enum class Mode { matrix, planar };
  Mode mode_ = Mode::planar;
  std::vector<std::vector<double>> matrix_;
  double speed_ = 1.0;
  PlanarMetric metric_ = PlanarMetric::euclidean;
};

inline double travel_time(const TravelTimeOracle& oracle, const Location& a, const Location& b) {
  return oracle(a, b);
}

// Execution time of a stop sequence: sum of consecutive legs.
inline double sequence_time(const TravelTimeOracle& oracle, std::span<const Location> stops) {
  if (stops.empty()) throw InputError("stop sequence must not be empty");
  double total = 0.0;
  for (std::size_t s = 1; s < stops.size(); ++s) total += oracle(stops[s - 1], stops[s]);
  if (stops.size() == 1 && !oracle.resolvable(stops.front())) throw InputError("unresolvable location");
  return total;
}

inline double sequence_time(const TravelTimeOracle& oracle, std::initializer_list<Location> stops) {
  return sequence_time(oracle, std::span<const Location>(stops.begin(), stops.size()));
}

struct RideRequest {
  std::int64_t id = 0;
  Location origin;
  Location destination;
  double value_of_time = 0.0;  // C_r, money per minute
  double private_time = 0.0;   // P_r, derived from the oracle
};

struct Vehicle {
  std::int64_t id = 0;
  Location position;
  double cost_rate = 0.0;  // B_k, money per minute
  int capacity = 2;
};

struct PlatformConfig {
  double max_wait = 10.0;             // minutes
  double max_detour = 15.0;           // minutes
  double per_minute_price = 0.75;     // money per minute
  std::optional<double> flat_fee;     // derived from fleet cost when absent
  double batch_interval = 30.0;       // seconds

  double delay_budget() const noexcept { return max_wait + max_detour; }
};

struct Instance {
  TravelTimeOracle oracle = TravelTimeOracle::planar(1.0, PlanarMetric::euclidean);
  std::vector<RideRequest> requests;
  std::vector<Vehicle> vehicles;
  PlatformConfig config;
};

// Fills private_time for every request from the oracle.
inline void derive_private_times(Instance& inst) {
  for (auto& r : inst.requests) r.private_time = inst.oracle(r.origin, r.destination);
}

// Checks every cross-field invariant; throws InputError naming the field.
inline void validate(const Instance& inst) {
  const auto fin = [](double v) { return std::isfinite(v); };
  const PlatformConfig& c = inst.config;
  if (!fin(c.max_wait) || c.max_wait <= 0.0) throw InputError("must be > 0", "config.max_wait");
  if (!fin(c.max_detour) || c.max_detour <= 0.0) throw InputError("must be > 0", "config.max_detour");
  if (!fin(c.per_minute_price) || c.per_minute_price < 0.0)
    throw InputError("must be >= 0", "config.per_minute_price");
  if (c.flat_fee && (!fin(*c.flat_fee) || *c.flat_fee < 0.0)) throw InputError("must be >= 0", "config.flat_fee");
  if (!fin(c.batch_interval) || c.batch_interval <= 0.0) throw InputError("must be > 0", "config.batch_interval");

  std::unordered_set<std::int64_t> seen;
  for (std::size_t n = 0; n < inst.requests.size(); ++n) {
    const RideRequest& r = inst.requests[n];
    const std::string at = "requests[" + std::to_string(n) + "]";
    if (!seen.insert(r.id).second) throw InputError("duplicate request id " + std::to_string(r.id), at + ".id");
    if (!inst.oracle.resolvable(r.origin)) throw InputError("unresolvable location", at + ".origin");
    if (!inst.oracle.resolvable(r.destination)) throw InputError("unresolvable location", at + ".destination");
    if (!fin(r.value_of_time) || r.value_of_time < 0.0) throw InputError("must be >= 0", at + ".value_of_time");
    if (!(r.private_time > 0.0)) throw InputError("private trip time must be > 0", at + ".destination");
  }
  seen.clear();
  for (std::size_t n = 0; n < inst.vehicles.size(); ++n) {
    const Vehicle& v = inst.vehicles[n];
    const std::string at = "vehicles[" + std::to_string(n) + "]";
    if (!seen.insert(v.id).second) throw InputError("duplicate vehicle id " + std::to_string(v.id), at + ".id");
    if (!inst.oracle.resolvable(v.position)) throw InputError("unresolvable location", at + ".position");
    if (!fin(v.cost_rate) || v.cost_rate < 0.0) throw InputError("must be >= 0", at + ".cost_rate");
    if (v.capacity < 2) throw InputError("must be >= 2", at + ".capacity");
  }
}

}  // namespace rideauction
