#pragma once

#include <cmath>
#include <iomanip>
#include <ostream>
#include <span>
#include <vector>

#include "rideauction/conflict_graph.hpp"
#include "rideauction/instance.hpp"

namespace rideauction {

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// Flat fee that lets pooled fares cover the cost of any admissible trip when
// riders bid a near-zero value of time.
inline double flat_fee(double cost_rate, double max_wait, double max_detour) {
  return cost_rate * (max_wait + max_detour) / 2.0;
}

// Configured flat fee, or the derived one for a uniform-cost fleet.
inline double resolve_flat_fee(const Instance& inst) {
  if (inst.config.flat_fee) return *inst.config.flat_fee;
  if (inst.vehicles.empty()) return 0.0;
  const double b = inst.vehicles.front().cost_rate;
  for (const auto& v : inst.vehicles)
    if (v.cost_rate != b)
      throw ConfigError("flat fee can only be derived for a fleet with uniform cost_rate", "config.flat_fee");
  return flat_fee(b, inst.config.max_wait, inst.config.max_detour);
}

// True when per-minute price and flat fee satisfy the cost-coverage guarantee.
inline bool cost_coverage_guaranteed(const Instance& inst) {
  double max_rate = 0.0;
  for (const auto& v : inst.vehicles) max_rate = std::max(max_rate, v.cost_rate);
  if (inst.config.per_minute_price < max_rate) return false;
  return resolve_flat_fee(inst) >= flat_fee(max_rate, inst.config.max_wait, inst.config.max_detour);
}

// Maximum reservation price F_r the platform derives from the submitted value
// of time. `config.flat_fee` must be resolved.
inline double reservation_price(const RideRequest& r, const PlatformConfig& config) {
  if (!config.flat_fee) throw ConfigError("flat fee unresolved", "config.flat_fee");
  return *config.flat_fee + r.private_time * config.per_minute_price +
         r.value_of_time * (r.private_time + config.delay_budget());
}

inline PlatformConfig resolved_config(const Instance& inst) {
  PlatformConfig c = inst.config;
  c.flat_fee = resolve_flat_fee(inst);
  return c;
}

inline std::vector<double> reservation_prices(const Instance& inst) {
  const PlatformConfig c = resolved_config(inst);
  std::vector<double> out;
  out.reserve(inst.requests.size());
  for (const auto& r : inst.requests) out.push_back(reservation_price(r, c));
  return out;
}

struct FareQuote {
  std::int64_t request = 0;
  double reservation_price = 0.0;  // F_r
  double fare = 0.0;               // F_r - C_r t_r
  double base_component = 0.0;     // p_b
  double time_component = 0.0;     // p_t P_r
  double savings_component = 0.0;  // C_r times the unused delay budget
  double experienced_delay = 0.0;  // t_r - P_r, minutes
};

// Service times shorter than the private trip by more than this are rejected.
inline constexpr double kServiceTimeSlack = 1e-9;

// Pay-your-bid fare of a winning rider with realized service time t_r.
inline FareQuote fare(const RideRequest& r, double service_time, const PlatformConfig& config) {
  if (service_time < r.private_time - kServiceTimeSlack)
    throw InputError("service time shorter than private trip for request " + std::to_string(r.id));
  FareQuote q;
  q.request = r.id;
  q.reservation_price = reservation_price(r, config);
  q.fare = q.reservation_price - r.value_of_time * service_time;
  q.base_component = *config.flat_fee;
  q.time_component = config.per_minute_price * r.private_time;
  q.experienced_delay = service_time - r.private_time;
  q.savings_component = r.value_of_time * (config.delay_budget() - q.experienced_delay);
  return q;
}

struct TripSettlement {
  std::size_t vehicle = 0;
  std::size_t first = 0;
  std::size_t second = 0;
  FareQuote first_fare;
  FareQuote second_fare;
  double vehicle_cost = 0.0;  // B_k d_k
  double margin = 0.0;        // fares - vehicle cost
};

struct SettlementReport {
  std::vector<TripSettlement> trips;
  std::vector<double> rider_utility;    // per request; zero under pay-your-bid
  std::vector<double> vehicle_utility;  // per vehicle; trip margin for serving vehicles
  double total_fares = 0.0;
  double total_cost = 0.0;
  double total_margin = 0.0;
};

// Prices an allocation: both fares per trip, vehicle cost, and participant
// utilities. The allocation must be participant-disjoint.
inline SettlementReport settle(std::span<const TripCombination> allocation, const Instance& inst) {
  const PlatformConfig config = resolved_config(inst);
  SettlementReport rep;
  rep.rider_utility.assign(inst.requests.size(), 0.0);
  rep.vehicle_utility.assign(inst.vehicles.size(), 0.0);
  std::vector<char> rider_used(inst.requests.size(), 0);
  std::vector<char> vehicle_used(inst.vehicles.size(), 0);

  for (const TripCombination& c : allocation) {
    if (c.vehicle >= inst.vehicles.size() || c.first >= inst.requests.size() || c.second >= inst.requests.size() ||
        c.first == c.second)
      throw InputError("allocation references participants outside the instance");
    if (vehicle_used[c.vehicle] || rider_used[c.first] || rider_used[c.second])
      throw InputError("allocation assigns a participant twice");
    vehicle_used[c.vehicle] = rider_used[c.first] = rider_used[c.second] = 1;

    TripSettlement t;
    t.vehicle = c.vehicle;
    t.first = c.first;
    t.second = c.second;
    const RideRequest& ri = inst.requests[c.first];
    const RideRequest& rj = inst.requests[c.second];
    t.first_fare = fare(ri, c.times.t_first, config);
    t.second_fare = fare(rj, c.times.t_second, config);
    t.vehicle_cost = inst.vehicles[c.vehicle].cost_rate * c.times.d_vehicle;
    t.margin = t.first_fare.fare + t.second_fare.fare - t.vehicle_cost;

    rep.rider_utility[c.first] =
        t.first_fare.reservation_price - ri.value_of_time * c.times.t_first - t.first_fare.fare;
    rep.rider_utility[c.second] =
        t.second_fare.reservation_price - rj.value_of_time * c.times.t_second - t.second_fare.fare;
    rep.vehicle_utility[c.vehicle] = t.margin;
    rep.total_fares += t.first_fare.fare + t.second_fare.fare;
    rep.total_cost += t.vehicle_cost;
    rep.total_margin += t.margin;
    rep.trips.push_back(t);
  }
  return rep;
}

// `trip,vehicle,rider,role,fare,base,time,savings,delay_min`; money at 4 decimals.
inline void write_fare_csv(std::ostream& os, const Instance& inst, const SettlementReport& rep) {
  os << "trip,vehicle,rider,role,fare,base,time,savings,delay_min\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::fixed << std::setprecision(4);
  for (std::size_t n = 0; n < rep.trips.size(); ++n) {
    const auto& t = rep.trips[n];
    const auto row = [&](const FareQuote& q, const char* role) {
      os << n << ',' << inst.vehicles[t.vehicle].id << ',' << q.request << ',' << role << ',' << q.fare << ','
         << q.base_component << ',' << q.time_component << ',' << q.savings_component << ','
         << q.experienced_delay << '\n';
    };
    row(t.first_fare, "first");
    row(t.second_fare, "second");
  }
  os.flags(flags);
  os.precision(precision);
}

// Per-trip margins plus a closing total row.
inline void write_margin_csv(std::ostream& os, const Instance& inst, const SettlementReport& rep) {
  os << "trip,vehicle,first,second,fares,vehicle_cost,margin\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::fixed << std::setprecision(4);
  for (std::size_t n = 0; n < rep.trips.size(); ++n) {
    const auto& t = rep.trips[n];
    os << n << ',' << inst.vehicles[t.vehicle].id << ',' << inst.requests[t.first].id << ','
       << inst.requests[t.second].id << ',' << t.first_fare.fare + t.second_fare.fare << ',' << t.vehicle_cost
       << ',' << t.margin << '\n';
  }
  os << "total,,,," << rep.total_fares << ',' << rep.total_cost << ',' << rep.total_margin << '\n';
  os.flags(flags);
  os.precision(precision);
}

}  // namespace rideauction
