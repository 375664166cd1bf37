#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "rideauction/instance.hpp"

namespace rideauction {

enum class DropOrder { first_rider_first, second_rider_first };

// Remaining travel times once the second rider (j) has been picked up after
// the first (i), for the cheaper feasible drop-off order.
struct SharedTimes {
  std::size_t first = 0;   // request index i
  std::size_t second = 0;  // request index j
  double s1 = 0.0;         // remaining time of the first rider
  double s2 = 0.0;         // remaining time of the second rider
  double s3 = 0.0;         // remaining vehicle time, max(s1, s2)
  DropOrder drop_order = DropOrder::first_rider_first;
};

// All sets hold positions into Instance::requests / Instance::vehicles and are
// sorted ascending.
struct PrematchSets {
  std::vector<std::vector<std::size_t>> reachable;       // N_k, per vehicle
  std::vector<std::vector<std::size_t>> candidates;      // A_r, per request
  std::vector<std::vector<std::size_t>> second_riders;   // I_r, per request
  std::vector<std::vector<std::size_t>> first_riders;    // J_r, per request
};

struct PrematchResult {
  PrematchSets sets;
  std::map<std::pair<std::size_t, std::size_t>, SharedTimes> shared;

  const SharedTimes& shared_times(std::size_t i, std::size_t j) const {
    auto it = shared.find({i, j});
    if (it == shared.end()) throw InputError("rider pair not pre-matched");
    return it->second;
  }
};

// C0: the vehicle reaches the pickup within the wait threshold (inclusive).
inline bool check_vehicle_rider(const TravelTimeOracle& oracle, const Vehicle& k, const RideRequest& r,
                                double max_wait) {
  return oracle(k.position, r.origin) <= max_wait;
}

// Feasibility of picking up i then j, per conditions C1..C4. Returns the
// feasible drop-off order with the smaller total vehicle time; ties go to
// dropping the first rider first.
inline std::optional<SharedTimes> check_rider_pair(const TravelTimeOracle& oracle, const RideRequest& i,
                                                   const RideRequest& j, double max_detour,
                                                   std::size_t first_index = 0, std::size_t second_index = 0) {
  if (i.id == j.id) throw InputError("a rider cannot be paired with itself");
  const double pickup_leg = oracle(i.origin, j.origin);
  const double oj_di = oracle(j.origin, i.destination);
  const double oj_dj = oracle(j.origin, j.destination);
  const double oj_di_dj = oj_di + oracle(i.destination, j.destination);
  const double oj_dj_di = oj_dj + oracle(j.destination, i.destination);

  const bool c1 = pickup_leg + oj_di <= i.private_time + max_detour;
  const bool c2 = pickup_leg + oj_di_dj <= j.private_time + max_detour;
  const bool c3 = pickup_leg + oj_dj_di <= i.private_time + max_detour;
  const bool c4 = pickup_leg + oj_dj <= j.private_time + max_detour;
  const bool first_first = c1 && c2;
  const bool second_first = c3 && c4;
  if (!first_first && !second_first) return std::nullopt;

  SharedTimes st;
  st.first = first_index;
  st.second = second_index;
  if (first_first && (!second_first || oj_di_dj <= oj_dj_di)) {
    st.drop_order = DropOrder::first_rider_first;
    st.s1 = oj_di;
    st.s2 = oj_di_dj;
    st.s3 = oj_di_dj;
  } else {
    st.drop_order = DropOrder::second_rider_first;
    st.s2 = oj_dj;
    st.s1 = oj_dj_di;
    st.s3 = oj_dj_di;
  }
  return st;
}

inline PrematchResult prematch(const Instance& inst) {
  const std::size_t nr = inst.requests.size();
  const std::size_t nk = inst.vehicles.size();
  PrematchResult out;
  out.sets.reachable.resize(nk);
  out.sets.candidates.resize(nr);
  out.sets.second_riders.resize(nr);
  out.sets.first_riders.resize(nr);

  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t r = 0; r < nr; ++r)
      if (check_vehicle_rider(inst.oracle, inst.vehicles[k], inst.requests[r], inst.config.max_wait)) {
        out.sets.reachable[k].push_back(r);
        out.sets.candidates[r].push_back(k);
      }

  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nr; ++j) {
      if (i == j) continue;
      auto st = check_rider_pair(inst.oracle, inst.requests[i], inst.requests[j], inst.config.max_detour, i, j);
      if (!st) continue;
      out.sets.second_riders[i].push_back(j);
      out.sets.first_riders[j].push_back(i);
      out.shared.emplace(std::make_pair(i, j), *st);
    }
  return out;
}

// Debug dump of the shareability network as `type,from,to` rows, using ids.
inline void write_prematch_csv(std::ostream& os, const Instance& inst, const PrematchResult& pm) {
  os << "type,from,to\n";
  for (std::size_t k = 0; k < pm.sets.reachable.size(); ++k)
    for (std::size_t r : pm.sets.reachable[k]) os << "VR," << inst.vehicles[k].id << ',' << inst.requests[r].id << '\n';
  for (std::size_t i = 0; i < pm.sets.second_riders.size(); ++i)
    for (std::size_t j : pm.sets.second_riders[i])
      os << "RR," << inst.requests[i].id << ',' << inst.requests[j].id << '\n';
}

}  // namespace rideauction
