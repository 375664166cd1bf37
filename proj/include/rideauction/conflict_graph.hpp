#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "rideauction/instance.hpp"
#include "rideauction/prematch.hpp"

namespace rideauction {

using VertexIndex = std::uint32_t;

inline constexpr std::size_t kNoParticipant = std::numeric_limits<std::size_t>::max();

// Realized times of one vehicle-rider-rider trip.
struct ServiceTimes {
  double t_first = 0.0;    // t_i: wait of the first rider plus in-vehicle time
  double t_second = 0.0;   // t_j: from first pickup to own drop-off
  double d_vehicle = 0.0;  // d_k: vehicle start to final drop-off
};

// Vertex c = (k, i, j) of the conflict graph.
struct TripCombination {
  std::size_t vehicle = kNoParticipant;
  std::size_t first = kNoParticipant;
  std::size_t second = kNoParticipant;
  double weight = 0.0;
  ServiceTimes times;
  DropOrder drop_order = DropOrder::first_rider_first;
  std::vector<VertexIndex> neighbors;  // sorted, excludes self

  bool shares_participant(const TripCombination& o) const noexcept {
    if (vehicle != kNoParticipant && vehicle == o.vehicle) return true;
    const auto rider = [](std::size_t a, std::size_t b) { return a != kNoParticipant && a == b; };
    return rider(first, o.first) || rider(first, o.second) || rider(second, o.first) || rider(second, o.second);
  }
};

struct ConflictGraph {
  std::vector<TripCombination> vertices;
  std::size_t edge_count = 0;

  std::size_t size() const noexcept { return vertices.size(); }
  bool empty() const noexcept { return vertices.empty(); }
  double weight(std::size_t v) const noexcept { return vertices[v].weight; }
  std::span<const VertexIndex> neighbors(std::size_t v) const noexcept { return vertices[v].neighbors; }

  bool adjacent(std::size_t a, std::size_t b) const {
    const auto& n = vertices[a].neighbors;
    return std::binary_search(n.begin(), n.end(), static_cast<VertexIndex>(b));
  }
};

// Abstract weighted graph without trip semantics; used by solver tests and tools.
inline ConflictGraph make_graph(std::span<const double> weights,
                                std::span<const std::pair<std::size_t, std::size_t>> edges) {
  ConflictGraph g;
  g.vertices.resize(weights.size());
  for (std::size_t v = 0; v < weights.size(); ++v) g.vertices[v].weight = weights[v];
  for (auto [a, b] : edges) {
    if (a >= weights.size() || b >= weights.size()) throw InputError("edge endpoint out of range");
    if (a == b) throw InputError("self loops are not allowed");
    g.vertices[a].neighbors.push_back(static_cast<VertexIndex>(b));
    g.vertices[b].neighbors.push_back(static_cast<VertexIndex>(a));
  }
  for (auto& v : g.vertices) {
    std::sort(v.neighbors.begin(), v.neighbors.end());
    v.neighbors.erase(std::unique(v.neighbors.begin(), v.neighbors.end()), v.neighbors.end());
    g.edge_count += v.neighbors.size();
  }
  g.edge_count /= 2;
  return g;
}

// Trip times from the vehicle-to-first-pickup leg and the pickup-to-pickup leg.
inline ServiceTimes service_times(double wait_leg, double pickup_leg, const SharedTimes& shared) {
  return {wait_leg + pickup_leg + shared.s1, pickup_leg + shared.s2, wait_leg + pickup_leg + shared.s3};
}

inline ServiceTimes service_times(const Instance& inst, const SharedTimes& shared, std::size_t k) {
  const RideRequest& i = inst.requests.at(shared.first);
  const RideRequest& j = inst.requests.at(shared.second);
  return service_times(inst.oracle(inst.vehicles.at(k).position, i.origin), inst.oracle(i.origin, j.origin),
                       shared);
}

// Same as above but rejects combinations the pre-matching stage did not admit.
inline ServiceTimes service_times(const Instance& inst, const PrematchResult& pm, std::size_t k, std::size_t i,
                                  std::size_t j) {
  const auto& a = pm.sets.candidates.at(i);
  if (!std::binary_search(a.begin(), a.end(), k)) throw InputError("vehicle cannot reach first rider");
  return service_times(inst, pm.shared_times(i, j), k);
}

// Welfare contribution of serving i then j with vehicle k, given reservation
// prices indexed by request position.
inline double vertex_weight(const Instance& inst, std::size_t k, std::size_t i, std::size_t j,
                            const ServiceTimes& times, std::span<const double> reservation) {
  const RideRequest& ri = inst.requests[i];
  const RideRequest& rj = inst.requests[j];
  return reservation[i] - ri.value_of_time * times.t_first + reservation[j] - rj.value_of_time * times.t_second -
         inst.vehicles[k].cost_rate * times.d_vehicle;
}

inline std::vector<TripCombination> build_vertices(const Instance& inst, const PrematchResult& pm,
                                                   std::span<const double> reservation) {
  if (reservation.size() != inst.requests.size()) throw InputError("one reservation price per request required");
  std::vector<TripCombination> out;
  for (std::size_t k = 0; k < inst.vehicles.size(); ++k)
    for (std::size_t i : pm.sets.reachable[k])
      for (std::size_t j : pm.sets.second_riders[i]) {
        TripCombination c;
        c.vehicle = k;
        c.first = i;
        c.second = j;
        const SharedTimes& shared = pm.shared_times(i, j);
        c.times = service_times(inst, shared, k);
        c.drop_order = shared.drop_order;
        c.weight = vertex_weight(inst, k, i, j, c.times, reservation);
        if (c.weight >= 0.0) out.push_back(std::move(c));
      }
  return out;
}

// Joins every pair of combinations sharing a vehicle or rider. Candidate pairs
// come from a participant index; the result equals the all-pairs definition.
inline ConflictGraph build_edges(std::vector<TripCombination> vertices) {
  if (vertices.size() > std::numeric_limits<VertexIndex>::max()) throw InputError("too many vertices");
  std::size_t max_vehicle = 0;
  std::size_t max_rider = 0;
  for (const auto& c : vertices) {
    if (c.vehicle != kNoParticipant) max_vehicle = std::max(max_vehicle, c.vehicle + 1);
    if (c.first != kNoParticipant) max_rider = std::max(max_rider, c.first + 1);
    if (c.second != kNoParticipant) max_rider = std::max(max_rider, c.second + 1);
  }
  std::vector<std::vector<VertexIndex>> by_vehicle(max_vehicle);
  std::vector<std::vector<VertexIndex>> by_rider(max_rider);
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const auto& c = vertices[v];
    const auto idx = static_cast<VertexIndex>(v);
    if (c.vehicle != kNoParticipant) by_vehicle[c.vehicle].push_back(idx);
    if (c.first != kNoParticipant) by_rider[c.first].push_back(idx);
    if (c.second != kNoParticipant && c.second != c.first) by_rider[c.second].push_back(idx);
  }

  ConflictGraph g;
  std::vector<VertexIndex> buf;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const auto& c = vertices[v];
    buf.clear();
    const auto take = [&](const std::vector<VertexIndex>& list) { buf.insert(buf.end(), list.begin(), list.end()); };
    if (c.vehicle != kNoParticipant) take(by_vehicle[c.vehicle]);
    if (c.first != kNoParticipant) take(by_rider[c.first]);
    if (c.second != kNoParticipant) take(by_rider[c.second]);
    std::sort(buf.begin(), buf.end());
    buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
    buf.erase(std::remove(buf.begin(), buf.end(), static_cast<VertexIndex>(v)), buf.end());
    vertices[v].neighbors.assign(buf.begin(), buf.end());
    g.edge_count += buf.size();
  }
  g.edge_count /= 2;
  g.vertices = std::move(vertices);
  return g;
}

inline ConflictGraph build_conflict_graph(const Instance& inst, const PrematchResult& pm,
                                          std::span<const double> reservation) {
  return build_edges(build_vertices(inst, pm, reservation));
}

// Text dump: "|V| |E|", one "idx k i j w" line per vertex (participant ids),
// then one "m n" line per edge with m < n.
inline void write_graph_dump(std::ostream& os, const Instance& inst, const ConflictGraph& g) {
  os << g.size() << ' ' << g.edge_count << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& c = g.vertices[v];
    os << v << ' ' << inst.vehicles[c.vehicle].id << ' ' << inst.requests[c.first].id << ' '
       << inst.requests[c.second].id << ' ' << c.weight << '\n';
  }
  os.precision(old_precision);
  for (std::size_t v = 0; v < g.size(); ++v)
    for (VertexIndex n : g.vertices[v].neighbors)
      if (n > v) os << v << ' ' << n << '\n';
}

}  // namespace rideauction
