#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rideauction/conflict_graph.hpp"
#include "rideauction/instance.hpp"
#include "rideauction/prematch.hpp"

namespace rideauction {

// Raised when an exhaustive method is asked to run beyond its size guard.
class RefusalError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr double kValueTolerance = 1e-9;

struct MwisSolution {
  std::vector<std::size_t> chosen;  // sorted vertex indices
  double value = 0.0;
  bool optimal = false;
  std::uint64_t nodes_explored = 0;
  double runtime = 0.0;  // seconds
};

inline bool is_independent(const ConflictGraph& g, std::span<const std::size_t> set) {
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b)
      if (set[a] == set[b] || g.adjacent(set[a], set[b])) return false;
  return true;
}

inline double set_weight(const ConflictGraph& g, std::span<const std::size_t> set) {
  double s = 0.0;
  for (std::size_t v : set) s += g.weight(v);
  return s;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Fixed-size bitset over vertex positions.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }

  // this & ~other
  Bits minus(const Bits& other) const {
    Bits out = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] &= ~other.words_[w];
    return out;
  }

  void intersect(const Bits& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      for (std::uint64_t bits = words_[w]; bits != 0; bits &= bits - 1)
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
  }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

inline constexpr std::size_t kBruteForceMaxVertices = 25;

// Exhaustive enumeration of independent sets in lexicographic order; the
// first set reaching the optimum (beyond tolerance) is kept, so ties resolve to
// the lexicographically smallest index set.
inline MwisSolution brute_force_mwis(const ConflictGraph& g, std::size_t max_vertices = kBruteForceMaxVertices) {
  if (g.size() > max_vertices || g.size() > 64)
    throw RefusalError("brute force limited to " + std::to_string(std::min<std::size_t>(max_vertices, 64)) +
                       " vertices, graph has " + std::to_string(g.size()));
  const auto t0 = detail::Clock::now();
  const std::size_t n = g.size();
  std::vector<std::uint64_t> adj(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (VertexIndex u : g.neighbors(v)) adj[v] |= std::uint64_t{1} << u;

  MwisSolution sol;
  std::vector<std::size_t> current;
  const auto visit = [&](auto&& self, std::size_t start, std::uint64_t blocked, double value) -> void {
    for (std::size_t v = start; v < n; ++v) {
      if ((blocked >> v) & 1U) continue;
      current.push_back(v);
      const double with = value + g.weight(v);
      ++sol.nodes_explored;
      if (with > sol.value + kValueTolerance) {
        sol.value = with;
        sol.chosen = current;
      }
      self(self, v + 1, blocked | adj[v], with);
      current.pop_back();
    }
  };
  visit(visit, 0, 0, 0.0);
  sol.value = set_weight(g, sol.chosen);
  sol.optimal = true;
  sol.runtime = detail::seconds_since(t0);
  return sol;
}

struct BranchAndBoundOptions {
  std::uint64_t node_budget = 50'000'000;
  std::size_t root_subgradient_iterations = 400;
  std::size_t node_subgradient_iterations = 25;
};

namespace detail {

// Compact participant labels of a conflict graph whose adjacency contains
// the shared-participant relation. Empty when the graph is not of that form.
struct TripStructure {
  std::vector<std::uint32_t> vehicle;
  std::vector<std::uint32_t> first;
  std::vector<std::uint32_t> second;
  std::size_t vehicles = 0;
  std::size_t riders = 0;

  bool empty() const noexcept { return vehicle.empty(); }
};

inline TripStructure trip_structure(const ConflictGraph& g, std::span<const std::size_t> order,
                                    const std::vector<Bits>& adj) {
  TripStructure ts;
  std::vector<std::size_t> vehicle_ids, rider_ids;
  for (std::size_t orig : order) {
    const auto& c = g.vertices[orig];
    if (c.vehicle == kNoParticipant || c.first == kNoParticipant || c.second == kNoParticipant || c.first == c.second)
      return {};
    vehicle_ids.push_back(c.vehicle);
    rider_ids.push_back(c.first);
    rider_ids.push_back(c.second);
  }
  const auto compact = [](std::vector<std::size_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };
  const auto vs = compact(vehicle_ids);
  const auto rs = compact(rider_ids);
  const auto pos = [](const std::vector<std::size_t>& ids, std::size_t id) {
    return static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  ts.vehicles = vs.size();
  ts.riders = rs.size();
  std::vector<std::vector<std::size_t>> groups(vs.size() + rs.size());
  for (std::size_t p = 0; p < order.size(); ++p) {
    const auto& c = g.vertices[order[p]];
    ts.vehicle.push_back(pos(vs, c.vehicle));
    ts.first.push_back(pos(rs, c.first));
    ts.second.push_back(pos(rs, c.second));
    groups[ts.vehicle.back()].push_back(p);
    groups[vs.size() + ts.first.back()].push_back(p);
    groups[vs.size() + ts.second.back()].push_back(p);
  }
  // The bound is only valid if every participant group is a clique.
  for (const auto& grp : groups)
    for (std::size_t a = 0; a < grp.size(); ++a)
      for (std::size_t b = a + 1; b < grp.size(); ++b)
        if (!adj[grp[a]].test(grp[b])) return {};
  return ts;
}

// Relaxation of the trip set-packing problem that keeps one trip per vehicle
// and prices rider usage with multipliers lambda >= 0:
//   L = sum of lambda over riders present + sum over vehicles of
//       max(0, best reduced weight w_c - lambda_i - lambda_j).
class RiderLagrangian {
 public:
  RiderLagrangian(const TripStructure& ts, std::span<const double> w)
      : ts_(ts), w_(w), best_(ts.vehicles), arg_(ts.vehicles), present_(ts.riders), count_(ts.riders) {}

  double evaluate(const Bits& cand, std::span<const double> lambda) {
    std::fill(best_.begin(), best_.end(), 0.0);
    std::fill(arg_.begin(), arg_.end(), kNone);
    std::fill(present_.begin(), present_.end(), 0);
    cand.for_each([&](std::size_t v) {
      const std::uint32_t i = ts_.first[v], j = ts_.second[v], k = ts_.vehicle[v];
      present_[i] = present_[j] = 1;
      const double reduced = w_[v] - lambda[i] - lambda[j];
      if (reduced > best_[k]) {
        best_[k] = reduced;
        arg_[k] = v;
      }
    });
    double bound = 0.0;
    for (double b : best_) bound += b;
    for (std::size_t r = 0; r < ts_.riders; ++r)
      if (present_[r]) bound += lambda[r];
    return bound;
  }

  // Subgradient descent on lambda; keeps and returns the lowest bound seen.
  double optimize(const Bits& cand, std::vector<double>& lambda, double target, std::size_t iterations) {
    double best_bound = evaluate(cand, lambda);
    std::vector<double> best_lambda = lambda;
    double bound = best_bound;
    double theta = 1.0;
    std::size_t stale = 0;
    for (std::size_t it = 0; it < iterations && best_bound > target; ++it) {
      std::fill(count_.begin(), count_.end(), 0);
      for (std::size_t k = 0; k < ts_.vehicles; ++k)
        if (arg_[k] != kNone) {
          ++count_[ts_.first[arg_[k]]];
          ++count_[ts_.second[arg_[k]]];
        }
      double norm = 0.0;
      for (std::size_t r = 0; r < ts_.riders; ++r)
        if (present_[r]) {
          const double gr = 1.0 - count_[r];
          if (gr < 0.0 || lambda[r] > 0.0) norm += gr * gr;
        }
      if (norm == 0.0) break;
      const double step = theta * (bound - target) / norm;
      for (std::size_t r = 0; r < ts_.riders; ++r)
        if (present_[r]) lambda[r] = std::max(0.0, lambda[r] - step * (1.0 - count_[r]));
      bound = evaluate(cand, lambda);
      if (bound < best_bound - 1e-12) {
        best_bound = bound;
        best_lambda = lambda;
        stale = 0;
      } else if (++stale >= 5) {
        theta *= 0.5;
        stale = 0;
      }
    }
    lambda = std::move(best_lambda);
    return evaluate(cand, lambda);
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const TripStructure& ts_;
  std::span<const double> w_;
  std::vector<double> best_;
  std::vector<std::size_t> arg_;
  std::vector<char> present_;
  std::vector<int> count_;
};

}  // namespace detail

// Include/exclude branch and bound. Vertices are relabeled by descending
// weight so the branching vertex is always the heaviest undecided one.
//
// Bounds: for trip graphs (every vertex labeled with a vehicle and two riders,
// every participant group a clique) a Lagrangian relaxation over rider
// constraints, with multipliers tuned by subgradient steps at each node and
// re-evaluated after every exclusion. Otherwise the sum of clique maxima of a
// greedy clique cover of the candidate set, kept across the exclusion chain
// of a node with only the affected clique maximum updated.
inline MwisSolution branch_and_bound_mwis(const ConflictGraph& g, BranchAndBoundOptions opts = {}) {
  const auto t0 = detail::Clock::now();
  MwisSolution sol;

  std::vector<std::size_t> order;  // relabeled -> original
  for (std::size_t v = 0; v < g.size(); ++v)
    if (g.weight(v) > 0.0) order.push_back(v);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g.weight(a) > g.weight(b); });
  const std::size_t n = order.size();
  std::vector<std::size_t> label(g.size(), n);
  for (std::size_t p = 0; p < n; ++p) label[order[p]] = p;

  std::vector<double> w(n);
  std::vector<detail::Bits> adj(n, detail::Bits(n));
  for (std::size_t p = 0; p < n; ++p) {
    w[p] = g.weight(order[p]);
    for (VertexIndex u : g.neighbors(order[p]))
      if (label[u] < n) adj[p].set(label[u]);
  }

  const detail::TripStructure trips = detail::trip_structure(g, order, adj);
  detail::RiderLagrangian lagrangian(trips, w);

  std::vector<std::size_t> current;
  std::vector<std::size_t> best;
  double best_value = 0.0;
  bool exhausted = false;

  const auto enter = [&](double value) {
    if (++sol.nodes_explored > opts.node_budget) {
      exhausted = true;
      return false;
    }
    if (value > best_value) {
      best_value = value;
      best = current;
    }
    return true;
  };

  const auto first_bit = [](const detail::Bits& b) {
    std::size_t v = std::numeric_limits<std::size_t>::max();
    b.for_each([&](std::size_t x) { v = std::min(v, x); });
    return v;
  };

  const auto expand_trips = [&](auto&& self, detail::Bits cand, double value, std::vector<double> lambda,
                                std::size_t iterations) -> void {
    if (!enter(value)) return;
    double bound = lagrangian.optimize(cand, lambda, best_value - value, iterations);
    while (true) {
      if (value + bound <= best_value + 1e-12) return;
      const std::size_t v = first_bit(cand);
      if (v == std::numeric_limits<std::size_t>::max()) return;
      cand.reset(v);
      current.push_back(v);
      self(self, cand.minus(adj[v]), value + w[v], lambda, opts.node_subgradient_iterations);
      current.pop_back();
      if (exhausted) return;
      bound = lagrangian.evaluate(cand, lambda);
    }
  };

  struct Clique {
    std::vector<std::size_t> members;  // ascending label = descending weight
    detail::Bits common;
    std::size_t head = 0;
  };

  const auto expand_cliques = [&](auto&& self, detail::Bits cand, double value) -> void {
    if (!enter(value)) return;
    std::vector<Clique> cover;
    cand.for_each([&](std::size_t v) {
      for (auto& c : cover)
        if (c.common.test(v)) {
          c.members.push_back(v);
          c.common.intersect(adj[v]);
          return;
        }
      Clique c;
      c.members.push_back(v);
      c.common = adj[v];
      cover.push_back(std::move(c));
    });
    double bound = 0.0;
    for (const auto& c : cover) bound += w[c.members.front()];

    while (true) {
      if (value + bound <= best_value + 1e-12) return;
      Clique* pick = nullptr;
      for (auto& c : cover)
        if (c.head < c.members.size() && (pick == nullptr || c.members[c.head] < pick->members[pick->head]))
          pick = &c;
      if (pick == nullptr) return;
      const std::size_t v = pick->members[pick->head];

      cand.reset(v);
      current.push_back(v);
      self(self, cand.minus(adj[v]), value + w[v]);
      current.pop_back();
      if (exhausted) return;

      bound -= w[v];
      if (++pick->head < pick->members.size()) bound += w[pick->members[pick->head]];
    }
  };

  detail::Bits all(n);
  for (std::size_t p = 0; p < n; ++p) all.set(p);
  if (!trips.empty()) {
    expand_trips(expand_trips, all, 0.0, std::vector<double>(trips.riders, 0.0), opts.root_subgradient_iterations);
  } else {
    expand_cliques(expand_cliques, all, 0.0);
  }

  for (std::size_t p : best) sol.chosen.push_back(order[p]);
  std::sort(sol.chosen.begin(), sol.chosen.end());
  sol.value = set_weight(g, sol.chosen);
  sol.optimal = !exhausted;
  sol.runtime = detail::seconds_since(t0);
  return sol;
}

// A priced trip bid: vehicle k serving first rider i then second rider j, with
// its welfare contribution.
struct TripBid {
  std::size_t vehicle = 0;
  std::size_t first = 0;
  std::size_t second = 0;
  double value = 0.0;
};

struct WdpResult {
  std::vector<TripBid> allocation;
  double value = 0.0;
  std::uint64_t allocations_enumerated = 0;
};

inline constexpr std::size_t kWdpMaxVehicles = 6;
inline constexpr std::size_t kWdpMaxRiders = 12;

namespace detail {

// Enumerates every participant-disjoint selection of bids: each vehicle takes
// at most one bid and each rider appears in at most one. `score` maps a
// complete selection (bid indices) to its welfare.
template <class Score>
WdpResult enumerate_allocations(std::span<const TripBid> bids, std::size_t vehicles, std::size_t riders,
                                Score&& score) {
  std::vector<std::vector<std::size_t>> by_vehicle(vehicles);
  for (std::size_t b = 0; b < bids.size(); ++b) by_vehicle[bids[b].vehicle].push_back(b);

  WdpResult res;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> best;
  std::vector<char> rider_used(riders, 0);
  const auto walk = [&](auto&& self, std::size_t k) -> void {
    if (k == vehicles) {
      ++res.allocations_enumerated;
      const double v = score(std::span<const std::size_t>(chosen));
      if (v > res.value + kValueTolerance) {
        res.value = v;
        best = chosen;
      }
      return;
    }
    self(self, k + 1);
    for (std::size_t b : by_vehicle[k]) {
      const TripBid& bid = bids[b];
      if (rider_used[bid.first] || rider_used[bid.second]) continue;
      rider_used[bid.first] = rider_used[bid.second] = 1;
      chosen.push_back(b);
      self(self, k + 1);
      chosen.pop_back();
      rider_used[bid.first] = rider_used[bid.second] = 0;
    }
  };
  walk(walk, 0);
  for (std::size_t b : best) res.allocation.push_back(bids[b]);
  return res;
}

}  // namespace detail

// Winner determination by direct enumeration over a table of trip bids, with
// allocation welfare the sum of bid values.
inline WdpResult enumerate_wdp(std::span<const TripBid> bids) {
  std::size_t vehicles = 0;
  std::size_t riders = 0;
  for (const auto& b : bids) {
    if (b.first == b.second) throw InputError("bid pairs a rider with itself");
    vehicles = std::max(vehicles, b.vehicle + 1);
    riders = std::max({riders, b.first + 1, b.second + 1});
  }
  if (vehicles > kWdpMaxVehicles || riders > kWdpMaxRiders)
    throw RefusalError("allocation enumeration limited to 6 vehicles and 12 riders");
  return detail::enumerate_allocations(bids, vehicles, riders, [&](std::span<const std::size_t> sel) {
    double s = 0.0;
    for (std::size_t b : sel) s += bids[b].value;
    return s;
  });
}

// Winner determination straight from the instance: enumerates every
// participant-disjoint set of admissible triples (k reaches i, j pairs after
// i) and scores each allocation as the sum of served riders' valuations
// F_r - C_r t_r minus the sum of vehicle costs B_k d_k. Times come from the
// stop sequences themselves, not from the conflict-graph path.
inline WdpResult enumerate_wdp(const Instance& inst, const PrematchResult& pm, std::span<const double> reservation) {
  const std::size_t nk = inst.vehicles.size();
  const std::size_t nr = inst.requests.size();
  if (nk > kWdpMaxVehicles || nr > kWdpMaxRiders)
    throw RefusalError("allocation enumeration limited to 6 vehicles and 12 riders");
  if (reservation.size() != nr) throw InputError("one reservation price per request required");

  struct Realized {
    double t_first, t_second, d_vehicle;
  };
  std::vector<TripBid> bids;
  std::vector<Realized> realized;
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t i = 0; i < nr; ++i) {
      const auto& a = pm.sets.candidates[i];
      if (!std::binary_search(a.begin(), a.end(), k)) continue;
      for (std::size_t j : pm.sets.second_riders[i]) {
        const RideRequest& ri = inst.requests[i];
        const RideRequest& rj = inst.requests[j];
        const Location& start = inst.vehicles[k].position;
        const bool first_out = pm.shared_times(i, j).drop_order == DropOrder::first_rider_first;
        Realized r{};
        if (first_out) {
          r.t_first = sequence_time(inst.oracle, {start, ri.origin, rj.origin, ri.destination});
          r.t_second = sequence_time(inst.oracle, {ri.origin, rj.origin, ri.destination, rj.destination});
          r.d_vehicle = sequence_time(inst.oracle, {start, ri.origin, rj.origin, ri.destination, rj.destination});
        } else {
          r.t_first = sequence_time(inst.oracle, {start, ri.origin, rj.origin, rj.destination, ri.destination});
          r.t_second = sequence_time(inst.oracle, {ri.origin, rj.origin, rj.destination});
          r.d_vehicle = sequence_time(inst.oracle, {start, ri.origin, rj.origin, rj.destination, ri.destination});
        }
        bids.push_back({k, i, j, 0.0});
        realized.push_back(r);
      }
    }

  std::vector<double> served(nr);
  std::vector<double> rider_time(nr);
  std::vector<double> vehicle_time(nk);
  auto res = detail::enumerate_allocations(bids, nk, nr, [&](std::span<const std::size_t> sel) {
    std::fill(served.begin(), served.end(), 0.0);
    std::fill(rider_time.begin(), rider_time.end(), 0.0);
    std::fill(vehicle_time.begin(), vehicle_time.end(), 0.0);
    for (std::size_t b : sel) {
      served[bids[b].first] = served[bids[b].second] = 1.0;
      rider_time[bids[b].first] = realized[b].t_first;
      rider_time[bids[b].second] = realized[b].t_second;
      vehicle_time[bids[b].vehicle] = realized[b].d_vehicle;
    }
    double sw = 0.0;
    for (std::size_t r = 0; r < nr; ++r)
      sw += served[r] * reservation[r] - inst.requests[r].value_of_time * rider_time[r];
    for (std::size_t k = 0; k < nk; ++k) sw -= inst.vehicles[k].cost_rate * vehicle_time[k];
    return sw;
  });
  for (auto& bid : res.allocation) {
    const auto it = std::find_if(bids.begin(), bids.end(), [&](const TripBid& b) {
      return b.vehicle == bid.vehicle && b.first == bid.first && b.second == bid.second;
    });
    const Realized& r = realized[static_cast<std::size_t>(it - bids.begin())];
    bid.value = reservation[bid.first] - inst.requests[bid.first].value_of_time * r.t_first +
                reservation[bid.second] - inst.requests[bid.second].value_of_time * r.t_second -
                inst.vehicles[bid.vehicle].cost_rate * r.d_vehicle;
  }
  return res;
}

}  // namespace rideauction
