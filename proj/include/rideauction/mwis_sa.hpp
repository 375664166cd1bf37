#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rideauction/conflict_graph.hpp"
#include "rideauction/mwis_exact.hpp"

namespace rideauction {

// The generator's algorithm is part of the reproducibility contract; uniform
// draws below are derived from raw 64-bit output, not from the
// implementation-defined standard distributions.
using Rng = std::mt19937_64;
inline constexpr const char* kRngAlgorithm = "mt19937_64";

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Unbiased integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SaParams {
  std::optional<double> t_initial;  // default max(1, 0.1 |E_greedy|)
  std::optional<double> t_min;      // default 1e-4 T_0
  double alpha = 0.999;
  std::uint64_t seed = 0;
};

struct Schedule {
  double t_initial = 1.0;
  double t_min = 1e-4;
  double alpha = 0.999;
};

inline Schedule resolve_schedule(const SaParams& p, double greedy_energy) {
  Schedule s;
  s.alpha = p.alpha;
  s.t_initial = p.t_initial.value_or(std::max(1.0, std::abs(greedy_energy) * 0.1));
  s.t_min = p.t_min.value_or(1e-4 * s.t_initial);
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)", "alpha");
  if (!(s.t_min > 0.0 && s.t_min < s.t_initial)) throw InputError("need 0 < t_min < t_initial", "t_min");
  return s;
}

enum class GreedyKey { weight, inv_degree, weight_per_degree, weight_per_neighbor_weight };

inline constexpr std::array<GreedyKey, 4> kGreedyKeys = {GreedyKey::weight, GreedyKey::inv_degree,
                                                         GreedyKey::weight_per_degree,
                                                         GreedyKey::weight_per_neighbor_weight};

inline const char* to_string(GreedyKey k) {
  switch (k) {
    case GreedyKey::weight: return "weight";
    case GreedyKey::inv_degree: return "inv_degree";
    case GreedyKey::weight_per_degree: return "weight_per_degree";
    case GreedyKey::weight_per_neighbor_weight: return "weight_per_neighbor_weight";
  }
  return "?";
}

// Descending by key, ties by ascending index. Degree-based keys of isolated
// vertices (and a zero neighbor-weight sum) count as +infinity.
inline std::vector<std::size_t> greedy_order(const ConflictGraph& g, GreedyKey key) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> score(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto deg = static_cast<double>(g.neighbors(v).size());
    const double w = g.weight(v);
    switch (key) {
      case GreedyKey::weight: score[v] = w; break;
      case GreedyKey::inv_degree: score[v] = deg == 0 ? inf : 1.0 / deg; break;
      case GreedyKey::weight_per_degree: score[v] = deg == 0 ? inf : w / deg; break;
      case GreedyKey::weight_per_neighbor_weight: {
        double nw = 0.0;
        for (VertexIndex u : g.neighbors(v)) nw += g.weight(u);
        score[v] = nw == 0.0 ? inf : w / nw;
        break;
      }
    }
  }
  std::vector<std::size_t> order(g.size());
  for (std::size_t v = 0; v < order.size(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score[a] != score[b] ? score[a] > score[b] : a < b;
  });
  return order;
}

struct OrderedSolution {
  std::vector<std::size_t> sequence;
  std::vector<std::size_t> independent_set;  // in selection order
  double energy = 0.0;                       // minus the set's weight
};

namespace detail {

// Greedy scan: keep each vertex not blocked by an earlier pick.
inline void decode_into(std::span<const std::size_t> sequence, const ConflictGraph& g, std::vector<char>& blocked,
                        std::vector<std::size_t>& set, double& energy) {
  blocked.assign(g.size(), 0);
  set.clear();
  double weight = 0.0;
  for (std::size_t v : sequence) {
    if (blocked[v]) continue;
    set.push_back(v);
    weight += g.weight(v);
    for (VertexIndex u : g.neighbors(v)) blocked[u] = 1;
  }
  energy = -weight;
}

}  // namespace detail

inline OrderedSolution decode_energy(std::span<const std::size_t> sequence, const ConflictGraph& g) {
  if (sequence.size() != g.size()) throw InputError("sequence must be a permutation of all vertices");
  std::vector<char> seen(g.size(), 0);
  for (std::size_t v : sequence) {
    if (v >= g.size() || seen[v]) throw InputError("sequence must be a permutation of all vertices");
    seen[v] = 1;
  }
  OrderedSolution out;
  out.sequence.assign(sequence.begin(), sequence.end());
  detail::decode_into(sequence, g, seen, out.independent_set, out.energy);
  return out;
}

// Swaps the sequence positions of two distinct members of the decoded set.
inline std::vector<std::size_t> neighbor(std::span<const std::size_t> sequence,
                                         std::span<const std::size_t> independent_set, Rng& rng) {
  std::vector<std::size_t> out(sequence.begin(), sequence.end());
  if (independent_set.size() < 2) return out;
  const std::size_t a = uniform_index(rng, independent_set.size());
  std::size_t b = uniform_index(rng, independent_set.size() - 1);
  if (b >= a) ++b;
  const auto pa = std::find(out.begin(), out.end(), independent_set[a]);
  const auto pb = std::find(out.begin(), out.end(), independent_set[b]);
  std::iter_swap(pa, pb);
  return out;
}

inline double acceptance_probability(double energy_old, double energy_new, double temperature) {
  if (energy_new < energy_old) return 1.0;
  return std::exp((energy_old - energy_new) / temperature);
}

// Metropolis step: one uniform draw X, accept iff p_a > X.
inline bool accept(double energy_old, double energy_new, double temperature, Rng& rng) {
  const double x = uniform01(rng);
  return acceptance_probability(energy_old, energy_new, temperature) > x;
}

inline const OrderedSolution& select(const OrderedSolution& old_solution, const OrderedSolution& new_solution,
                                     double temperature, Rng& rng) {
  if (!(temperature > 0.0)) throw InputError("temperature must be positive");
  return accept(old_solution.energy, new_solution.energy, temperature, rng) ? new_solution : old_solution;
}

struct AnnealStep {
  std::size_t iteration = 0;
  double temperature = 0.0;
  double current_energy = 0.0;
  double best_energy = 0.0;
};

struct AnnealResult {
  MwisSolution solution;
  GreedyKey initializer = GreedyKey::weight;
  double initial_value = 0.0;  // best of the greedy initializers
  std::size_t iterations = 0;
  Schedule schedule;
};

using AnnealMonitor = std::function<void(const AnnealStep&)>;

inline AnnealResult anneal_report(const ConflictGraph& g, const SaParams& params, const AnnealMonitor& monitor = {}) {
  const auto t0 = detail::Clock::now();
  AnnealResult res;
  if (g.empty()) {
    res.schedule = resolve_schedule(params, 0.0);
    res.solution.runtime = detail::seconds_since(t0);
    return res;
  }

  std::vector<char> scratch;
  OrderedSolution current;
  bool have = false;
  for (GreedyKey key : kGreedyKeys) {
    OrderedSolution s;
    s.sequence = greedy_order(g, key);
    detail::decode_into(s.sequence, g, scratch, s.independent_set, s.energy);
    if (!have || s.energy < current.energy) {
      current = std::move(s);
      res.initializer = key;
      have = true;
    }
  }
  {
    std::vector<std::size_t> start = current.independent_set;
    std::sort(start.begin(), start.end());
    res.initial_value = set_weight(g, start);
  }
  res.schedule = resolve_schedule(params, current.energy);

  Rng rng(params.seed);
  OrderedSolution best = current;
  OrderedSolution candidate;
  double temperature = res.schedule.t_initial;
  while (temperature > res.schedule.t_min) {
    candidate.sequence = neighbor(current.sequence, current.independent_set, rng);
    detail::decode_into(candidate.sequence, g, scratch, candidate.independent_set, candidate.energy);
    if (candidate.energy < best.energy) best = candidate;
    if (accept(current.energy, candidate.energy, temperature, rng)) std::swap(current, candidate);
    ++res.iterations;
    if (monitor) monitor({res.iterations, temperature, current.energy, best.energy});
    temperature *= res.schedule.alpha;
  }

  res.solution.chosen = best.independent_set;
  std::sort(res.solution.chosen.begin(), res.solution.chosen.end());
  // Summed in index order so values compare exactly with other solvers.
  res.solution.value = set_weight(g, res.solution.chosen);
  res.solution.optimal = false;
  res.solution.nodes_explored = res.iterations;
  res.solution.runtime = detail::seconds_since(t0);
  return res;
}

inline MwisSolution anneal(const ConflictGraph& g, const SaParams& params) { return anneal_report(g, params).solution; }

inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  return restart == 0 ? seed : splitmix64(seed + restart);
}

// Independent runs with derived seeds; the best value wins, earliest run on ties.
inline AnnealResult anneal_restarts(const ConflictGraph& g, SaParams params, std::size_t restarts) {
  const auto t0 = detail::Clock::now();
  const std::uint64_t base = params.seed;
  AnnealResult best;
  std::uint64_t iterations = 0;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    params.seed = restart_seed(base, r);
    AnnealResult run = anneal_report(g, params);
    iterations += run.iterations;
    if (r == 0 || run.solution.value > best.solution.value) best = std::move(run);
  }
  best.solution.nodes_explored = iterations;
  best.solution.runtime = detail::seconds_since(t0);
  return best;
}

}  // namespace rideauction
