#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rideauction/rideauction.hpp"

namespace rideauction::fixtures {

// Every rider shares origin and destination and every vehicle waits at the
// origin, so all vehicle-rider and rider-rider links exist and all weights are
// positive.
inline Instance fully_connected(std::size_t vehicles, std::size_t riders) {
  Instance inst;
  inst.oracle = TravelTimeOracle::planar(100.0, PlanarMetric::euclidean);
  for (std::size_t r = 0; r < riders; ++r)
    inst.requests.push_back({static_cast<std::int64_t>(r), Point{0, 0}, Point{1000, 0}, 0.3, 0.0});
  for (std::size_t k = 0; k < vehicles; ++k)
    inst.vehicles.push_back({static_cast<std::int64_t>(100 + k), Point{0, 0}, 0.216, 2});
  derive_private_times(inst);
  validate(inst);
  return inst;
}

// Small random instance on the default grid with a random fleet and demand size.
inline Instance random_small(std::uint64_t seed, std::size_t max_vehicles, std::size_t max_riders,
                             std::size_t min_riders = 2) {
  std::mt19937_64 rng(seed * 7919 + 13);
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.n_vehicles = std::uniform_int_distribution<std::size_t>(1, max_vehicles)(rng);
  cfg.n_requests = std::uniform_int_distribution<std::size_t>(min_riders, max_riders)(rng);
  cfg.network = GridNetwork{10, 10, 1.0};
  return generate(cfg);
}

inline ConflictGraph graph_of(const Instance& inst) {
  return build_conflict_graph(inst, prematch(inst), reservation_prices(inst));
}

// Erdos-Renyi graph with integer weights in [0, 20].
inline ConflictGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<double> w(n);
  std::uniform_int_distribution<int> wd(0, 20);
  for (auto& x : w) x = wd(rng);
  std::bernoulli_distribution edge(p);
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (edge(rng)) e.emplace_back(a, b);
  return make_graph(w, e);
}

}  // namespace rideauction::fixtures
