#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rideauction/mwis_sa.hpp"
#include "support.hpp"

using namespace rideauction;

namespace {

ConflictGraph triangle() {
  const std::vector<double> w = {4, 7, 2};
  const std::vector<std::pair<std::size_t, std::size_t>> e = {{0, 1}, {1, 2}, {0, 2}};
  return make_graph(w, e);
}

OrderedSolution with_energy(double e) {
  OrderedSolution s;
  s.energy = e;
  return s;
}

}  // namespace

TEST(GreedyOrder, ByWeight) {
  const std::vector<double> w = {5, 3, 9};
  EXPECT_EQ(greedy_order(make_graph(w, {}), GreedyKey::weight), (std::vector<std::size_t>{2, 0, 1}));
}

TEST(GreedyOrder, TiesKeepIndexOrder) {
  const std::vector<double> w = {2, 2, 2, 2};
  for (GreedyKey k : kGreedyKeys)
    EXPECT_EQ(greedy_order(make_graph(w, {}), k), (std::vector<std::size_t>{0, 1, 2, 3})) << to_string(k);
}

TEST(GreedyOrder, IsolatedVertexFirst) {
  const std::vector<double> w = {9, 8, 1};
  const std::vector<std::pair<std::size_t, std::size_t>> e = {{0, 1}};
  EXPECT_EQ(greedy_order(make_graph(w, e), GreedyKey::weight_per_degree).front(), 2u);
  EXPECT_EQ(greedy_order(make_graph(w, e), GreedyKey::inv_degree).front(), 2u);
  EXPECT_EQ(greedy_order(make_graph(w, e), GreedyKey::weight_per_neighbor_weight).front(), 2u);
}

TEST(GreedyOrder, NeighborWeightRatio) {
  // Star: center 0 (w=6) with leaves 1,2,3 (w=3,1,2). Neighbor-weight ratios
  // 6/6, 3/6, 1/6, 2/6; per-degree ratios 2, 3, 1, 2 (tie broken by index).
  const std::vector<double> w = {6, 3, 1, 2};
  const std::vector<std::pair<std::size_t, std::size_t>> e = {{0, 1}, {0, 2}, {0, 3}};
  EXPECT_EQ(greedy_order(make_graph(w, e), GreedyKey::weight_per_neighbor_weight),
            (std::vector<std::size_t>{0, 1, 3, 2}));
  EXPECT_EQ(greedy_order(make_graph(w, e), GreedyKey::weight_per_degree), (std::vector<std::size_t>{1, 0, 3, 2}));
}

TEST(Decode, Triangle) {
  const std::vector<std::size_t> seq = {1, 0, 2};
  const auto s = decode_energy(seq, triangle());
  EXPECT_EQ(s.independent_set, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.energy, -7.0);
}

TEST(Decode, EdgelessTakesEverything) {
  const std::vector<double> w = {1.5, 2, 3};
  const std::vector<std::size_t> seq = {2, 0, 1};
  const auto s = decode_energy(seq, make_graph(w, {}));
  EXPECT_EQ(s.independent_set, seq);
  EXPECT_EQ(s.energy, -6.5);
}

TEST(Decode, RejectsNonPermutations) {
  const std::vector<std::size_t> dup = {0, 0, 1};
  const std::vector<std::size_t> shortseq = {0, 1};
  const std::vector<std::size_t> out = {0, 1, 3};
  EXPECT_THROW(decode_energy(dup, triangle()), InputError);
  EXPECT_THROW(decode_energy(shortseq, triangle()), InputError);
  EXPECT_THROW(decode_energy(out, triangle()), InputError);
}

TEST(Decode, IndependentAndMaximal) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = fixtures::random_graph(rng, 1 + trial, 0.1);
    std::vector<std::size_t> seq(g.size());
    std::iota(seq.begin(), seq.end(), 0);
    std::shuffle(seq.begin(), seq.end(), rng);
    const auto s = decode_energy(seq, g);
    EXPECT_TRUE(is_independent(g, s.independent_set));
    std::vector<char> in(g.size(), 0);
    for (std::size_t v : s.independent_set) in[v] = 1;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (in[v]) continue;
      bool blocked = false;
      for (VertexIndex u : g.neighbors(v)) blocked = blocked || in[u];
      EXPECT_TRUE(blocked);
    }
  }
}

TEST(Neighbor, DegenerateAndForcedSwaps) {
  Rng rng(1);
  const std::vector<std::size_t> seq = {4, 2, 0, 3, 1};
  const std::vector<std::size_t> one = {0};
  EXPECT_EQ(neighbor(seq, one, rng), seq);
  const std::vector<std::size_t> two = {4, 3};
  EXPECT_EQ(neighbor(seq, two, rng), (std::vector<std::size_t>{3, 2, 0, 4, 1}));
}

TEST(Neighbor, ReproducibleUnderSeed) {
  const std::vector<std::size_t> seq = {0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<std::size_t> set = {1, 3, 5, 7};
  Rng a(99), b(99);
  for (int n = 0; n < 50; ++n) EXPECT_EQ(neighbor(seq, set, a), neighbor(seq, set, b));
}

TEST(Neighbor, SwapsTwoMembersOnly) {
  Rng rng(7);
  const std::vector<std::size_t> seq = {5, 0, 1, 2, 3, 4};
  const std::vector<std::size_t> set = {5, 2, 4};
  for (int n = 0; n < 100; ++n) {
    const auto out = neighbor(seq, set, rng);
    std::vector<std::size_t> changed;
    for (std::size_t p = 0; p < seq.size(); ++p)
      if (out[p] != seq[p]) changed.push_back(seq[p]);
    ASSERT_EQ(changed.size(), 2u);
    for (std::size_t v : changed) EXPECT_NE(std::find(set.begin(), set.end(), v), set.end());
  }
}

TEST(Select, ImprovementAlwaysAccepted) {
  Rng rng(5);
  const auto old_s = with_energy(-10.0);
  const auto better = with_energy(-11.0);
  const auto equal = with_energy(-10.0);
  for (int n = 0; n < 1000; ++n) {
    EXPECT_EQ(&select(old_s, better, 0.5, rng), &better);
    EXPECT_EQ(&select(old_s, equal, 0.5, rng), &equal);
  }
  EXPECT_EQ(acceptance_probability(-10.0, -11.0, 1e-6), 1.0);
}

TEST(Select, HugeUphillNeverAccepted) {
  Rng rng(6);
  const double t = 0.3;
  const auto old_s = with_energy(-10.0);
  const auto worse = with_energy(-10.0 + 1000.0 * t);
  for (int n = 0; n < 10000; ++n) EXPECT_EQ(&select(old_s, worse, t, rng), &old_s);
}

TEST(Select, FrequencyMatchesProbability) {
  Rng rng(8);
  const double t = 2.0;
  for (double delta : {0.5, std::log(2.0) * t, 3.0}) {
    const double p = std::exp(-delta / t);
    EXPECT_DOUBLE_EQ(acceptance_probability(0.0, delta, t), p);
    const int n = 40000;
    int hits = 0;
    for (int k = 0; k < n; ++k) hits += accept(0.0, delta, t, rng);
    EXPECT_NEAR(static_cast<double>(hits) / n, p, 4.0 * std::sqrt(p * (1 - p) / n)) << delta;
  }
}

TEST(Select, RejectsNonPositiveTemperature) {
  Rng rng(1);
  const auto a = with_energy(0), b = with_energy(1);
  EXPECT_THROW(select(a, b, 0.0, rng), InputError);
}

TEST(Schedule, DefaultsAndValidation) {
  const auto s = resolve_schedule({}, -250.0);
  EXPECT_DOUBLE_EQ(s.t_initial, 25.0);
  EXPECT_DOUBLE_EQ(s.t_min, 25.0 * 1e-4);
  EXPECT_EQ(s.alpha, 0.999);
  EXPECT_EQ(resolve_schedule({}, -3.0).t_initial, 1.0);
  SaParams bad;
  bad.alpha = 1.0;
  EXPECT_THROW(resolve_schedule(bad, -1.0), InputError);
  bad.alpha = 0.9;
  bad.t_initial = 1.0;
  bad.t_min = 2.0;
  EXPECT_THROW(resolve_schedule(bad, -1.0), InputError);
}

TEST(Anneal, EdgelessGraph) {
  const std::vector<double> w = {1, 2, 3, 4};
  const auto s = anneal(make_graph(w, {}), {});
  EXPECT_EQ(s.value, 10.0);
  EXPECT_EQ(s.chosen.size(), 4u);
}

TEST(Anneal, EmptyGraph) {
  const auto r = anneal_report(make_graph({}, {}), {});
  EXPECT_EQ(r.solution.value, 0.0);
  EXPECT_TRUE(r.solution.chosen.empty());
  EXPECT_EQ(r.iterations, 0u);
}

TEST(Anneal, IterationCountFollowsSchedule) {
  SaParams p;
  p.t_initial = 1.0;
  p.t_min = 0.5;
  p.alpha = 0.9;
  const auto r = anneal_report(triangle(), p);
  // 1, 0.9, ..., 0.9^6 = 0.531 are above 0.5.
  EXPECT_EQ(r.iterations, 7u);
}

TEST(Anneal, DominatesGreedyAndIsDeterministic) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = fixtures::graph_of(fixtures::random_small(seed, 8, 16, 8));
    SaParams p;
    p.seed = seed;
    const auto a = anneal_report(g, p);
    const auto b = anneal_report(g, p);
    EXPECT_GE(a.solution.value, a.initial_value);
    EXPECT_EQ(a.solution.chosen, b.solution.chosen);
    EXPECT_EQ(a.solution.value, b.solution.value);
    EXPECT_TRUE(is_independent(g, a.solution.chosen));
    EXPECT_NEAR(set_weight(g, a.solution.chosen), a.solution.value, 1e-9);
  }
}

TEST(Anneal, MonitorSeesBestEnergyNonincreasing) {
  const auto g = fixtures::graph_of(fixtures::random_small(4, 6, 12, 8));
  double last = 0.0;
  std::size_t calls = 0;
  const auto r = anneal_report(g, {}, [&](const AnnealStep& s) {
    EXPECT_LE(s.best_energy, last);
    EXPECT_LE(s.best_energy, s.current_energy);
    last = s.best_energy;
    ++calls;
  });
  EXPECT_EQ(calls, r.iterations);
}

TEST(Anneal, RestartsNeverWorse) {
  const auto g = fixtures::graph_of(fixtures::random_small(9, 8, 16, 10));
  SaParams p;
  p.seed = 3;
  const auto single = anneal(g, p);
  const auto many = anneal_restarts(g, p, 5);
  EXPECT_GE(many.solution.value, single.value);
  EXPECT_EQ(restart_seed(3, 0), 3u);
  EXPECT_NE(restart_seed(3, 1), restart_seed(3, 2));
}
