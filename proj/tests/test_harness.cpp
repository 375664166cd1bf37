#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "rideauction/harness.hpp"
#include "support.hpp"

using namespace rideauction;

TEST(RunBatch, NothingMatchable) {
  Instance inst = fixtures::fully_connected(2, 3);
  for (auto& v : inst.vehicles) v.position = Point{1e6, 0};
  const auto res = run_batch(inst);
  EXPECT_TRUE(res.allocation.empty());
  EXPECT_EQ(res.deferred_riders.size(), 3u);
  EXPECT_EQ(res.idle_vehicles.size(), 2u);
  EXPECT_FALSE(res.tsi.has_value());
  EXPECT_EQ(res.welfare, 0.0);
}

TEST(RunBatch, AccountingInvariants) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = fixtures::random_small(seed, 6, 14);
    for (SolverKind kind : {SolverKind::exact, SolverKind::sa}) {
      SolveOptions opts;
      opts.solver = kind;
      const auto res = run_batch(inst, opts);
      double sum = 0.0;
      std::set<std::size_t> riders, vehicles;
      for (const auto& c : res.allocation) {
        sum += c.weight;
        EXPECT_TRUE(riders.insert(c.first).second);
        EXPECT_TRUE(riders.insert(c.second).second);
        EXPECT_TRUE(vehicles.insert(c.vehicle).second);
      }
      EXPECT_NEAR(res.welfare, sum, 1e-9);
      EXPECT_EQ(res.served_riders + res.deferred_riders.size(), inst.requests.size());
      EXPECT_EQ(res.serving_vehicles + res.idle_vehicles.size(), inst.vehicles.size());
      if (res.serving_vehicles > 0) {
        EXPECT_NEAR(*res.tsi, res.welfare / res.serving_vehicles, 1e-12);
      }
      EXPECT_NEAR(res.settlement.total_margin, res.welfare, 1e-6);
      EXPECT_EQ(res.solver, kind);
    }
  }
}

// At 4 vehicles / 8 riders annealing often, but not always, reaches the
// optimum: the swap move never reorders vertices outside the current set, so
// some optima are unreachable from the greedy start. Bracketing is guaranteed.
TEST(RunBatch, SmallInstancesSolverBracketing) {
  SolveOptions sa;
  sa.solver = SolverKind::sa;
  int matches = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.n_vehicles = 4;
    cfg.n_requests = 8;
    const Instance inst = generate(cfg);
    const auto g = fixtures::graph_of(inst);
    SaParams p;
    const auto report = anneal_report(g, p);
    const double exact = run_batch(inst).welfare;
    const double approx = run_batch(inst, sa).welfare;
    EXPECT_EQ(approx, report.solution.value);
    EXPECT_LE(approx, exact + 1e-9);
    EXPECT_GE(approx, report.initial_value);
    matches += std::abs(exact - approx) <= 1e-9;
  }
  RecordProperty("optimum_matches_of_30", matches);
  EXPECT_GT(matches, 0);
}

TEST(Online, SingleRoundEqualsBatch) {
  const Instance inst = fixtures::random_small(3, 5, 10);
  const auto stream = split_arrivals(inst, 1);
  const auto rounds = run_online(inst.oracle, inst.config, stream, 30.0, 1);
  ASSERT_EQ(rounds.size(), 1u);
  const auto batch = run_batch(inst);
  EXPECT_EQ(rounds[0].result.welfare, batch.welfare);
  EXPECT_EQ(rounds[0].result.allocation.size(), batch.allocation.size());
}

TEST(Online, DeferredRiderServedNextRound) {
  const Instance base = fixtures::fully_connected(2, 4);
  std::vector<RoundArrivals> stream(2);
  stream[0].requests = {base.requests[0], base.requests[1], base.requests[2]};
  stream[0].vehicles = {base.vehicles[0]};
  stream[1].requests = {base.requests[3]};
  stream[1].vehicles = {base.vehicles[1]};
  const auto rounds = run_online(base.oracle, base.config, stream, 30.0, 2);
  ASSERT_EQ(rounds.size(), 2u);
  ASSERT_EQ(rounds[0].result.allocation.size(), 1u);
  ASSERT_EQ(rounds[0].result.deferred_riders.size(), 1u);
  const std::int64_t deferred = rounds[0].batch.requests[rounds[0].result.deferred_riders[0]].id;

  // The first vehicle is still on its trip, so only the new one is offered.
  ASSERT_EQ(rounds[1].batch.vehicles.size(), 1u);
  EXPECT_EQ(rounds[1].batch.vehicles[0].id, base.vehicles[1].id);
  ASSERT_EQ(rounds[1].result.allocation.size(), 1u);
  const auto& trip = rounds[1].result.allocation[0];
  std::set<std::int64_t> ids = {rounds[1].batch.requests[trip.first].id, rounds[1].batch.requests[trip.second].id};
  EXPECT_TRUE(ids.count(deferred));
  EXPECT_TRUE(ids.count(3));
}

TEST(Online, VehicleReturnsAfterTrip) {
  const Instance base = fixtures::fully_connected(1, 4);
  std::vector<RoundArrivals> stream(1);
  stream[0].requests = base.requests;
  stream[0].vehicles = base.vehicles;
  // Trips last 10 minutes; at 30 s per round the vehicle is back at round 20.
  const auto rounds = run_online(base.oracle, base.config, stream, 30.0, 21);
  EXPECT_EQ(rounds[0].result.allocation.size(), 1u);
  for (std::size_t r = 1; r < 20; ++r) EXPECT_TRUE(rounds[r].batch.vehicles.empty()) << r;
  ASSERT_EQ(rounds[20].batch.vehicles.size(), 1u);
  const auto& pos = std::get<Point>(rounds[20].batch.vehicles[0].position);
  EXPECT_EQ(pos.x, 1000.0);
  EXPECT_EQ(rounds[20].batch.requests.size(), 2u);
}

TEST(Online, ConservationAcrossRounds) {
  GeneratorConfig cfg;
  cfg.n_requests = 30;
  cfg.n_vehicles = 6;
  const Instance inst = generate(cfg);
  const auto rounds = run_online(inst.oracle, inst.config, split_arrivals(inst, 5), 30.0, 8);
  std::set<std::int64_t> served;
  std::size_t total = 0;
  for (const auto& r : rounds)
    for (const auto& c : r.result.allocation) {
      EXPECT_TRUE(served.insert(r.batch.requests[c.first].id).second);
      EXPECT_TRUE(served.insert(r.batch.requests[c.second].id).second);
      total += 2;
    }
  EXPECT_LE(total, inst.requests.size());
  EXPECT_THROW(run_online(inst.oracle, inst.config, split_arrivals(inst, 2), 0.0, 2), InputError);
}

TEST(Benchmark, RowsAndDeterminism) {
  GeneratorConfig base;
  base.seed = 5;
  const auto batch = sweep(base, {{4, 8}, {6, 12}}, 2);
  BenchmarkOptions opts;
  const auto rows = benchmark(batch, opts);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.exact_optimal);
    if (r.error_pct) {
      EXPECT_GE(*r.error_pct, -1e-9);
    }
    EXPECT_GE(*r.exact_value, *r.sa_value - 1e-9);
  }
  std::ostringstream a, b;
  write_benchmark_csv(a, rows, false);
  write_benchmark_csv(b, benchmark(batch, opts), false);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "vehicles,riders,nodes,exact_value,exact_runtime,sa_value,sa_runtime,error_pct,"
            "seed,fci,edges,build_runtime,exact_optimal,tsi");
}

TEST(Benchmark, FullyConnectedNodeCount) {
  std::vector<SweepInstance> batch = {{{3, 5}, 0, fleet_coverage_index(3, 5), fixtures::fully_connected(3, 5)}};
  BenchmarkOptions opts;
  opts.run_sa = false;
  const auto rows = benchmark(batch, opts);
  EXPECT_EQ(rows[0].nodes, 3u * 25u - 15u);
  EXPECT_FALSE(rows[0].sa_value.has_value());
  EXPECT_FALSE(rows[0].error_pct.has_value());
}

TEST(Benchmark, TsiSummary) {
  std::vector<BenchmarkRow> rows(4);
  rows[0].fci = 0.5, rows[0].tsi = 10.0, rows[0].nodes = 10;
  rows[1].fci = 0.5, rows[1].tsi = 14.0, rows[1].nodes = 20;
  rows[2].fci = 1.0, rows[2].tsi = 9.0, rows[2].nodes = 30;
  rows[3].fci = 2.0, rows[3].nodes = 40;
  const auto s = summarize_tsi(rows);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].instances, 2u);
  EXPECT_DOUBLE_EQ(s[0].mean_tsi, 12.0);
  EXPECT_DOUBLE_EQ(s[0].se_tsi, std::sqrt(8.0) / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(s[0].mean_nodes, 15.0);
  EXPECT_EQ(s[1].se_tsi, 0.0);
  EXPECT_EQ(s[2].with_tsi, 0u);
  std::ostringstream os;
  write_tsi_csv(os, s);
  EXPECT_EQ(os.str(), "fci,instances,with_tsi,mean_tsi,se_tsi,mean_nodes\n0.5,2,2,12,2,15\n1,1,1,9,0,30\n2,1,0,,,40\n");
}
