#pragma once

#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rideauction/conflict_graph.hpp"
#include "rideauction/instance.hpp"
#include "rideauction/instance_gen.hpp"
#include "rideauction/mwis_exact.hpp"
#include "rideauction/mwis_sa.hpp"
#include "rideauction/prematch.hpp"
#include "rideauction/pricing.hpp"

namespace rideauction {

enum class SolverKind { exact, sa };

inline const char* to_string(SolverKind s) { return s == SolverKind::exact ? "exact" : "sa"; }

struct SolveOptions {
  SolverKind solver = SolverKind::exact;
  SaParams sa;
  std::size_t restarts = 1;
  BranchAndBoundOptions exact;
};

struct RuntimeBreakdown {
  double prematch = 0.0;
  double graph_build = 0.0;
  double solve = 0.0;
};

struct BatchResult {
  std::vector<TripCombination> allocation;  // winning trips, adjacency dropped
  double welfare = 0.0;
  std::size_t served_riders = 0;
  std::size_t serving_vehicles = 0;
  std::vector<std::size_t> deferred_riders;   // request positions
  std::vector<std::size_t> idle_vehicles;     // vehicle positions
  std::optional<double> tsi;                  // welfare per serving vehicle
  RuntimeBreakdown runtime;
  SolverKind solver = SolverKind::exact;
  bool optimal = false;
  std::uint64_t solver_nodes = 0;
  std::size_t graph_vertices = 0;
  std::size_t graph_edges = 0;
  SettlementReport settlement;
};

inline BatchResult run_batch(const Instance& inst, const SolveOptions& opts = {}) {
  BatchResult out;
  out.solver = opts.solver;

  auto t0 = detail::Clock::now();
  const PrematchResult pm = prematch(inst);
  out.runtime.prematch = detail::seconds_since(t0);

  t0 = detail::Clock::now();
  const std::vector<double> reservation = reservation_prices(inst);
  const ConflictGraph graph = build_conflict_graph(inst, pm, reservation);
  out.runtime.graph_build = detail::seconds_since(t0);
  out.graph_vertices = graph.size();
  out.graph_edges = graph.edge_count;

  t0 = detail::Clock::now();
  MwisSolution sol;
  if (opts.solver == SolverKind::exact) {
    sol = branch_and_bound_mwis(graph, opts.exact);
  } else {
    sol = anneal_restarts(graph, opts.sa, opts.restarts).solution;
  }
  out.runtime.solve = detail::seconds_since(t0);
  out.optimal = sol.optimal;
  out.solver_nodes = sol.nodes_explored;

  std::vector<char> rider_served(inst.requests.size(), 0);
  std::vector<char> vehicle_busy(inst.vehicles.size(), 0);
  for (std::size_t v : sol.chosen) {
    TripCombination c = graph.vertices[v];
    c.neighbors.clear();
    rider_served[c.first] = rider_served[c.second] = 1;
    vehicle_busy[c.vehicle] = 1;
    out.welfare += c.weight;
    out.allocation.push_back(std::move(c));
  }
  out.served_riders = 2 * out.allocation.size();
  out.serving_vehicles = out.allocation.size();
  for (std::size_t r = 0; r < inst.requests.size(); ++r)
    if (!rider_served[r]) out.deferred_riders.push_back(r);
  for (std::size_t k = 0; k < inst.vehicles.size(); ++k)
    if (!vehicle_busy[k]) out.idle_vehicles.push_back(k);
  if (out.serving_vehicles > 0) out.tsi = out.welfare / static_cast<double>(out.serving_vehicles);
  out.settlement = settle(out.allocation, inst);
  return out;
}

// Arrivals of one batching interval.
struct RoundArrivals {
  std::vector<RideRequest> requests;
  std::vector<Vehicle> vehicles;
};

struct OnlineRound {
  std::size_t round = 0;
  double clock_minutes = 0.0;
  Instance batch;  // the instance auctioned in this round
  BatchResult result;
};

// Quasi-online loop: every `delta_seconds` the pool of new plus deferred
// requests is auctioned against the available fleet. A committed vehicle
// rejoins ceil(d_k) minutes after its commitment, at its last drop-off.
inline std::vector<OnlineRound> run_online(const TravelTimeOracle& oracle, const PlatformConfig& config,
                                           std::span<const RoundArrivals> stream, double delta_seconds,
                                           std::size_t rounds, const SolveOptions& opts = {}) {
  if (!(delta_seconds > 0.0)) throw InputError("batch interval must be positive", "delta");
  struct Busy {
    Vehicle vehicle;
    double release_minutes;
  };
  std::vector<RideRequest> pending;
  std::vector<Vehicle> available;
  std::vector<Busy> busy;
  std::vector<OnlineRound> out;

  for (std::size_t r = 0; r < rounds; ++r) {
    const double clock = static_cast<double>(r) * delta_seconds / 60.0;
    if (r < stream.size()) {
      for (RideRequest req : stream[r].requests) {
        req.private_time = oracle(req.origin, req.destination);
        pending.push_back(req);
      }
      available.insert(available.end(), stream[r].vehicles.begin(), stream[r].vehicles.end());
    }
    for (auto it = busy.begin(); it != busy.end();) {
      if (it->release_minutes <= clock) {
        available.push_back(it->vehicle);
        it = busy.erase(it);
      } else {
        ++it;
      }
    }

    OnlineRound round;
    round.round = r;
    round.clock_minutes = clock;
    round.batch.oracle = oracle;
    round.batch.config = config;
    round.batch.config.batch_interval = delta_seconds;
    round.batch.requests = pending;
    round.batch.vehicles = available;
    validate(round.batch);
    round.result = run_batch(round.batch, opts);

    std::vector<RideRequest> still_pending;
    for (std::size_t idx : round.result.deferred_riders) still_pending.push_back(pending[idx]);
    std::vector<Vehicle> still_available;
    for (std::size_t idx : round.result.idle_vehicles) still_available.push_back(available[idx]);
    for (const auto& trip : round.result.allocation) {
      Vehicle v = available[trip.vehicle];
      const std::size_t last = trip.drop_order == DropOrder::first_rider_first ? trip.second : trip.first;
      v.position = pending[last].destination;
      busy.push_back({v, clock + std::ceil(trip.times.d_vehicle)});
    }
    pending = std::move(still_pending);
    available = std::move(still_available);
    out.push_back(std::move(round));
  }
  return out;
}

// Splits an instance's requests into `rounds` contiguous arrival groups; the
// whole fleet is present from the first round.
inline std::vector<RoundArrivals> split_arrivals(const Instance& inst, std::size_t rounds) {
  std::vector<RoundArrivals> out(std::max<std::size_t>(1, rounds));
  const std::size_t n = inst.requests.size();
  for (std::size_t r = 0; r < n; ++r) out[r * out.size() / n].requests.push_back(inst.requests[r]);
  out[0].vehicles = inst.vehicles;
  return out;
}

struct BenchmarkRow {
  SweepPoint point;
  std::uint64_t seed = 0;
  double fci = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double build_runtime = 0.0;
  std::optional<double> exact_value;
  std::optional<double> exact_runtime;
  bool exact_optimal = false;
  std::optional<double> sa_value;
  std::optional<double> sa_runtime;
  std::optional<double> error_pct;
  std::optional<double> tsi;  // from the exact optimum when proven, else SA
  std::size_t serving_vehicles = 0;
};

struct BenchmarkOptions {
  bool run_exact = true;
  bool run_sa = true;
  SaParams sa;
  std::size_t restarts = 1;
  BranchAndBoundOptions exact;
};

inline std::vector<BenchmarkRow> benchmark(const std::vector<SweepInstance>& batch, const BenchmarkOptions& opts) {
  std::vector<BenchmarkRow> rows;
  for (const auto& item : batch) {
    BenchmarkRow row;
    row.point = item.point;
    row.seed = item.seed;
    row.fci = item.fci;

    auto t0 = detail::Clock::now();
    const PrematchResult pm = prematch(item.instance);
    const std::vector<double> reservation = reservation_prices(item.instance);
    const ConflictGraph graph = build_conflict_graph(item.instance, pm, reservation);
    row.build_runtime = detail::seconds_since(t0);
    row.nodes = graph.size();
    row.edges = graph.edge_count;

    std::optional<MwisSolution> exact, approx;
    if (opts.run_exact) {
      exact = branch_and_bound_mwis(graph, opts.exact);
      row.exact_value = exact->value;
      row.exact_runtime = exact->runtime;
      row.exact_optimal = exact->optimal;
    }
    if (opts.run_sa) {
      SaParams p = opts.sa;
      p.seed = opts.sa.seed + item.seed;
      approx = anneal_restarts(graph, p, opts.restarts).solution;
      row.sa_value = approx->value;
      row.sa_runtime = approx->runtime;
    }
    if (exact && approx && exact->optimal && exact->value > 0.0)
      row.error_pct = 100.0 * (exact->value - approx->value) / exact->value;

    const MwisSolution* ref = exact && (exact->optimal || !approx) ? &*exact : (approx ? &*approx : nullptr);
    if (ref != nullptr) {
      row.serving_vehicles = ref->chosen.size();
      if (row.serving_vehicles > 0) row.tsi = ref->value / static_cast<double>(row.serving_vehicles);
    }
    rows.push_back(row);
  }
  return rows;
}

struct TsiSummaryRow {
  double fci = 0.0;
  std::size_t instances = 0;
  std::size_t with_tsi = 0;
  double mean_tsi = 0.0;
  double se_tsi = 0.0;  // standard error of the mean
  double mean_nodes = 0.0;
};

inline std::vector<TsiSummaryRow> summarize_tsi(const std::vector<BenchmarkRow>& rows) {
  struct Acc {
    std::vector<double> tsi;
    double nodes = 0.0;
    std::size_t count = 0;
  };
  std::map<long long, Acc> by_fci;  // keyed at 1e-4 resolution
  for (const auto& r : rows) {
    Acc& a = by_fci[std::llround(r.fci * 1e4)];
    ++a.count;
    a.nodes += static_cast<double>(r.nodes);
    if (r.tsi) a.tsi.push_back(*r.tsi);
  }
  std::vector<TsiSummaryRow> out;
  for (const auto& [key, a] : by_fci) {
    TsiSummaryRow s;
    s.fci = static_cast<double>(key) / 1e4;
    s.instances = a.count;
    s.with_tsi = a.tsi.size();
    s.mean_nodes = a.nodes / static_cast<double>(a.count);
    if (!a.tsi.empty()) {
      double sum = 0.0;
      for (double t : a.tsi) sum += t;
      s.mean_tsi = sum / static_cast<double>(a.tsi.size());
      if (a.tsi.size() > 1) {
        double ss = 0.0;
        for (double t : a.tsi) ss += (t - s.mean_tsi) * (t - s.mean_tsi);
        s.se_tsi = std::sqrt(ss / static_cast<double>(a.tsi.size() - 1)) / std::sqrt(static_cast<double>(a.tsi.size()));
      }
    }
    out.push_back(s);
  }
  return out;
}

namespace detail {

template <class T>
void optional_cell(std::ostream& os, const std::optional<T>& v) {
  if (v) os << *v;
}

}  // namespace detail

// Runtime columns are left empty when `timing` is false, which makes the
// output a pure function of the sweep and seeds.
inline void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows, bool timing = true) {
  os << "vehicles,riders,nodes,exact_value,exact_runtime,sa_value,sa_runtime,error_pct,"
        "seed,fci,edges,build_runtime,exact_optimal,tsi\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  for (const auto& r : rows) {
    os << std::defaultfloat << std::setprecision(10);
    os << r.point.vehicles << ',' << r.point.riders << ',' << r.nodes << ',';
    detail::optional_cell(os, r.exact_value);
    os << ',';
    if (timing) detail::optional_cell(os, r.exact_runtime);
    os << ',';
    detail::optional_cell(os, r.sa_value);
    os << ',';
    if (timing) detail::optional_cell(os, r.sa_runtime);
    os << ',';
    if (r.error_pct) os << std::fixed << std::setprecision(2) << *r.error_pct << std::defaultfloat << std::setprecision(10);
    os << ',' << r.seed << ',' << r.fci << ',' << r.edges << ',';
    if (timing) os << r.build_runtime;
    os << ',' << (r.exact_value ? (r.exact_optimal ? "1" : "0") : "") << ',';
    detail::optional_cell(os, r.tsi);
    os << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

inline void write_tsi_csv(std::ostream& os, const std::vector<TsiSummaryRow>& rows) {
  os << "fci,instances,with_tsi,mean_tsi,se_tsi,mean_nodes\n";
  const auto precision = os.precision(10);
  for (const auto& s : rows) {
    os << s.fci << ',' << s.instances << ',' << s.with_tsi << ',';
    if (s.with_tsi > 0) os << s.mean_tsi << ',' << s.se_tsi;
    else os << ',';
    os << ',' << s.mean_nodes << '\n';
  }
  os.precision(precision);
}

}  // namespace rideauction
