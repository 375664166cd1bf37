// Command-line front end: gen, solve, online, bench.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rideauction/rideauction.hpp"

using namespace rideauction;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;

struct SolverFlags {
  std::string solver = "exact";
  std::optional<double> t0;
  std::optional<double> tmin;
  double alpha = 0.999;
  std::uint64_t seed = 0;
  std::size_t restarts = 1;
  std::uint64_t node_budget = BranchAndBoundOptions{}.node_budget;

  void attach(CLI::App* app) {
    app->add_option("--solver", solver, "exact or sa")->check(CLI::IsMember({"exact", "sa"}));
    app->add_option("--t0", t0, "initial temperature (default max(1, 0.1 |greedy energy|))");
    app->add_option("--tmin", tmin, "final temperature (default 1e-4 t0)");
    app->add_option("--alpha", alpha, "cooling factor in (0, 1)");
    app->add_option("--seed", seed, "annealing seed");
    app->add_option("--restarts", restarts, "independent annealing runs");
    app->add_option("--node-budget", node_budget, "branch-and-bound node limit");
  }

  SolveOptions options() const {
    SolveOptions o;
    o.solver = solver == "sa" ? SolverKind::sa : SolverKind::exact;
    o.sa.t_initial = t0;
    o.sa.t_min = tmin;
    o.sa.alpha = alpha;
    o.sa.seed = seed;
    o.restarts = restarts;
    o.exact.node_budget = node_budget;
    // Fail early on bad schedules rather than after graph construction.
    if (o.solver == SolverKind::sa) resolve_schedule(o.sa, -1.0);
    return o;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void emit_json(const json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    open_out(path) << doc.dump(2) << '\n';
  }
}

json trip_json(const Instance& inst, const TripCombination& c) {
  return {{"vehicle", inst.vehicles[c.vehicle].id},
          {"first", inst.requests[c.first].id},
          {"second", inst.requests[c.second].id},
          {"weight", c.weight},
          {"drop_order", c.drop_order == DropOrder::first_rider_first ? "first-rider-first" : "second-rider-first"},
          {"t_first", c.times.t_first},
          {"t_second", c.times.t_second},
          {"d_vehicle", c.times.d_vehicle}};
}

json batch_json(const Instance& inst, const BatchResult& res, const SolveOptions& opts) {
  json trips = json::array();
  for (const auto& c : res.allocation) trips.push_back(trip_json(inst, c));
  json deferred = json::array();
  for (std::size_t r : res.deferred_riders) deferred.push_back(inst.requests[r].id);
  json idle = json::array();
  for (std::size_t k : res.idle_vehicles) idle.push_back(inst.vehicles[k].id);
  json doc = {{"solver", to_string(res.solver)},
              {"optimal", res.optimal},
              {"welfare", res.welfare},
              {"served_riders", res.served_riders},
              {"serving_vehicles", res.serving_vehicles},
              {"tsi", res.tsi ? json(*res.tsi) : json(nullptr)},
              {"allocation", std::move(trips)},
              {"deferred_riders", std::move(deferred)},
              {"idle_vehicles", std::move(idle)},
              {"graph", {{"vertices", res.graph_vertices}, {"edges", res.graph_edges}}},
              {"solver_nodes", res.solver_nodes},
              {"runtime",
               {{"prematch", res.runtime.prematch},
                {"graph_build", res.runtime.graph_build},
                {"solve", res.runtime.solve}}},
              {"totals",
               {{"fares", res.settlement.total_fares},
                {"vehicle_cost", res.settlement.total_cost},
                {"margin", res.settlement.total_margin}}}};
  if (res.solver == SolverKind::sa) {
    doc["sa"] = {{"rng", kRngAlgorithm},
                 {"seed", opts.sa.seed},
                 {"restarts", opts.restarts},
                 {"alpha", opts.sa.alpha},
                 {"t0", opts.sa.t_initial ? json(*opts.sa.t_initial) : json("default")},
                 {"tmin", opts.sa.t_min ? json(*opts.sa.t_min) : json("default")}};
  } else {
    doc["node_budget"] = opts.exact.node_budget;
  }
  return doc;
}

GridNetwork parse_grid(const std::string& spec) {
  const auto x = spec.find('x');
  std::size_t rows = 0, cols = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(spec);
    rows = std::stoul(spec.substr(0, x));
    cols = std::stoul(spec.substr(x + 1));
  } catch (const std::exception&) {
    throw InputError("expected ROWSxCOLS", "--grid");
  }
  if (rows == 0 || cols == 0) throw InputError("grid dimensions must be positive", "--grid");
  return {rows, cols, 1.0};
}

struct GenFlags {
  std::uint64_t seed = 1;
  std::size_t riders = 10;
  std::size_t vehicles = 5;
  std::string grid = "20x20";
  double edge_minutes = 1.0;
  double min_trip = 5.0;
  double vot_sigma = 0.02;
  std::string sweep_file;
  std::size_t seeds = 1;
  std::string out;

  GeneratorConfig config() const {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.n_requests = riders;
    cfg.n_vehicles = vehicles;
    GridNetwork g = parse_grid(grid);
    g.edge_minutes = edge_minutes;
    cfg.network = g;
    cfg.min_trip_minutes = min_trip;
    cfg.vot_sigma = vot_sigma;
    return cfg;
  }
};

std::vector<SweepPoint> read_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sweep file " + path);
  return parse_sweep_csv(in);
}

int run_gen(const GenFlags& f) {
  const GeneratorConfig cfg = f.config();
  if (f.sweep_file.empty()) {
    emit_json(instance_to_json(generate(cfg)), f.out);
    return 0;
  }
  if (f.out.empty()) throw InputError("a sweep needs an output directory", "--out");
  fs::create_directories(f.out);
  for (const auto& item : sweep(cfg, read_sweep(f.sweep_file), f.seeds)) {
    const std::string name = "instance_k" + std::to_string(item.point.vehicles) + "_r" +
                             std::to_string(item.point.riders) + "_s" + std::to_string(item.seed) + ".json";
    save_instance_file(item.instance, (fs::path(f.out) / name).string());
  }
  return 0;
}

struct SolveFlags {
  std::string instance;
  std::string out;
  std::string fares;
  std::string margins;
  std::string graph_dump;
  std::string prematch_dump;
  SolverFlags solver;
};

int run_solve(const SolveFlags& f) {
  const Instance inst = load_instance_file(f.instance);
  const SolveOptions opts = f.solver.options();
  if (!f.prematch_dump.empty() || !f.graph_dump.empty()) {
    const PrematchResult pm = prematch(inst);
    if (!f.prematch_dump.empty()) {
      auto os = open_out(f.prematch_dump);
      write_prematch_csv(os, inst, pm);
    }
    if (!f.graph_dump.empty()) {
      auto os = open_out(f.graph_dump);
      write_graph_dump(os, inst, build_conflict_graph(inst, pm, reservation_prices(inst)));
    }
  }
  const BatchResult res = run_batch(inst, opts);
  emit_json(batch_json(inst, res, opts), f.out);
  if (!f.fares.empty()) {
    auto os = open_out(f.fares);
    write_fare_csv(os, inst, res.settlement);
  }
  if (!f.margins.empty()) {
    auto os = open_out(f.margins);
    write_margin_csv(os, inst, res.settlement);
  }
  if (opts.solver == SolverKind::exact && !res.optimal) {
    std::cerr << "node budget exhausted; reported allocation is the best found, not proven optimal\n";
    return kExitBudget;
  }
  return 0;
}

struct OnlineFlags {
  std::string instance;
  double delta = 30.0;
  std::size_t rounds = 10;
  std::optional<std::size_t> arrival_rounds;
  std::string out;
  SolverFlags solver;
};

int run_online_cmd(const OnlineFlags& f) {
  const Instance inst = load_instance_file(f.instance);
  const SolveOptions opts = f.solver.options();
  if (f.rounds == 0) throw InputError("must be positive", "--rounds");
  const auto stream = split_arrivals(inst, f.arrival_rounds.value_or(f.rounds));
  const auto rounds = run_online(inst.oracle, inst.config, stream, f.delta, f.rounds, opts);
  json out = json::array();
  bool exhausted = false;
  std::size_t served = 0;
  double welfare = 0.0;
  for (const auto& r : rounds) {
    json doc = batch_json(r.batch, r.result, opts);
    doc["round"] = r.round;
    doc["clock_minutes"] = r.clock_minutes;
    doc["offered_requests"] = r.batch.requests.size();
    doc["offered_vehicles"] = r.batch.vehicles.size();
    served += r.result.served_riders;
    welfare += r.result.welfare;
    exhausted = exhausted || (opts.solver == SolverKind::exact && !r.result.optimal);
    out.push_back(std::move(doc));
  }
  emit_json({{"delta_seconds", f.delta},
             {"rounds", std::move(out)},
             {"summary", {{"requests", inst.requests.size()}, {"served", served}, {"welfare", welfare}}},
             {"vehicle_release", "after ceil(d_k) minutes at the last drop-off"}},
            f.out);
  if (exhausted) {
    std::cerr << "node budget exhausted in at least one round\n";
    return kExitBudget;
  }
  return 0;
}

struct BenchFlags {
  std::string sweep_file;
  bool table = false;
  std::optional<std::size_t> fci_riders;
  std::vector<double> fci_grid_values = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  std::size_t seeds = 1;
  std::uint64_t base_seed = 1;
  std::string grid = "20x20";
  std::string out = "bench_out";
  std::vector<std::string> solvers = {"exact", "sa"};
  bool no_timing = false;
  SolverFlags solver;
};

int run_bench(const BenchFlags& f) {
  std::vector<SweepPoint> points;
  if (!f.sweep_file.empty()) points = read_sweep(f.sweep_file);
  if (f.table) {
    const auto rows = comparison_table_rows();
    points.insert(points.end(), rows.begin(), rows.end());
  }
  if (f.fci_riders) {
    const auto rows = fci_grid(*f.fci_riders, f.fci_grid_values);
    points.insert(points.end(), rows.begin(), rows.end());
  }
  if (points.empty()) throw InputError("give --sweep, --table or --fci-riders", "--sweep");
  if (f.seeds == 0) throw InputError("must be positive", "--seeds");

  GeneratorConfig base;
  base.seed = f.base_seed;
  base.network = parse_grid(f.grid);
  const SolveOptions so = f.solver.options();
  BenchmarkOptions opts;
  opts.run_exact = std::find(f.solvers.begin(), f.solvers.end(), "exact") != f.solvers.end();
  opts.run_sa = std::find(f.solvers.begin(), f.solvers.end(), "sa") != f.solvers.end();
  opts.sa = so.sa;
  opts.restarts = so.restarts;
  opts.exact = so.exact;
  if (!opts.run_exact && !opts.run_sa) throw InputError("no solver selected", "--solvers");

  const auto rows = benchmark(sweep(base, points, f.seeds), opts);
  fs::create_directories(f.out);
  {
    auto os = open_out((fs::path(f.out) / "bench.csv").string());
    write_benchmark_csv(os, rows, !f.no_timing);
  }
  {
    auto os = open_out((fs::path(f.out) / "tsi_fci.csv").string());
    write_tsi_csv(os, summarize_tsi(rows));
  }
  std::cout << "wrote " << rows.size() << " rows to " << (fs::path(f.out) / "bench.csv").string() << '\n';
  const bool exhausted =
      opts.run_exact && std::any_of(rows.begin(), rows.end(), [](const BenchmarkRow& r) { return !r.exact_optimal; });
  if (exhausted) {
    std::cerr << "node budget exhausted on at least one instance; error_pct left empty there\n";
    return kExitBudget;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pooled ride-sharing auctions: generate, solve, simulate and benchmark"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic instance (or a sweep of them)");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--riders", gen.riders);
  gen_cmd->add_option("--vehicles", gen.vehicles);
  gen_cmd->add_option("--grid", gen.grid, "ROWSxCOLS grid network");
  gen_cmd->add_option("--edge-minutes", gen.edge_minutes);
  gen_cmd->add_option("--min-trip", gen.min_trip, "minimum private trip time, minutes");
  gen_cmd->add_option("--vot-sigma", gen.vot_sigma, "lognormal shape of the value of time");
  gen_cmd->add_option("--sweep-file", gen.sweep_file, "CSV of vehicles,riders points");
  gen_cmd->add_option("--seeds", gen.seeds, "instances per sweep point");
  gen_cmd->add_option("--out", gen.out, "output file, or directory for a sweep");

  SolveFlags solve;
  auto* solve_cmd = app.add_subcommand("solve", "run one sealed-bid auction batch");
  solve_cmd->add_option("--instance", solve.instance)->required();
  solve_cmd->add_option("--out", solve.out, "result JSON (default stdout)");
  solve_cmd->add_option("--fares", solve.fares, "fare report CSV");
  solve_cmd->add_option("--margins", solve.margins, "margin summary CSV");
  solve_cmd->add_option("--graph-dump", solve.graph_dump, "conflict graph text dump");
  solve_cmd->add_option("--prematch-dump", solve.prematch_dump, "shareability links CSV");
  solve.solver.attach(solve_cmd);

  OnlineFlags online;
  auto* online_cmd = app.add_subcommand("online", "repeated batches with deferral");
  online_cmd->add_option("--instance", online.instance)->required();
  online_cmd->add_option("--delta", online.delta, "batch interval, seconds");
  online_cmd->add_option("--rounds", online.rounds);
  online_cmd->add_option("--arrival-rounds", online.arrival_rounds, "rounds over which requests arrive");
  online_cmd->add_option("--out", online.out, "result JSON (default stdout)");
  online.solver.attach(online_cmd);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "exact-versus-annealing benchmark and coverage report");
  bench_cmd->add_option("--sweep", bench.sweep_file, "CSV of vehicles,riders points");
  bench_cmd->add_flag("--table", bench.table, "include the standard comparison rows");
  bench_cmd->add_option("--fci-riders", bench.fci_riders, "add a coverage grid for this rider count");
  bench_cmd->add_option("--fci-grid", bench.fci_grid_values, "coverage ratios for --fci-riders");
  bench_cmd->add_option("--seeds", bench.seeds);
  bench_cmd->add_option("--base-seed", bench.base_seed);
  bench_cmd->add_option("--grid", bench.grid);
  bench_cmd->add_option("--out", bench.out, "output directory");
  bench_cmd->add_option("--solvers", bench.solvers)->delimiter(',')->check(CLI::IsMember({"exact", "sa"}));
  bench_cmd->add_flag("--no-timing", bench.no_timing, "leave runtime columns empty");
  bench.solver.attach(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve);
    if (*online_cmd) return run_online_cmd(online);
    if (*bench_cmd) return run_bench(bench);
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const GenerationError& e) {
    std::cerr << "generation failed: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
