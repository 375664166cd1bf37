#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rideauction/instance.hpp"

namespace rideauction {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid road network: travel time between nodes is the shortest path over
// uniform edges, i.e. edge_minutes times the Manhattan distance.
struct GridNetwork {
  std::size_t rows = 20;
  std::size_t cols = 20;
  double edge_minutes = 1.0;
};

struct PlanarBox {
  double width_m = 5000.0;
  double height_m = 5000.0;
  double speed_m_per_min = 250.0;
  PlanarMetric metric = PlanarMetric::manhattan_grid;
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::variant<GridNetwork, PlanarBox> network = GridNetwork{};
  std::size_t n_requests = 10;
  std::size_t n_vehicles = 5;
  double min_trip_minutes = 5.0;
  double vot_mean = 17.69;   // money per hour, arithmetic mean
  double vot_sigma = 0.02;   // lognormal shape
  double cost_rate = 12.96;  // money per hour
  int capacity = 2;
  PlatformConfig platform;
  std::size_t max_attempts = 10'000;  // per request
};

// Location parameter giving a lognormal with arithmetic mean `mean`.
inline double lognormal_location(double mean, double sigma) { return std::log(mean) - sigma * sigma / 2.0; }

inline TravelTimeOracle grid_oracle(const GridNetwork& net) {
  const std::size_t n = net.rows * net.cols;
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto ra = static_cast<double>(a / net.cols), ca = static_cast<double>(a % net.cols);
      const auto rb = static_cast<double>(b / net.cols), cb = static_cast<double>(b % net.cols);
      m[a][b] = net.edge_minutes * (std::abs(ra - rb) + std::abs(ca - cb));
    }
  return TravelTimeOracle::matrix(std::move(m));
}

inline Instance generate(const GeneratorConfig& cfg) {
  if (cfg.n_requests == 0 || cfg.n_vehicles == 0) throw InputError("counts must be positive");
  if (cfg.min_trip_minutes < 0.0) throw InputError("must be >= 0", "min_trip_minutes");
  if (cfg.vot_sigma < 0.0) throw InputError("must be >= 0", "vot_sigma");
  if (!(cfg.vot_mean > 0.0)) throw InputError("must be > 0", "vot_mean");

  std::mt19937_64 rng(cfg.seed);
  Instance inst;
  inst.config = cfg.platform;

  std::function<Location()> sample;
  if (const auto* grid = std::get_if<GridNetwork>(&cfg.network)) {
    if (grid->rows == 0 || grid->cols == 0 || !(grid->edge_minutes > 0.0)) throw InputError("invalid grid", "network");
    inst.oracle = grid_oracle(*grid);
    const std::size_t nodes = grid->rows * grid->cols;
    sample = [&rng, nodes] { return Location{NodeId{std::uniform_int_distribution<std::size_t>(0, nodes - 1)(rng)}}; };
  } else {
    const auto& box = std::get<PlanarBox>(cfg.network);
    inst.oracle = TravelTimeOracle::planar(box.speed_m_per_min, box.metric);
    sample = [&rng, box] {
      const double x = std::uniform_real_distribution<double>(0.0, box.width_m)(rng);
      const double y = std::uniform_real_distribution<double>(0.0, box.height_m)(rng);
      return Location{Point{x, y}};
    };
  }

  std::lognormal_distribution<double> vot(lognormal_location(cfg.vot_mean / 60.0, cfg.vot_sigma), cfg.vot_sigma);
  for (std::size_t n = 0; n < cfg.n_requests; ++n) {
    RideRequest r;
    r.id = static_cast<std::int64_t>(n);
    std::size_t attempts = 0;
    do {
      if (++attempts > cfg.max_attempts)
        throw GenerationError("no trip longer than " + std::to_string(cfg.min_trip_minutes) + " minutes after " +
                              std::to_string(cfg.max_attempts) + " attempts; network too small");
      r.origin = sample();
      r.destination = sample();
      r.private_time = inst.oracle(r.origin, r.destination);
    } while (!(r.private_time > cfg.min_trip_minutes));
    r.value_of_time = cfg.vot_sigma == 0.0 ? cfg.vot_mean / 60.0 : vot(rng);
    inst.requests.push_back(r);
  }
  for (std::size_t n = 0; n < cfg.n_vehicles; ++n) {
    Vehicle v;
    v.id = static_cast<std::int64_t>(n);
    v.position = sample();
    v.cost_rate = cfg.cost_rate / 60.0;
    v.capacity = cfg.capacity;
    inst.vehicles.push_back(v);
  }
  validate(inst);
  return inst;
}

// Fleet coverage: available vehicles over vehicles needed to carry every
// request two at a time.
inline double fleet_coverage_index(std::size_t n_vehicles, std::size_t n_requests) {
  return static_cast<double>(n_vehicles) / static_cast<double>((n_requests + 1) / 2);
}

struct SweepPoint {
  std::size_t vehicles = 0;
  std::size_t riders = 0;
  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepInstance {
  SweepPoint point;
  std::uint64_t seed = 0;
  double fci = 0.0;
  Instance instance;
};

// Generates one instance per (point, seed). Seeds are base.seed + s.
inline std::vector<SweepInstance> sweep(const GeneratorConfig& base, const std::vector<SweepPoint>& points,
                                        std::size_t seeds = 1) {
  std::vector<SweepInstance> out;
  for (const auto& p : points)
    for (std::size_t s = 0; s < seeds; ++s) {
      GeneratorConfig cfg = base;
      cfg.n_vehicles = p.vehicles;
      cfg.n_requests = p.riders;
      cfg.seed = base.seed + s;
      out.push_back({p, cfg.seed, fleet_coverage_index(p.vehicles, p.riders), generate(cfg)});
    }
  return out;
}

// Fleet sizes hitting each coverage ratio for a fixed number of riders.
inline std::vector<SweepPoint> fci_grid(std::size_t riders, const std::vector<double>& ratios) {
  std::vector<SweepPoint> out;
  const double needed = static_cast<double>((riders + 1) / 2);
  for (double f : ratios) {
    const auto k = static_cast<std::size_t>(std::llround(f * needed));
    if (k == 0) throw InputError("coverage ratio too small for rider count");
    out.push_back({k, riders});
  }
  return out;
}

// (vehicles, riders) rows of the published SA-versus-exact comparison.
inline std::vector<SweepPoint> comparison_table_rows() {
  return {{4, 8},   {8, 8},   {5, 10},  {10, 10}, {5, 12},  {6, 12},  {12, 12}, {6, 14},  {7, 14},  {7, 15},
          {8, 16},  {7, 17},  {9, 18},  {8, 20},  {10, 20}, {11, 22}, {12, 24}, {10, 25}, {14, 28}, {15, 30},
          {15, 20}, {20, 20}, {12, 25}, {15, 25}, {16, 25}, {17, 25}, {14, 30}, {13, 26}, {16, 32}, {17, 34}};
}

// Sweep file: CSV with header `vehicles,riders`, one point per line.
inline std::vector<SweepPoint> parse_sweep_csv(std::istream& in) {
  std::vector<SweepPoint> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.find("vehicles") != std::string::npos) continue;
    std::istringstream row(line);
    long long k = 0;
    long long r = 0;
    char comma = 0;
    if (!(row >> k >> comma >> r) || comma != ',' || k <= 0 || r <= 0)
      throw InputError("expected \"vehicles,riders\" with positive integers", "sweep line " + std::to_string(lineno));
    out.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>(r)});
  }
  return out;
}

}  // namespace rideauction
