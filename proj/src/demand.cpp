#include "altroute/demand.hpp"

#include <algorithm>
#include <cmath>

#include "altroute/csvio.hpp"
#include "altroute/errors.hpp"
#include "altroute/rng.hpp"

namespace altroute::demand {

std::vector<PopulationRecord> load_population_csv(const std::string& path) {
  std::vector<PopulationRecord> out;
  for (const auto& row : csv::read_file(path, "x_m,y_m,population")) {
    if (row.size() != 3)
      throw ParseError("population file '" + path + "': expected 3 fields per row");
    PopulationRecord r;
    r.x = csv::parse_double(row[0]);
    r.y = csv::parse_double(row[1]);
    r.population = csv::parse_int(row[2]);
    if (r.population < 0)
      throw ParseError("population file '" + path + "': negative population");
    out.push_back(r);
  }
  return out;
}

int DistrictGrid::cell_index(double x, double y) const {
  const int cx = static_cast<int>(std::floor((x - min_x) / cell_size));
  const int cy = static_cast<int>(std::floor((y - min_y) / cell_size));
  if (cx < 0 || cx >= nx || cy < 0 || cy >= ny) return -1;
  return cy * nx + cx;
}

DistrictGrid build_districts(const std::vector<PopulationRecord>& records,
                             const net::RoadNetwork& net, double cell_size,
                             double vehicle_length_m) {
  if (!(cell_size > 0)) throw DemandError("district cell size must be positive");
  if (net.node_count() == 0) throw DemandError("cannot build districts over an empty network");

  DistrictGrid g;
  g.cell_size = cell_size;
  double max_x = net.node(0).x, max_y = net.node(0).y;
  g.min_x = max_x;
  g.min_y = max_y;
  for (const net::Node& n : net.nodes()) {
    g.min_x = std::min(g.min_x, n.x);
    g.min_y = std::min(g.min_y, n.y);
    max_x = std::max(max_x, n.x);
    max_y = std::max(max_y, n.y);
  }
  g.nx = static_cast<int>(std::floor((max_x - g.min_x) / cell_size)) + 1;
  g.ny = static_cast<int>(std::floor((max_y - g.min_y) / cell_size)) + 1;
  g.weights.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny), 0.0);
  g.cell_edges.assign(g.weights.size(), {});

  g.spawnable = net::spawnable_edges(net, vehicle_length_m);
  for (int ei : g.spawnable) {
    const net::Node& from = net.node(net.edge(ei).from);
    const int c = g.cell_index(from.x, from.y);
    if (c >= 0) g.cell_edges[static_cast<std::size_t>(c)].push_back(ei);
  }

  double total = 0;
  for (const PopulationRecord& r : records) {
    if (r.population == 0) continue;  // zero-population records never affect weights
    const int c = g.cell_index(r.x, r.y);
    if (c < 0) {
      ++g.dropped_records;
      continue;
    }
    g.weights[static_cast<std::size_t>(c)] += static_cast<double>(r.population);
    total += static_cast<double>(r.population);
  }
  if (total <= 0)
    throw DemandError("no populated records fall inside the network bounding box (" +
                      std::to_string(g.dropped_records) + " dropped)");
  for (double& w : g.weights) w /= total;

  // Weight on street-less cells is useless for spawning; hand it to the
  // remaining populated cells pro rata.
  double orphaned = 0, kept = 0;
  for (std::size_t c = 0; c < g.weights.size(); ++c) {
    if (g.weights[c] > 0 && g.cell_edges[c].empty()) {
      orphaned += g.weights[c];
      g.weights[c] = 0;
      ++g.redistributed_cells;
    } else {
      kept += g.weights[c];
    }
  }
  if (kept <= 0)
    throw DemandError("every populated district lacks spawnable streets");
  if (orphaned > 0)
    for (double& w : g.weights) w = w / kept;  // renormalize survivors to sum 1

  return g;
}

namespace {

int draw_weighted_cell(const DistrictGrid& g, rng::SplitMix64& gen) {
  const double u = gen.next_double();
  double acc = 0;
  int last_positive = -1;
  for (std::size_t c = 0; c < g.weights.size(); ++c) {
    if (g.weights[c] <= 0) continue;
    last_positive = static_cast<int>(c);
    acc += g.weights[c];
    if (u < acc) return static_cast<int>(c);
  }
  return last_positive;  // guards the acc < 1 rounding tail
}

int draw_destination(const std::vector<int>& spawnable, int origin, rng::SplitMix64& gen) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int dest = spawnable[gen.next_below(spawnable.size())];
    if (dest != origin) return dest;
  }
  throw DemandError("destination redraw budget (100) exhausted; too few spawnable edges");
}

}  // namespace

std::vector<std::pair<int, int>> sample_trips(const DistrictGrid& grid,
                                              const net::RoadNetwork& net, std::size_t n,
                                              std::uint64_t seed) {
  (void)net;
  if (n < 1) throw DemandError("trip sample size must be at least 1");
  if (grid.spawnable.empty()) throw DemandError("network has no spawnable edges");

  rng::SplitMix64 gen(rng::mix_seed(seed, "trips"));
  std::vector<std::pair<int, int>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int cell = draw_weighted_cell(grid, gen);
    if (cell < 0) throw DemandError("no populated district to draw an origin from");
    const auto& edges = grid.cell_edges[static_cast<std::size_t>(cell)];
    const int origin = edges[gen.next_below(edges.size())];
    const int dest = draw_destination(grid.spawnable, origin, gen);
    out.emplace_back(origin, dest);
  }
  return out;
}

std::vector<std::pair<int, int>> sample_trips_uniform(const net::RoadNetwork& net, std::size_t n,
                                                      std::uint64_t seed,
                                                      double vehicle_length_m) {
  if (n < 1) throw DemandError("trip sample size must be at least 1");
  const std::vector<int> spawnable = net::spawnable_edges(net, vehicle_length_m);
  if (spawnable.empty()) throw DemandError("network has no spawnable edges");

  rng::SplitMix64 gen(rng::mix_seed(seed, "trips"));
  std::vector<std::pair<int, int>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int origin = spawnable[gen.next_below(spawnable.size())];
    const int dest = draw_destination(spawnable, origin, gen);
    out.emplace_back(origin, dest);
  }
  return out;
}

FleetSize compute_fleet_size(std::int64_t population, double commute_share, int periods) {
  if (population <= 0) throw ConfigError("population must be positive");
  if (!(commute_share > 0 && commute_share <= 1))
    throw ConfigError("commute share must lie in (0, 1]");
  if (periods < 1) throw ConfigError("periods must be at least 1");
  FleetSize f;
  f.raw = static_cast<double>(population) * commute_share / static_cast<double>(periods);
  f.rounded = std::llround(f.raw / 1000.0) * 1000;
  return f;
}

}  // namespace altroute::demand
