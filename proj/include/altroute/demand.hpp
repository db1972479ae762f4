#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "altroute/network.hpp"

namespace altroute::demand {

struct PopulationRecord {
  double x = 0;  // planar meters, same frame as the network
  double y = 0;
  std::int64_t population = 0;
};

/// Population CSV: header x_m,y_m,population.
std::vector<PopulationRecord> load_population_csv(const std::string& path);

/// Square-cell district grid over the network's bounding box. Cell (cx, cy)
/// covers the half-open square [min + cx*size, min + (cx+1)*size) on each
/// axis. Weights are population shares; cells with population but no
/// spawnable street get their weight redistributed proportionally.
struct DistrictGrid {
  double cell_size = 1000.0;
  double min_x = 0, min_y = 0;
  int nx = 0, ny = 0;
  std::vector<double> weights;             // nx*ny, sums to 1
  std::vector<std::vector<int>> cell_edges;  // spawnable edge indices per cell
  std::vector<int> spawnable;              // all spawnable edges

  int cell_index(double x, double y) const;  // -1 when outside the box
  std::size_t dropped_records = 0;           // records outside the bounding box
  std::size_t redistributed_cells = 0;       // populated cells without streets
};

/// Builds the grid: records outside the bounding box are dropped (counted
/// in dropped_records); throws DemandError when nothing populated remains.
/// Streets are assigned to cells by their from-node coordinates.
DistrictGrid build_districts(const std::vector<PopulationRecord>& records,
                             const net::RoadNetwork& net, double cell_size,
                             double vehicle_length_m = 5.0);

/// n (origin, destination) edge pairs: origin cell follows the population
/// weights, origin edge uniform within the cell, destination uniform over
/// all spawnable edges. Destinations equal to the origin are redrawn (100
/// attempts, then DemandError).
std::vector<std::pair<int, int>> sample_trips(const DistrictGrid& grid,
                                              const net::RoadNetwork& net, std::size_t n,
                                              std::uint64_t seed);

/// The districts-free variant: origins uniform over spawnable edges too.
std::vector<std::pair<int, int>> sample_trips_uniform(const net::RoadNetwork& net, std::size_t n,
                                                      std::uint64_t seed,
                                                      double vehicle_length_m = 5.0);

struct FleetSize {
  std::int64_t rounded = 0;  // to the nearest 1000
  double raw = 0;            // population * share / periods
};

/// Fleet size for one commute period: population * commute_share / periods,
/// rounded to the nearest 1000 (half away from zero).
FleetSize compute_fleet_size(std::int64_t population, double commute_share, int periods);

}  // namespace altroute::demand
