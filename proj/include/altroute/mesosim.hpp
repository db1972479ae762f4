#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "altroute/network.hpp"
#include "altroute/routing.hpp"
#include "altroute/rng.hpp"

namespace altroute::mesosim {

struct SimConfig {
  double vehicle_length_m = 5.0;
  double min_gap_m = 2.5;
  double tick_seconds = 1.0;
  bool record_occupancy = false;
};

/// Slots an edge offers: floor(lanes * length / (vehicle_length + min_gap)),
/// never below 1.
int edge_capacity(const net::Edge& e, const SimConfig& cfg);

struct VehicleSpec {
  std::string id;
  routing::Route route;
  routing::CostMode preferred = routing::CostMode::MinLength;
};

struct TripRecord {
  std::string vehicle;
  int trip_index = 0;  // 0 is the first trip
  std::string origin;
  std::string destination;
  std::int64_t start_tick = 0;
  std::int64_t end_tick = 0;
  double actual_s = 0;
  double theoretical_s = 0;  // route free-flow time
  double overhead = 1.0;     // actual / theoretical, >= 1
};

struct OccupancySample {
  std::int64_t tick = 0;
  int edge = -1;
  int occupants = 0;
};

struct SimOutput {
  std::vector<TripRecord> trips;
  std::vector<OccupancySample> occupancy;  // only when record_occupancy
  std::size_t completed_first_trips = 0;
  // Conservation check, evaluated every tick inside the loop: queued +
  // on-network vehicles must equal the fleet size. Stays 0.
  std::size_t population_violations = 0;
};

/// Respawn callback: the vehicle finished a trip on current_edge and needs
/// a fresh route starting there. Draws come from the run's seed stream in
/// deterministic completion order.
using RespawnFn =
    std::function<routing::Route(const VehicleSpec& spec, int current_edge, rng::SplitMix64& gen)>;

/// The standard respawn rule: destination drawn uniformly over spawnable
/// edges (redrawn while it equals the origin, 100 attempts), routed by the
/// vehicle's preferred router.
routing::Route respawn_trip(const net::RoadNetwork& net, const std::vector<int>& spawnable,
                            const VehicleSpec& spec, int current_edge, rng::SplitMix64& gen);

RespawnFn make_preferred_respawner(const net::RoadNetwork& net, const std::vector<int>& spawnable);

/// Live state of one simulation run. Owns the fleet; the network must
/// outlive it. Built by init_sim, advanced one tick at a time by step.
class SimState {
 public:
  std::int64_t tick() const { return tick_; }
  int occupants(int edge) const { return occupants_[static_cast<std::size_t>(edge)]; }
  int capacity(int edge) const { return capacity_[static_cast<std::size_t>(edge)]; }
  std::size_t queued() const { return spawn_queue_.size(); }
  std::size_t fleet_size() const { return fleet_.size(); }
  const SimOutput& output() const { return out_; }
  SimOutput take_output() { return std::move(out_); }

  /// (edge index, offset) of a vehicle, by spec index; nullopt while it
  /// still waits in the spawn queue.
  std::optional<std::pair<int, double>> position(std::size_t vehicle) const;

 private:
  friend SimState init_sim(const net::RoadNetwork&, std::vector<VehicleSpec>, std::uint64_t,
                           RespawnFn, SimConfig);
  friend void step(SimState&);

  struct ActiveVehicle {
    int spec = -1;
    routing::Route route;
    int route_pos = 0;
    double offset = 0;
    std::int64_t start_tick = 0;
    int trips_completed = 0;
    bool on_network = false;

    int current_edge() const { return route.edges[static_cast<std::size_t>(route_pos)]; }
    bool at_last_edge() const { return route_pos + 1 == static_cast<int>(route.edges.size()); }
  };

  const net::RoadNetwork* net_ = nullptr;
  std::vector<VehicleSpec> specs_;
  RespawnFn respawn_;
  SimConfig cfg_;
  rng::SplitMix64 gen_{0};
  std::int64_t tick_ = 0;
  std::vector<int> capacity_;
  std::vector<int> occupants_;
  std::vector<ActiveVehicle> fleet_;
  std::vector<int> spawn_queue_;  // FIFO of fleet indices
  std::vector<std::vector<int>> bucket_;
  SimOutput out_;

  void record_trip(const ActiveVehicle& v);
};

/// Validates every route against the network (ConfigError before tick 0)
/// and queues the fleet for spawning at offset 0 of each origin edge.
SimState init_sim(const net::RoadNetwork& net, std::vector<VehicleSpec> specs,
                  std::uint64_t seed, RespawnFn respawn, SimConfig cfg = {});

/// Advances one tick: drains the spawn queue capacity-gated, then moves
/// vehicles in edge-id order (front of an edge first) at
/// max_speed * max(1 - rho, 0.1), where rho is the share of the current
/// edge's capacity taken by *other* vehicles (tick-start snapshot). A
/// vehicle reaching the end of an edge enters the next one only while that
/// edge is below capacity, otherwise it waits at offset = length (vertical
/// queue). Completed trips are recorded and respawned in place.
void step(SimState& state);

/// init_sim plus horizon_ticks steps. Deterministic per (net, specs, seed).
SimOutput run(const net::RoadNetwork& net, const std::vector<VehicleSpec>& specs,
              std::int64_t horizon_ticks, std::uint64_t seed, const RespawnFn& respawn,
              const SimConfig& cfg = {});

/// Mean overhead over each vehicle's first completed trip; empty when no
/// first trip completed.
std::optional<double> mean_first_trip_overhead(const SimOutput& out);

std::string trip_log_csv(const SimOutput& out);
std::string occupancy_csv(const net::RoadNetwork& net, const SimOutput& out);

}  // namespace altroute::mesosim
