#include "altroute/mesosim.hpp"

#include <algorithm>
#include <cmath>

#include "altroute/csvio.hpp"
#include "altroute/errors.hpp"

namespace altroute::mesosim {

int edge_capacity(const net::Edge& e, const SimConfig& cfg) {
  const double slot = cfg.vehicle_length_m + cfg.min_gap_m;
  const int cap = static_cast<int>(std::floor(e.lanes * e.length_m / slot));
  return std::max(1, cap);
}

routing::Route respawn_trip(const net::RoadNetwork& net, const std::vector<int>& spawnable,
                            const VehicleSpec& spec, int current_edge, rng::SplitMix64& gen) {
  if (spawnable.empty()) throw DemandError("no spawnable edges to respawn onto");
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int dest = spawnable[gen.next_below(spawnable.size())];
    if (dest == current_edge) continue;
    return routing::shortest_route(net, current_edge, dest, spec.preferred);
  }
  throw DemandError("respawn for vehicle '" + spec.id +
                    "' exhausted 100 destination draws from edge '" + net.edge(current_edge).id +
                    "'");
}

RespawnFn make_preferred_respawner(const net::RoadNetwork& net,
                                   const std::vector<int>& spawnable) {
  return [&net, spawnable](const VehicleSpec& spec, int current_edge, rng::SplitMix64& gen) {
    return respawn_trip(net, spawnable, spec, current_edge, gen);
  };
}

namespace {

void validate_route(const net::RoadNetwork& net, const std::string& vehicle,
                    const routing::Route& route) {
  const auto& edges = route.edges;
  if (edges.empty()) throw ConfigError("vehicle '" + vehicle + "' has an empty route");
  for (int ei : edges)
    if (ei < 0 || ei >= static_cast<int>(net.edge_count()))
      throw ConfigError("vehicle '" + vehicle + "' route references an unknown edge index " +
                        std::to_string(ei));
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (net.edge(edges[i - 1]).to != net.edge(edges[i]).from)
      throw ConfigError("vehicle '" + vehicle + "' route breaks between '" +
                        net.edge(edges[i - 1]).id + "' and '" + net.edge(edges[i]).id + "'");
}

}  // namespace

std::optional<std::pair<int, double>> SimState::position(std::size_t vehicle) const {
  const ActiveVehicle& v = fleet_[vehicle];
  if (!v.on_network) return std::nullopt;
  return std::make_pair(v.current_edge(), v.offset);
}

void SimState::record_trip(const ActiveVehicle& v) {
  TripRecord r;
  r.vehicle = specs_[static_cast<std::size_t>(v.spec)].id;
  r.trip_index = v.trips_completed;
  r.origin = net_->edge(v.route.origin()).id;
  r.destination = net_->edge(v.route.destination()).id;
  r.start_tick = v.start_tick;
  r.end_tick = tick_;
  r.actual_s = static_cast<double>(tick_ - v.start_tick + 1) * cfg_.tick_seconds;
  r.theoretical_s = v.route.free_flow_time_s;
  r.overhead = r.actual_s / r.theoretical_s;
  if (r.overhead < 1.0) {
    // Whole-tick actuals can round an ulp below an exact-integer free-flow
    // time; anything beyond one tick is a real model defect.
    if (r.actual_s + cfg_.tick_seconds < r.theoretical_s)
      throw SimError("trip for vehicle '" + r.vehicle + "' finished faster than free flow (" +
                     csv::fmt(r.actual_s) + " s vs " + csv::fmt(r.theoretical_s) + " s)");
    r.overhead = 1.0;
  }
  if (r.trip_index == 0) ++out_.completed_first_trips;
  out_.trips.push_back(std::move(r));
}

SimState init_sim(const net::RoadNetwork& net, std::vector<VehicleSpec> specs,
                  std::uint64_t seed, RespawnFn respawn, SimConfig cfg) {
  if (!respawn) throw ConfigError("simulation needs a respawn callback");
  for (const VehicleSpec& s : specs) validate_route(net, s.id, s.route);

  SimState st;
  st.net_ = &net;
  st.specs_ = std::move(specs);
  st.respawn_ = std::move(respawn);
  st.cfg_ = cfg;
  st.gen_ = rng::SplitMix64(rng::mix_seed(seed, "mesosim"));

  const std::size_t edge_count = net.edge_count();
  st.capacity_.resize(edge_count);
  for (std::size_t e = 0; e < edge_count; ++e)
    st.capacity_[e] = edge_capacity(net.edge(static_cast<int>(e)), cfg);
  st.occupants_.assign(edge_count, 0);
  st.bucket_.resize(edge_count);

  st.fleet_.resize(st.specs_.size());
  st.spawn_queue_.resize(st.specs_.size());
  for (std::size_t i = 0; i < st.specs_.size(); ++i) {
    st.fleet_[i].spec = static_cast<int>(i);
    st.fleet_[i].route = st.specs_[i].route;
    st.spawn_queue_[i] = static_cast<int>(i);
  }
  return st;
}

void step(SimState& st) {
  const net::RoadNetwork& net = *st.net_;
  const std::size_t edge_count = net.edge_count();

  // Drain the spawn queue: admit every queued vehicle whose origin edge
  // has room, preserving FIFO order among the rest.
  if (!st.spawn_queue_.empty()) {
    std::vector<int> still_waiting;
    for (int vi : st.spawn_queue_) {
      auto& v = st.fleet_[static_cast<std::size_t>(vi)];
      const auto origin = static_cast<std::size_t>(v.current_edge());
      if (st.occupants_[origin] < st.capacity_[origin]) {
        ++st.occupants_[origin];
        v.on_network = true;
        v.offset = 0;
        v.start_tick = st.tick_;
      } else {
        still_waiting.push_back(vi);
      }
    }
    st.spawn_queue_ = std::move(still_waiting);
  }

  // Speed snapshot for this tick.
  const std::vector<int> occ_snapshot = st.occupants_;

  // Per-edge buckets; edges are stored in id order, which fixes the update
  // order, and vehicles run front first.
  for (auto& b : st.bucket_) b.clear();
  for (std::size_t i = 0; i < st.fleet_.size(); ++i)
    if (st.fleet_[i].on_network)
      st.bucket_[static_cast<std::size_t>(st.fleet_[i].current_edge())].push_back(
          static_cast<int>(i));
  for (auto& b : st.bucket_)
    std::sort(b.begin(), b.end(), [&](int a, int bb) {
      const auto& va = st.fleet_[static_cast<std::size_t>(a)];
      const auto& vb = st.fleet_[static_cast<std::size_t>(bb)];
      if (va.offset != vb.offset) return va.offset > vb.offset;
      return st.specs_[static_cast<std::size_t>(va.spec)].id <
             st.specs_[static_cast<std::size_t>(vb.spec)].id;
    });

  for (std::size_t e = 0; e < edge_count; ++e) {
    for (int vi : st.bucket_[e]) {
      auto& v = st.fleet_[static_cast<std::size_t>(vi)];
      double budget = st.cfg_.tick_seconds;
      while (budget > 0) {
        const net::Edge& edge = net.edge(v.current_edge());
        const auto ce = static_cast<std::size_t>(v.current_edge());
        // Density excludes the vehicle itself, so a lone vehicle drives at
        // free flow.
        const double rho =
            static_cast<double>(std::max(0, occ_snapshot[ce] - 1)) / st.capacity_[ce];
        const double speed = edge.max_speed_mps * std::max(1.0 - rho, 0.1);
        const double remaining = edge.length_m - v.offset;
        const double need = remaining / speed;
        if (need > budget) {
          v.offset += speed * budget;
          budget = 0;
          break;
        }
        budget -= need;
        v.offset = edge.length_m;
        if (v.at_last_edge()) {
          st.record_trip(v);
          const int here = v.current_edge();
          const VehicleSpec& spec = st.specs_[static_cast<std::size_t>(v.spec)];
          v.route = st.respawn_(spec, here, st.gen_);
          if (v.route.edges.empty() || v.route.edges.front() != here)
            throw SimError("respawn for vehicle '" + spec.id + "' must start on edge '" +
                           net.edge(here).id + "'");
          validate_route(net, spec.id, v.route);
          ++v.trips_completed;
          v.route_pos = 0;
          v.offset = 0;  // restart at the head of the same edge
          v.start_tick = st.tick_ + 1;
          break;  // leftover budget is discarded at trip boundaries
        }
        const auto next =
            static_cast<std::size_t>(v.route.edges[static_cast<std::size_t>(v.route_pos) + 1]);
        if (st.occupants_[next] >= st.capacity_[next]) break;  // vertical queue at the edge end
        --st.occupants_[ce];
        ++st.occupants_[next];
        ++v.route_pos;
        v.offset = 0;
      }
    }
  }

  if (st.cfg_.record_occupancy)
    for (std::size_t e = 0; e < edge_count; ++e)
      if (st.occupants_[e] > 0)
        st.out_.occupancy.push_back({st.tick_, static_cast<int>(e), st.occupants_[e]});

  std::size_t on_net = 0;
  for (const auto& v : st.fleet_)
    if (v.on_network) ++on_net;
  if (on_net + st.spawn_queue_.size() != st.fleet_.size()) ++st.out_.population_violations;

  ++st.tick_;
}

SimOutput run(const net::RoadNetwork& net, const std::vector<VehicleSpec>& specs,
              std::int64_t horizon_ticks, std::uint64_t seed, const RespawnFn& respawn,
              const SimConfig& cfg) {
  if (horizon_ticks <= 0) throw ConfigError("simulation horizon must be positive");
  SimState st = init_sim(net, specs, seed, respawn, cfg);
  for (std::int64_t t = 0; t < horizon_ticks; ++t) step(st);
  return st.take_output();
}

std::optional<double> mean_first_trip_overhead(const SimOutput& out) {
  double sum = 0;
  std::size_t n = 0;
  for (const TripRecord& r : out.trips)
    if (r.trip_index == 0) {
      sum += r.overhead;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string trip_log_csv(const SimOutput& out) {
  std::string s =
      "vehicle,trip_index,origin,dest,start_tick,end_tick,actual_s,theoretical_s,overhead\n";
  for (const TripRecord& r : out.trips)
    s += r.vehicle + "," + std::to_string(r.trip_index) + "," + r.origin + "," + r.destination +
         "," + std::to_string(r.start_tick) + "," + std::to_string(r.end_tick) + "," +
         csv::fmt(r.actual_s) + "," + csv::fmt(r.theoretical_s) + "," + csv::fmt(r.overhead) +
         "\n";
  return s;
}

std::string occupancy_csv(const net::RoadNetwork& net, const SimOutput& out) {
  std::string s = "tick,edge,occupants\n";
  for (const OccupancySample& o : out.occupancy)
    s += std::to_string(o.tick) + "," + net.edge(o.edge).id + "," + std::to_string(o.occupants) +
         "\n";
  return s;
}

}  // namespace altroute::mesosim
