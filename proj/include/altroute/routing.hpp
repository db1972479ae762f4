#pragma once

#include <array>
#include <string>
#include <vector>

#include "altroute/network.hpp"

namespace altroute::routing {

/// The three router cost policies: minimal length, maximal speed
/// (edge cost 1/max_speed), and balanced (edge cost length/max_speed).
enum class CostMode : int { MinLength = 0, MaxSpeed = 1, Balanced = 2 };

inline constexpr std::array<CostMode, 3> kAllModes = {CostMode::MinLength, CostMode::MaxSpeed,
                                                      CostMode::Balanced};

const char* to_string(CostMode m);
CostMode mode_from_string(const std::string& s);  // throws ConfigError

double edge_cost(const net::Edge& e, CostMode mode);

/// An edge-to-edge path. Trips start and end on streets: the route covers
/// the origin edge, any intermediate edges, and the destination edge.
struct Route {
  std::vector<int> edges;  // edge indices, consecutive edges share a node
  double total_length_m = 0;
  double free_flow_time_s = 0;  // sum of length/max_speed over edges

  int origin() const { return edges.front(); }
  int destination() const { return edges.back(); }
  bool operator==(const Route& other) const = default;
};

/// Minimum-cost route from origin edge to destination edge under the given
/// cost mode. Node Dijkstra from to(origin) to from(dest) with the endpoint
/// edges included in the path and its cost. Deterministic: equal-cost
/// relaxations prefer the lexicographically smaller incoming edge id.
/// Throws RoutingError naming both edges when the destination is
/// unreachable.
Route shortest_route(const net::RoadNetwork& net, int origin_edge, int dest_edge, CostMode mode);
Route shortest_route(const net::RoadNetwork& net, const std::string& origin_edge,
                     const std::string& dest_edge, CostMode mode);

/// Total cost of a route under a mode (for oracles and diagnostics).
double route_cost(const net::RoadNetwork& net, const Route& r, CostMode mode);

/// The three candidate routes, ordered [MinLength, MaxSpeed, Balanced].
/// Routes may coincide.
std::array<Route, 3> candidate_routes(const net::RoadNetwork& net, int origin_edge, int dest_edge);

}  // namespace altroute::routing
