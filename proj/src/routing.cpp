#include "altroute/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "altroute/errors.hpp"

namespace altroute::routing {

const char* to_string(CostMode m) {
  switch (m) {
    case CostMode::MinLength: return "minlength";
    case CostMode::MaxSpeed: return "maxspeed";
    case CostMode::Balanced: return "balanced";
  }
  return "?";
}

CostMode mode_from_string(const std::string& s) {
  if (s == "minlength") return CostMode::MinLength;
  if (s == "maxspeed") return CostMode::MaxSpeed;
  if (s == "balanced") return CostMode::Balanced;
  throw ConfigError("unknown cost mode '" + s + "' (expected minlength|maxspeed|balanced)");
}

double edge_cost(const net::Edge& e, CostMode mode) {
  switch (mode) {
    case CostMode::MinLength: return e.length_m;
    case CostMode::MaxSpeed: return 1.0 / e.max_speed_mps;
    case CostMode::Balanced: return e.length_m / e.max_speed_mps;
  }
  return 0;
}

namespace {

Route finalize(const net::RoadNetwork& net, std::vector<int> edges) {
  Route r;
  r.edges = std::move(edges);
  for (int ei : r.edges) {
    const net::Edge& e = net.edge(ei);
    r.total_length_m += e.length_m;
    r.free_flow_time_s += e.length_m / e.max_speed_mps;
  }
  return r;
}

}  // namespace

Route shortest_route(const net::RoadNetwork& net, int origin_edge, int dest_edge, CostMode mode) {
  if (origin_edge < 0 || origin_edge >= static_cast<int>(net.edge_count()) || dest_edge < 0 ||
      dest_edge >= static_cast<int>(net.edge_count()))
    throw RoutingError("origin or destination edge index out of range");
  if (origin_edge == dest_edge) return finalize(net, {origin_edge});

  const int start = net.edge(origin_edge).to;
  const int target = net.edge(dest_edge).from;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> dist(net.node_count(), inf);
  std::vector<int> via(net.node_count(), -1);  // incoming edge on the best path
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

  dist[static_cast<std::size_t>(start)] = edge_cost(net.edge(origin_edge), mode);
  queue.push({dist[static_cast<std::size_t>(start)], start});

  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (int ei : net.out_edges(u)) {
      const net::Edge& e = net.edge(ei);
      const double nd = d + edge_cost(e, mode);
      const auto v = static_cast<std::size_t>(e.to);
      if (nd < dist[v]) {
        dist[v] = nd;
        via[v] = ei;
        queue.push({nd, e.to});
      } else if (nd == dist[v] && via[v] >= 0 && e.id < net.edge(via[v]).id) {
        via[v] = ei;  // tie-break keeps paths reproducible across runs
      }
    }
  }

  if (dist[static_cast<std::size_t>(target)] == inf)
    throw RoutingError("no path from edge '" + net.edge(origin_edge).id + "' to edge '" +
                       net.edge(dest_edge).id + "'");

  std::vector<int> middle;
  for (int node = target; node != start;) {
    const int ei = via[static_cast<std::size_t>(node)];
    middle.push_back(ei);
    node = net.edge(ei).from;
  }
  std::vector<int> edges;
  edges.reserve(middle.size() + 2);
  edges.push_back(origin_edge);
  edges.insert(edges.end(), middle.rbegin(), middle.rend());
  edges.push_back(dest_edge);
  return finalize(net, std::move(edges));
}

Route shortest_route(const net::RoadNetwork& net, const std::string& origin_edge,
                     const std::string& dest_edge, CostMode mode) {
  const int o = net.edge_index(origin_edge);
  const int d = net.edge_index(dest_edge);
  if (o < 0) throw RoutingError("unknown origin edge '" + origin_edge + "'");
  if (d < 0) throw RoutingError("unknown destination edge '" + dest_edge + "'");
  return shortest_route(net, o, d, mode);
}

double route_cost(const net::RoadNetwork& net, const Route& r, CostMode mode) {
  double c = 0;
  for (int ei : r.edges) c += edge_cost(net.edge(ei), mode);
  return c;
}

std::array<Route, 3> candidate_routes(const net::RoadNetwork& net, int origin_edge,
                                      int dest_edge) {
  return {shortest_route(net, origin_edge, dest_edge, CostMode::MinLength),
          shortest_route(net, origin_edge, dest_edge, CostMode::MaxSpeed),
          shortest_route(net, origin_edge, dest_edge, CostMode::Balanced)};
}

}  // namespace altroute::routing
