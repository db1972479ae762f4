#pragma once

#include <string>
#include <vector>

namespace altroute::net {

struct Node {
  std::string id;
  double x = 0;  // planar meters
  double y = 0;
};

struct Edge {
  std::string id;
  int from = -1;  // node index
  int to = -1;
  double length_m = 0;
  double max_speed_mps = 0;
  int lanes = 1;
};

/// Directed street graph. Immutable once built: nodes and edges are stored
/// sorted by id, so indices are stable and id order doubles as the global
/// edge ordering used by plan vectors.
class RoadNetwork {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Edge& edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }

  /// Outgoing edge indices of a node, ordered by edge id.
  const std::vector<int>& out_edges(int node_idx) const {
    return out_edges_[static_cast<std::size_t>(node_idx)];
  }

  /// Index lookups; -1 when absent.
  int node_index(const std::string& id) const;
  int edge_index(const std::string& id) const;

 private:
  friend RoadNetwork make_network(std::vector<Node>, std::vector<struct EdgeRecord>, bool, bool);
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_edges_;
};

/// Raw edge as it appears in a network file, before node-id resolution.
struct EdgeRecord {
  std::string id;
  std::string from;
  std::string to;
  double length_m = 0;
  double max_speed_mps = 0;
  int lanes = 1;
};

inline constexpr double kMinStreetLength = 0.1;  // meters

/// Builds and validates a network from raw records. Checks, in order:
/// duplicate ids, finite coordinates, dangling endpoints, self loops
/// (rejected unless allow_self_loops), length >= 0.1 m, positive speed,
/// positive lanes, and edge-level strong connectivity (every street must be
/// co-reachable from every other; streets outside the largest strongly
/// connected component of the street graph are listed in the error).
/// Throws ValidationError naming the offending records.
/// check_connectivity=false skips only the connectivity pass, for
/// inspecting raw un-cleaned maps; file loading never skips it.
RoadNetwork make_network(std::vector<Node> nodes, std::vector<EdgeRecord> edges,
                         bool allow_self_loops = false, bool check_connectivity = true);

/// Loads a network file (JSON: {"nodes": [{id,x,y}], "edges": [{id, from,
/// to, length_m, max_speed_mps, lanes}]}). Throws ParseError on malformed
/// input, ValidationError as make_network.
RoadNetwork load_network(const std::string& path, bool allow_self_loops = false);

/// Writes the same JSON document load_network reads.
void save_network(const RoadNetwork& net, const std::string& path);
std::string network_to_json(const RoadNetwork& net);

/// rows x cols lattice with bidirectional edges between 4-neighbours.
/// Node ids n<r>x<c>, edge ids <from>-<to>, zero-padded so lexicographic
/// order matches grid order. node_count = rows*cols,
/// edge_count = 2*(2*rows*cols - rows - cols).
RoadNetwork generate_grid(int rows, int cols, double edge_length_m, double max_speed_mps,
                          int lanes);

struct NetworkStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double total_street_length_m = 0;
  double avg_street_length_m = 0;
  double max_street_length_m = 0;
  double min_street_length_m = 0;
  double edges_per_length = 0;  // 1/m
  double nodes_per_length = 0;  // 1/m
};

NetworkStats network_stats(const RoadNetwork& net);

/// CSV line pair (header + row) for the stats subcommand.
std::string stats_csv(const NetworkStats& s);

/// Edges long enough to hold a vehicle; origins, destinations and respawn
/// targets are drawn from this set.
std::vector<int> spawnable_edges(const RoadNetwork& net, double vehicle_length_m);

}  // namespace altroute::net
