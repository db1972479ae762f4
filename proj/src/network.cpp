#include "altroute/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "altroute/csvio.hpp"
#include "altroute/errors.hpp"
#include "json.hpp"

namespace altroute::net {

namespace {

// Iterative Tarjan SCC over the street graph: vertices are edges, and there
// is an arc e1 -> e2 whenever to(e1) == from(e2). Strong connectivity at the
// street level is what trips need (routes run edge to edge), and it keeps
// the smallest valid network (two nodes, one street) valid.
std::vector<int> street_scc(const std::vector<Edge>& edges,
                            const std::vector<std::vector<int>>& out_by_node, int& scc_count) {
  const int n = static_cast<int>(edges.size());
  std::vector<int> index(n, -1), lowlink(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int next_index = 0;
  scc_count = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  for (int start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    std::vector<Frame> call;
    call.push_back({start, 0});
    index[start] = lowlink[start] = next_index++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = out_by_node[static_cast<std::size_t>(edges[f.v].to)];
      if (f.child < succ.size()) {
        const int w = succ[f.child++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          for (;;) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = scc_count;
            if (w == f.v) break;
          }
          ++scc_count;
        }
        const int v = f.v;
        call.pop_back();
        if (!call.empty()) {
          const int parent = call.back().v;
          lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
        }
      }
    }
  }
  return comp;
}

}  // namespace

int RoadNetwork::node_index(const std::string& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, const std::string& k) { return n.id < k; });
  if (it == nodes_.end() || it->id != id) return -1;
  return static_cast<int>(it - nodes_.begin());
}

int RoadNetwork::edge_index(const std::string& id) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), id,
                             [](const Edge& e, const std::string& k) { return e.id < k; });
  if (it == edges_.end() || it->id != id) return -1;
  return static_cast<int>(it - edges_.begin());
}

RoadNetwork make_network(std::vector<Node> nodes, std::vector<EdgeRecord> records,
                         bool allow_self_loops, bool check_connectivity) {
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i].id == nodes[i - 1].id)
      throw ValidationError("duplicate node id '" + nodes[i].id + "'");
  for (const Node& n : nodes)
    if (!std::isfinite(n.x) || !std::isfinite(n.y))
      throw ValidationError("node '" + n.id + "' has non-finite coordinates");

  std::sort(records.begin(), records.end(),
            [](const EdgeRecord& a, const EdgeRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].id == records[i - 1].id)
      throw ValidationError("duplicate edge id '" + records[i].id + "'");

  RoadNetwork net;
  net.nodes_ = std::move(nodes);
  net.edges_.reserve(records.size());
  for (const EdgeRecord& r : records) {
    Edge e;
    e.id = r.id;
    e.from = net.node_index(r.from);
    e.to = net.node_index(r.to);
    if (e.from < 0)
      throw ValidationError("edge '" + r.id + "' references missing node '" + r.from + "'");
    if (e.to < 0)
      throw ValidationError("edge '" + r.id + "' references missing node '" + r.to + "'");
    if (e.from == e.to && !allow_self_loops)
      throw ValidationError("edge '" + r.id + "' is a self loop (disallowed)");
    if (!(r.length_m >= kMinStreetLength) || !std::isfinite(r.length_m))
      throw ValidationError("edge '" + r.id + "' has length " + csv::fmt(r.length_m) +
                            " m, below the 0.1 m minimum");
    if (!(r.max_speed_mps > 0) || !std::isfinite(r.max_speed_mps))
      throw ValidationError("edge '" + r.id + "' has non-positive max speed");
    if (r.lanes < 1) throw ValidationError("edge '" + r.id + "' has non-positive lane count");
    e.length_m = r.length_m;
    e.max_speed_mps = r.max_speed_mps;
    e.lanes = r.lanes;
    net.edges_.push_back(std::move(e));
  }

  net.out_edges_.assign(net.nodes_.size(), {});
  for (std::size_t i = 0; i < net.edges_.size(); ++i)
    net.out_edges_[static_cast<std::size_t>(net.edges_[i].from)].push_back(static_cast<int>(i));

  if (check_connectivity && !net.edges_.empty()) {
    int scc_count = 0;
    std::vector<int> comp = street_scc(net.edges_, net.out_edges_, scc_count);
    if (scc_count > 1) {
      // Largest component by street count; ties go to the one holding the
      // lexicographically smallest edge id (edges are already sorted).
      std::vector<int> size(static_cast<std::size_t>(scc_count), 0);
      for (int c : comp) ++size[static_cast<std::size_t>(c)];
      int best = comp[0];
      for (std::size_t i = 0; i < comp.size(); ++i) {
        const int c = comp[i];
        if (size[static_cast<std::size_t>(c)] > size[static_cast<std::size_t>(best)]) best = c;
      }
      std::string outside;
      int listed = 0;
      for (std::size_t i = 0; i < comp.size(); ++i) {
        if (comp[i] == best) continue;
        if (listed++) outside += ", ";
        if (listed > 20) {
          outside += "...";
          break;
        }
        outside += "'" + net.edges_[i].id + "'";
      }
      throw ValidationError(
          "disconnected spawnable subgraph: streets outside the largest strongly connected "
          "component: " +
          outside);
    }
  }
  return net;
}

RoadNetwork load_network(const std::string& path, bool allow_self_loops) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("network file '" + path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
    throw ParseError("network file '" + path + "': expected top-level keys 'nodes' and 'edges'");

  std::vector<Node> nodes;
  std::vector<EdgeRecord> edges;
  try {
    for (const auto& jn : doc.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<std::string>();
      n.x = jn.at("x").get<double>();
      n.y = jn.at("y").get<double>();
      nodes.push_back(std::move(n));
    }
    for (const auto& je : doc.at("edges")) {
      EdgeRecord e;
      e.id = je.at("id").get<std::string>();
      e.from = je.at("from").get<std::string>();
      e.to = je.at("to").get<std::string>();
      e.length_m = je.at("length_m").get<double>();
      e.max_speed_mps = je.at("max_speed_mps").get<double>();
      e.lanes = je.at("lanes").get<int>();
      edges.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("network file '" + path + "': " + e.what());
  }
  return make_network(std::move(nodes), std::move(edges), allow_self_loops);
}

std::string network_to_json(const RoadNetwork& net) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const Node& n : net.nodes())
    doc["nodes"].push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  doc["edges"] = nlohmann::json::array();
  for (const Edge& e : net.edges())
    doc["edges"].push_back({{"id", e.id},
                            {"from", net.node(e.from).id},
                            {"to", net.node(e.to).id},
                            {"length_m", e.length_m},
                            {"max_speed_mps", e.max_speed_mps},
                            {"lanes", e.lanes}});
  return doc.dump(2) + "\n";
}

void save_network(const RoadNetwork& net, const std::string& path) {
  csv::write_file(path, network_to_json(net));
}

RoadNetwork generate_grid(int rows, int cols, double edge_length_m, double max_speed_mps,
                          int lanes) {
  if (rows < 2 || cols < 2) throw ConfigError("grid needs rows >= 2 and cols >= 2");
  if (!(edge_length_m > 0) || !(max_speed_mps > 0) || lanes < 1)
    throw ConfigError("grid edge length, speed and lanes must be positive");

  const int width = static_cast<int>(
      std::max(std::to_string(rows - 1).size(), std::to_string(cols - 1).size()));
  auto pad = [width](int v) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
  };
  auto node_id = [&](int r, int c) { return "n" + pad(r) + "x" + pad(c); };

  std::vector<Node> nodes;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      nodes.push_back({node_id(r, c), c * edge_length_m, r * edge_length_m});

  std::vector<EdgeRecord> edges;
  auto add_pair = [&](int r1, int c1, int r2, int c2) {
    const std::string a = node_id(r1, c1), b = node_id(r2, c2);
    edges.push_back({a + "-" + b, a, b, edge_length_m, max_speed_mps, lanes});
    edges.push_back({b + "-" + a, b, a, edge_length_m, max_speed_mps, lanes});
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) add_pair(r, c, r, c + 1);
      if (r + 1 < rows) add_pair(r, c, r + 1, c);
    }
  return make_network(std::move(nodes), std::move(edges));
}

NetworkStats network_stats(const RoadNetwork& net) {
  NetworkStats s;
  s.node_count = net.node_count();
  s.edge_count = net.edge_count();
  if (net.edge_count() == 0) return s;
  s.min_street_length_m = net.edge(0).length_m;
  s.max_street_length_m = net.edge(0).length_m;
  for (const Edge& e : net.edges()) {
    s.total_street_length_m += e.length_m;
    s.min_street_length_m = std::min(s.min_street_length_m, e.length_m);
    s.max_street_length_m = std::max(s.max_street_length_m, e.length_m);
  }
  s.avg_street_length_m = s.total_street_length_m / static_cast<double>(s.edge_count);
  s.edges_per_length = static_cast<double>(s.edge_count) / s.total_street_length_m;
  s.nodes_per_length = static_cast<double>(s.node_count) / s.total_street_length_m;
  return s;
}

std::string stats_csv(const NetworkStats& s) {
  std::string out = "nodes,edges,total_length_m,avg_m,max_m,min_m,edges_per_m,nodes_per_m\n";
  out += std::to_string(s.node_count) + "," + std::to_string(s.edge_count) + "," +
         csv::fmt(s.total_street_length_m) + "," + csv::fmt(s.avg_street_length_m) + "," +
         csv::fmt(s.max_street_length_m) + "," + csv::fmt(s.min_street_length_m) + "," +
         csv::fmt(s.edges_per_length) + "," + csv::fmt(s.nodes_per_length) + "\n";
  return out;
}

std::vector<int> spawnable_edges(const RoadNetwork& net, double vehicle_length_m) {
  std::vector<int> out;
  for (std::size_t i = 0; i < net.edge_count(); ++i)
    if (net.edge(static_cast<int>(i)).length_m >= vehicle_length_m)
      out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace altroute::net
