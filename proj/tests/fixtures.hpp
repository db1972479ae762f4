// Shared test fixtures.
#pragma once

#include <string>
#include <vector>

#include "altroute/network.hpp"

namespace fixtures {

// 10x10 grid with 100 m blocks. Every third row/column is an arterial
// (13.9 m/s, two lanes); the rest are side streets (8.3 m/s, one lane), so
// the three routers genuinely disagree. Shipped as data/grid10.json.
inline altroute::net::RoadNetwork arterial_grid10() {
  using altroute::net::EdgeRecord;
  using altroute::net::Node;
  const int n = 10;
  const double block = 100.0;
  auto node_id = [](int r, int c) { return "n" + std::to_string(r) + "x" + std::to_string(c); };
  std::vector<Node> nodes;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) nodes.push_back({node_id(r, c), c * block, r * block});
  std::vector<EdgeRecord> edges;
  auto arterial = [](int rc) { return rc % 3 == 0; };
  auto add_pair = [&](int r1, int c1, int r2, int c2, bool fast) {
    const double speed = fast ? 13.9 : 8.3;
    const int lanes = fast ? 2 : 1;
    const std::string a = node_id(r1, c1), b = node_id(r2, c2);
    edges.push_back({a + "-" + b, a, b, block, speed, lanes});
    edges.push_back({b + "-" + a, b, a, block, speed, lanes});
  };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) add_pair(r, c, r, c + 1, arterial(r));  // street along row r
      if (r + 1 < n) add_pair(r, c, r + 1, c, arterial(c));  // street along column c
    }
  return altroute::net::make_network(std::move(nodes), std::move(edges));
}

}  // namespace fixtures
