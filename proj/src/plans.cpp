#include "altroute/plans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "altroute/csvio.hpp"
#include "altroute/errors.hpp"

namespace altroute::plans {

double UtilizationVec::at(int edge_index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), edge_index,
                             [](const auto& p, int k) { return p.first < k; });
  if (it == entries.end() || it->first != edge_index) return 0.0;
  return it->second;
}

std::vector<double> UtilizationVec::dense() const {
  std::vector<double> v(dim, 0.0);
  for (const auto& [i, x] : entries) v[static_cast<std::size_t>(i)] = x;
  return v;
}

UtilizationVec encode_plan(const net::RoadNetwork& net, const routing::Route& route,
                           double horizon_s, double vehicle_length_m, std::size_t* clamp_count) {
  if (!(horizon_s > 0)) throw ConfigError("plan horizon must be positive");
  if (!(vehicle_length_m > 0)) throw ConfigError("vehicle length must be positive");

  UtilizationVec u;
  u.dim = net.edge_count();
  u.entries.reserve(route.edges.size());
  for (int ei : route.edges) {
    const net::Edge& e = net.edge(ei);
    double space = vehicle_length_m / e.length_m;
    if (space > 1.0) {
      space = 1.0;
      if (clamp_count) ++*clamp_count;
    }
    const double time = std::min(1.0, (e.length_m / e.max_speed_mps) / horizon_s);
    u.entries.emplace_back(ei, space * time);
  }
  std::sort(u.entries.begin(), u.entries.end());
  return u;
}

void AgentPlanSet::recompute_preferred() {
  preferred = 0;
  for (int k = 1; k < 3; ++k)
    if (plans[static_cast<std::size_t>(k)].cost < plans[static_cast<std::size_t>(preferred)].cost)
      preferred = k;
}

void RouterCostTable::set(const std::string& agent, routing::CostMode m, double cost) {
  auto it = table_.find(agent);
  if (it == table_.end()) {
    it = table_.emplace(agent, std::array<double, 3>{0, 0, 0}).first;
  }
  it->second[static_cast<std::size_t>(m)] = cost;
}

double RouterCostTable::get(const std::string& agent, routing::CostMode m) const {
  auto it = table_.find(agent);
  if (it == table_.end()) throw MiningError("no mined costs for agent '" + agent + "'");
  return it->second[static_cast<std::size_t>(m)];
}

bool RouterCostTable::has(const std::string& agent) const { return table_.count(agent) > 0; }

std::string RouterCostTable::to_csv() const {
  std::string out = "agent,router,cost\n";
  for (const auto& [agent, costs] : table_)
    for (routing::CostMode m : routing::kAllModes)
      out += agent + "," + routing::to_string(m) + "," +
             csv::fmt(costs[static_cast<std::size_t>(m)]) + "\n";
  return out;
}

RouterCostTable RouterCostTable::from_csv(const std::string& path) {
  RouterCostTable t;
  for (const auto& row : csv::read_file(path, "agent,router,cost")) {
    if (row.size() != 3) throw ParseError("cost table '" + path + "': expected 3 fields per row");
    t.set(row[0], routing::mode_from_string(row[1]), csv::parse_double(row[2]));
  }
  return t;
}

RouterCostTable RouterCostTable::zero(const std::vector<std::string>& agents) {
  RouterCostTable t;
  for (const auto& a : agents)
    for (routing::CostMode m : routing::kAllModes) t.set(a, m, 0.0);
  return t;
}

RouterCostTable mine_router_costs(const std::vector<BaselineRecord>& records) {
  if (records.empty()) throw MiningError("baseline log is empty");

  struct Acc {
    std::array<double, 3> sum{0, 0, 0};
    std::array<std::size_t, 3> n{0, 0, 0};
  };
  std::map<std::string, Acc> acc;
  for (const BaselineRecord& r : records) {
    Acc& a = acc[r.agent];
    a.sum[static_cast<std::size_t>(r.router)] += r.trip_overhead;
    a.n[static_cast<std::size_t>(r.router)] += 1;
  }

  std::vector<std::string> gaps;
  for (const auto& [agent, a] : acc)
    for (routing::CostMode m : routing::kAllModes)
      if (a.n[static_cast<std::size_t>(m)] == 0)
        gaps.push_back("(" + agent + ", " + routing::to_string(m) + ")");
  if (!gaps.empty()) {
    std::string msg;
    for (std::size_t i = 0; i < gaps.size() && i < 20; ++i) msg += (i ? ", " : "") + gaps[i];
    if (gaps.size() > 20) msg += ", ... (" + std::to_string(gaps.size()) + " total)";
    throw MiningError("missing (agent, router) coverage in baseline log: " + msg);
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::map<std::string, std::array<double, 3>> means;
  for (const auto& [agent, a] : acc) {
    std::array<double, 3> m;
    for (std::size_t k = 0; k < 3; ++k) {
      m[k] = a.sum[k] / static_cast<double>(a.n[k]);
      lo = std::min(lo, m[k]);
      hi = std::max(hi, m[k]);
    }
    means[agent] = m;
  }

  const double range = hi - lo;
  RouterCostTable t;
  for (const auto& [agent, m] : means)
    for (routing::CostMode mode : routing::kAllModes) {
      const double v = m[static_cast<std::size_t>(mode)];
      t.set(agent, mode, range > 0 ? (v - lo) / range : 0.0);
    }
  return t;
}

AgentPlanSet make_plan_set(const net::RoadNetwork& net, const std::string& agent, int origin_edge,
                           int dest_edge, double horizon_s, double vehicle_length_m,
                           const RouterCostTable& costs) {
  AgentPlanSet set;
  set.agent = agent;
  const auto routes = routing::candidate_routes(net, origin_edge, dest_edge);
  for (std::size_t k = 0; k < 3; ++k) {
    Plan& p = set.plans[k];
    p.router = routing::kAllModes[k];
    p.route = routes[k];
    p.utilization = encode_plan(net, p.route, horizon_s, vehicle_length_m);
    p.cost = costs.get(agent, p.router);
  }
  set.recompute_preferred();
  return set;
}

std::string baseline_log_to_csv(const std::vector<BaselineRecord>& records) {
  std::string out = "agent,router,trip_overhead\n";
  for (const BaselineRecord& r : records)
    out += r.agent + "," + routing::to_string(r.router) + "," + csv::fmt(r.trip_overhead) + "\n";
  return out;
}

std::vector<BaselineRecord> baseline_log_from_csv(const std::string& path) {
  std::vector<BaselineRecord> records;
  for (const auto& row : csv::read_file(path, "agent,router,trip_overhead")) {
    if (row.size() != 3)
      throw ParseError("baseline log '" + path + "': expected 3 fields per row");
    records.push_back({row[0], routing::mode_from_string(row[1]), csv::parse_double(row[2])});
  }
  return records;
}

std::string plan_debug_csv(const net::RoadNetwork& net, const std::vector<AgentPlanSet>& sets) {
  std::string out = "agent,plan,edge,utilization\n";
  for (const AgentPlanSet& s : sets)
    for (std::size_t k = 0; k < 3; ++k)
      for (const auto& [ei, v] : s.plans[k].utilization.entries)
        out += s.agent + "," + routing::to_string(s.plans[k].router) + "," + net.edge(ei).id +
               "," + csv::fmt(v) + "\n";
  return out;
}

}  // namespace altroute::plans
