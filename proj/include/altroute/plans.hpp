#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "altroute/network.hpp"
#include "altroute/routing.hpp"

namespace altroute::plans {

/// Sparse utilization vector over the network's global edge ordering.
/// Entries are strictly positive and sorted by edge index; every edge not
/// on the originating route is implicitly zero.
struct UtilizationVec {
  std::size_t dim = 0;
  std::vector<std::pair<int, double>> entries;

  double at(int edge_index) const;
  std::vector<double> dense() const;
};

/// Expected per-street utilization of one route over the planning horizon:
/// utilization[e] = (vehicle_length / length(e)) * min(1, travel_time(e) /
/// horizon), with travel_time at free flow. Both factors are clamped to 1;
/// clamp_count (when given) receives the number of clamped space fractions
/// (vehicle longer than street).
UtilizationVec encode_plan(const net::RoadNetwork& net, const routing::Route& route,
                           double horizon_s, double vehicle_length_m,
                           std::size_t* clamp_count = nullptr);

struct Plan {
  UtilizationVec utilization;
  double cost = 0;  // in [0,1], mined router cost
  routing::CostMode router = routing::CostMode::MinLength;
  routing::Route route;
};

/// One agent's three candidate plans, ordered [MinLength, MaxSpeed,
/// Balanced]. preferred is the argmin-cost index (ties resolve to the
/// lower router index).
struct AgentPlanSet {
  std::string agent;
  std::array<Plan, 3> plans;
  int preferred = 0;

  void recompute_preferred();
};

/// One baseline observation: the trip overhead an agent logged while
/// driving a route from the given router.
struct BaselineRecord {
  std::string agent;
  routing::CostMode router = routing::CostMode::MinLength;
  double trip_overhead = 1.0;
};

/// Mined per-(agent, router) costs, min-max normalized to [0,1] over the
/// whole table. If every mean overhead is identical the table is all zeros.
class RouterCostTable {
 public:
  void set(const std::string& agent, routing::CostMode m, double cost);
  double get(const std::string& agent, routing::CostMode m) const;  // throws MiningError
  bool has(const std::string& agent) const;
  std::size_t agent_count() const { return table_.size(); }
  const std::map<std::string, std::array<double, 3>>& rows() const { return table_; }

  std::string to_csv() const;                                // agent,router,cost
  static RouterCostTable from_csv(const std::string& path);  // throws ParseError

  /// All-zero costs for the given agents (agents indifferent between
  /// routers; preference ties resolve to MinLength).
  static RouterCostTable zero(const std::vector<std::string>& agents);

 private:
  std::map<std::string, std::array<double, 3>> table_;
};

/// Average trip overhead per (agent, router), min-max normalized over all
/// table entries. Every agent present in the log must cover all three
/// routers; gaps raise MiningError listing the missing pairs.
RouterCostTable mine_router_costs(const std::vector<BaselineRecord>& records);

/// Builds an agent's plan set: three candidate routes, encoded and priced
/// from the cost table.
AgentPlanSet make_plan_set(const net::RoadNetwork& net, const std::string& agent, int origin_edge,
                           int dest_edge, double horizon_s, double vehicle_length_m,
                           const RouterCostTable& costs);

std::string baseline_log_to_csv(const std::vector<BaselineRecord>& records);
std::vector<BaselineRecord> baseline_log_from_csv(const std::string& path);

/// Debug dump of plan vectors: agent,plan,edge,utilization rows.
std::string plan_debug_csv(const net::RoadNetwork& net, const std::vector<AgentPlanSet>& sets);

}  // namespace altroute::plans
