#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "altroute/plans.hpp"

namespace altroute::collective {

/// Weights of the selection objective:
///   combined = (1 - alpha - beta) * GC + alpha * U + beta * LC
/// beta is the selfishness knob: beta = 0 optimizes only the global
/// objective, beta = 1 only each agent's own plan cost.
struct Weights {
  double alpha = 0.0;
  double beta = 0.5;
};

/// Throws ConfigError unless alpha, beta in [0,1] and alpha + beta <= 1.
void validate(const Weights& w);

/// Population variance of a vector's entries; the global cost of an
/// aggregate street-utilization vector.
double global_cost(const std::vector<double>& aggregate);

/// Mean of the selected plans' costs.
double local_cost(const std::vector<double>& selected_costs);

/// Population variance of the selected plans' costs.
double unfairness(const std::vector<double>& selected_costs);

double combined_cost(double gc, double lc, double u, const Weights& w);

/// Balanced agent hierarchy: a complete fanout-ary tree laid out in level
/// order over a seeded permutation of the agents. Deterministic per
/// (agents, seed, fanout).
struct TreeTopology {
  std::vector<std::string> agents;  // level order; agents[0] is the root
  std::vector<int> parent;          // -1 for the root
  std::vector<std::vector<int>> children;
  int fanout = 2;

  const std::string& root_id() const { return agents.front(); }
  int depth() const;
};

TreeTopology build_tree(const std::vector<std::string>& agent_ids, std::uint64_t seed,
                        int fanout = 2);

struct Selections {
  std::map<std::string, int> index_by_agent;  // agent id -> plan index in {0,1,2}
  std::vector<double> aggregate;              // element-wise sum of selected plan vectors
};

struct CostBreakdown {
  double global_cost = 0;
  double local_cost = 0;
  double unfairness = 0;
  double combined = 0;
};

/// Root-level cost trace, one entry per iteration starting with the
/// selfish bootstrap. combined is non-increasing (worsening iterations are
/// reverted).
using CostTrace = std::vector<CostBreakdown>;

struct OptimizeResult {
  Selections selections;
  CostTrace trace;
  int iterations_used = 0;  // optimization passes, excluding the bootstrap entry
};

/// Iterative plan selection over the agent tree. Each iteration runs
/// bottom-up: an agent scores its three candidates against a projected
/// aggregate (previous global response, minus its subtree's previous
/// contribution, plus its children's fresh subtree aggregates, plus the
/// candidate) and keeps the one minimizing the combined cost; the root's
/// resulting aggregate becomes the next global response. Iterations that
/// increase the root combined cost are reverted, so the returned trace is
/// non-increasing and the result is never worse than the all-preferred
/// bootstrap. Terminates after max_iterations or two consecutive
/// iterations without selection changes.
OptimizeResult optimize(const std::vector<plans::AgentPlanSet>& plan_sets, const Weights& w,
                        std::uint64_t seed, int max_iterations = 40, int fanout = 2);

/// Root-level breakdown of an arbitrary selection (selection[i] indexes
/// plan_sets[i].plans). The aggregate is summed in plan_sets order, which
/// is also how Selections::aggregate is canonicalized.
CostBreakdown evaluate_selection(const std::vector<plans::AgentPlanSet>& plan_sets,
                                 const std::vector<int>& selection, const Weights& w);

std::string selections_csv(const std::vector<plans::AgentPlanSet>& plan_sets,
                           const Selections& sel);  // agent,router,plan_cost
std::string trace_csv(const CostTrace& trace);  // iteration,global_cost,local_cost,unfairness,combined

}  // namespace altroute::collective
