#include "altroute/collective.hpp"

#include <algorithm>
#include <cmath>

#include "altroute/csvio.hpp"
#include "altroute/errors.hpp"
#include "altroute/rng.hpp"

namespace altroute::collective {

void validate(const Weights& w) {
  if (!(w.alpha >= 0 && w.alpha <= 1) || !(w.beta >= 0 && w.beta <= 1))
    throw ConfigError("alpha and beta must lie in [0,1]");
  if (w.alpha + w.beta > 1.0)
    throw ConfigError("alpha + beta must not exceed 1 (got " + csv::fmt(w.alpha + w.beta) + ")");
}

double global_cost(const std::vector<double>& aggregate) {
  if (aggregate.empty()) throw ConfigError("global cost of an empty vector is undefined");
  const double n = static_cast<double>(aggregate.size());
  double mean = 0;
  for (double v : aggregate) mean += v;
  mean /= n;
  double ss = 0;
  for (double v : aggregate) ss += (v - mean) * (v - mean);
  return ss / n;
}

double local_cost(const std::vector<double>& selected_costs) {
  if (selected_costs.empty()) throw ConfigError("local cost of an empty selection is undefined");
  double s = 0;
  for (double c : selected_costs) s += c;
  return s / static_cast<double>(selected_costs.size());
}

double unfairness(const std::vector<double>& selected_costs) { return global_cost(selected_costs); }

double combined_cost(double gc, double lc, double u, const Weights& w) {
  validate(w);
  return (1.0 - w.alpha - w.beta) * gc + w.alpha * u + w.beta * lc;
}

int TreeTopology::depth() const {
  int d = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    int level = 0;
    for (int p = parent[i]; p >= 0; p = parent[static_cast<std::size_t>(p)]) ++level;
    d = std::max(d, level);
  }
  return d;
}

TreeTopology build_tree(const std::vector<std::string>& agent_ids, std::uint64_t seed,
                        int fanout) {
  if (agent_ids.empty()) throw ConfigError("cannot build a tree over zero agents");
  if (fanout < 1) throw ConfigError("tree fanout must be at least 1");

  rng::SplitMix64 gen(rng::mix_seed(seed, "tree"));
  const auto perm = rng::permutation(agent_ids.size(), gen);

  TreeTopology t;
  t.fanout = fanout;
  t.agents.reserve(agent_ids.size());
  for (std::size_t pos = 0; pos < agent_ids.size(); ++pos) t.agents.push_back(agent_ids[perm[pos]]);
  t.parent.resize(agent_ids.size());
  t.children.resize(agent_ids.size());
  for (std::size_t pos = 0; pos < agent_ids.size(); ++pos) {
    if (pos == 0) {
      t.parent[pos] = -1;
    } else {
      const int p = static_cast<int>((pos - 1) / static_cast<std::size_t>(fanout));
      t.parent[pos] = p;
      t.children[static_cast<std::size_t>(p)].push_back(static_cast<int>(pos));
    }
  }
  return t;
}

namespace {

void add_sparse(std::vector<double>& dense, const plans::UtilizationVec& v) {
  for (const auto& [i, x] : v.entries) dense[static_cast<std::size_t>(i)] += x;
}
// Cost moments of a subtree's selected plans, for the unfairness term.
struct CostMoments {
  double n = 0, sum = 0, sumsq = 0;
  void add(double c) {
    n += 1;
    sum += c;
    sumsq += c * c;
  }
  CostMoments& operator+=(const CostMoments& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
    return *this;
  }
  double variance() const {
    if (n == 0) return 0;
    const double mean = sum / n;
    return std::max(0.0, sumsq / n - mean * mean);
  }
};

}  // namespace

CostBreakdown evaluate_selection(const std::vector<plans::AgentPlanSet>& plan_sets,
                                 const std::vector<int>& selection, const Weights& w) {
  if (plan_sets.empty() || selection.size() != plan_sets.size())
    throw ConfigError("selection does not match the plan sets");
  const std::size_t dim = plan_sets.front().plans[0].utilization.dim;
  std::vector<double> aggregate(dim, 0.0);
  std::vector<double> costs;
  costs.reserve(plan_sets.size());
  for (std::size_t i = 0; i < plan_sets.size(); ++i) {
    const plans::Plan& p = plan_sets[i].plans[static_cast<std::size_t>(selection[i])];
    add_sparse(aggregate, p.utilization);
    costs.push_back(p.cost);
  }
  CostBreakdown b;
  b.global_cost = global_cost(aggregate);
  b.local_cost = local_cost(costs);
  b.unfairness = unfairness(costs);
  b.combined = combined_cost(b.global_cost, b.local_cost, b.unfairness, w);
  return b;
}

OptimizeResult optimize(const std::vector<plans::AgentPlanSet>& plan_sets, const Weights& w,
                        std::uint64_t seed, int max_iterations, int fanout) {
  validate(w);
  if (plan_sets.empty()) throw ConfigError("optimize needs at least one agent");
  if (fanout < 1 || fanout > 16)
    throw ConfigError("tree fanout must lie in [1, 16]");
  const std::size_t n = plan_sets.size();
  const std::size_t dim = plan_sets[0].plans[0].utilization.dim;
  if (dim == 0) throw ConfigError("plan vectors have zero dimension");
  for (const auto& set : plan_sets)
    for (const auto& p : set.plans)
      if (p.utilization.dim != dim)
        throw ConfigError("plan vector dimension mismatch for agent '" + set.agent + "' (" +
                          std::to_string(p.utilization.dim) + " vs " + std::to_string(dim) + ")");

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = plan_sets[i].agent;
  TreeTopology tree = build_tree(ids, seed, fanout);

  // position -> plan_sets index
  std::map<std::string, std::size_t> set_index;
  for (std::size_t i = 0; i < n; ++i) {
    if (!set_index.emplace(plan_sets[i].agent, i).second)
      throw ConfigError("duplicate agent id '" + plan_sets[i].agent + "'");
  }
  std::vector<std::size_t> agent_of(n);
  auto map_positions = [&] {
    for (std::size_t pos = 0; pos < n; ++pos) agent_of[pos] = set_index.at(tree.agents[pos]);
  };
  map_positions();

  std::vector<int> selection(n);
  for (std::size_t i = 0; i < n; ++i) selection[i] = plan_sets[i].preferred;

  CostTrace trace;
  trace.push_back(evaluate_selection(plan_sets, selection, w));

  auto canonical_aggregate = [&](const std::vector<int>& sel) {
    std::vector<double> g(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      add_sparse(g, plan_sets[i].plans[static_cast<std::size_t>(sel[i])].utilization);
    return g;
  };

  // work_sel is the state a pass starts from; it equals the kept
  // selections except right after an escape perturbation.
  std::vector<int> work_sel = selection;
  std::vector<double> global = canonical_aggregate(selection);

  const double w_gc = 1.0 - w.alpha - w.beta;
  int unchanged_streak = 0;
  int stalled_topologies = 0;
  int iterations = 0;

  std::vector<std::vector<double>> subtree_prev(n), subtree_new(n);
  std::vector<CostMoments> moments_prev(n), moments_new(n);
  std::vector<int> own_new(n);                    // per position, own plan pick
  std::vector<std::vector<bool>> accepted_child(n);  // per position, aligned to children
  std::vector<int> proposal(n);
  std::vector<double> base(dim), combo(dim);

  for (int iter = 1; iter <= max_iterations; ++iter) {
    ++iterations;

    // Previous subtree contributions (vectors and cost moments) under the
    // working selections. Level-order layout puts children at higher
    // positions than their parent, so reverse position order is
    // leaves-to-root.
    for (std::size_t p = n; p-- > 0;) {
      auto& s = subtree_prev[p];
      s.assign(dim, 0.0);
      const std::size_t ai = agent_of[p];
      add_sparse(s, plan_sets[ai].plans[static_cast<std::size_t>(work_sel[ai])].utilization);
      CostMoments m;
      m.add(plan_sets[ai].plans[static_cast<std::size_t>(work_sel[ai])].cost);
      for (int c : tree.children[p]) {
        const auto cs = static_cast<std::size_t>(c);
        for (std::size_t k = 0; k < dim; ++k) s[k] += subtree_prev[cs][k];
        m += moments_prev[cs];
      }
      moments_prev[p] = m;
    }

    // Bottom-up pass. Besides picking its own plan, each agent backs off
    // children whose fresh subtrees do not help: it scores every
    // (candidate, child accept set) pair and keeps rejected children at
    // their previous subtree state.
    for (std::size_t p = n; p-- > 0;) {
      const std::size_t ai = agent_of[p];
      const plans::AgentPlanSet& set = plan_sets[ai];
      const auto& kids = tree.children[p];
      const std::size_t n_kids = kids.size();

      // Aggregate without this agent's subtree.
      for (std::size_t k = 0; k < dim; ++k) base[k] = global[k] - subtree_prev[p][k];

      int best_cand = -1;
      unsigned best_mask = 0;
      double best_cost = 0;
      for (unsigned mask = 0; mask < (1u << n_kids); ++mask) {
        for (std::size_t k = 0; k < dim; ++k) combo[k] = base[k];
        CostMoments kid_moments;
        for (std::size_t ci = 0; ci < n_kids; ++ci) {
          const auto cs = static_cast<std::size_t>(kids[ci]);
          const bool take = (mask >> ci) & 1u;
          const auto& vec = take ? subtree_new[cs] : subtree_prev[cs];
          for (std::size_t k = 0; k < dim; ++k) combo[k] += vec[k];
          kid_moments += take ? moments_new[cs] : moments_prev[cs];
        }
        double c_sum = 0, c_sumsq = 0;
        for (std::size_t k = 0; k < dim; ++k) {
          c_sum += combo[k];
          c_sumsq += combo[k] * combo[k];
        }
        for (int cand = 0; cand < 3; ++cand) {
          const plans::Plan& plan = set.plans[static_cast<std::size_t>(cand)];
          double s1 = c_sum, s2 = c_sumsq;
          for (const auto& [ei, x] : plan.utilization.entries) {
            const double b = combo[static_cast<std::size_t>(ei)];
            s1 += x;
            s2 += 2.0 * b * x + x * x;
          }
          const double mean = s1 / static_cast<double>(dim);
          const double gc = std::max(0.0, s2 / static_cast<double>(dim) - mean * mean);
          CostMoments m = kid_moments;
          m.add(plan.cost);
          const double cost = w_gc * gc + w.alpha * m.variance() + w.beta * plan.cost;
          if (best_cand < 0 || cost < best_cost) {
            best_cand = cand;
            best_mask = mask;
            best_cost = cost;
          }
        }
      }

      own_new[p] = best_cand;
      accepted_child[p].assign(n_kids, false);
      auto& ns = subtree_new[p];
      ns.assign(dim, 0.0);
      add_sparse(ns, set.plans[static_cast<std::size_t>(best_cand)].utilization);
      CostMoments m;
      m.add(set.plans[static_cast<std::size_t>(best_cand)].cost);
      for (std::size_t ci = 0; ci < n_kids; ++ci) {
        const auto cs = static_cast<std::size_t>(kids[ci]);
        const bool take = (best_mask >> ci) & 1u;
        accepted_child[p][ci] = take;
        const auto& vec = take ? subtree_new[cs] : subtree_prev[cs];
        for (std::size_t k = 0; k < dim; ++k) ns[k] += vec[k];
        m += take ? moments_new[cs] : moments_prev[cs];
      }
      moments_new[p] = m;
    }

    // Top-down: apply new picks along accepted chains, keep reverted
    // subtrees as they were.
    {
      std::vector<std::pair<std::size_t, bool>> walk{{0, true}};
      while (!walk.empty()) {
        const auto [p, active] = walk.back();
        walk.pop_back();
        const std::size_t ai = agent_of[p];
        proposal[ai] = active ? own_new[p] : work_sel[ai];
        for (std::size_t ci = 0; ci < tree.children[p].size(); ++ci)
          walk.push_back({static_cast<std::size_t>(tree.children[p][ci]),
                          active && accepted_child[p][ci]});
      }
    }

    const CostBreakdown candidate = evaluate_selection(plan_sets, proposal, w);
    const bool accepted = !(candidate.combined > trace.back().combined);
    bool unchanged;
    if (accepted) {
      unchanged = (proposal == selection);
      selection = proposal;
      trace.push_back(candidate);
      // Canonical aggregate: recomputed in plan_sets order so that
      // re-summing the selected vectors reproduces it bit for bit.
      work_sel = selection;
      global = canonical_aggregate(selection);
    } else {
      unchanged = true;  // reverted: the kept selections stand
      const CostBreakdown kept = trace.back();
      trace.push_back(kept);
      work_sel = selection;
      global = canonical_aggregate(selection);
    }

    unchanged_streak = unchanged ? unchanged_streak + 1 : 0;
    if (unchanged_streak >= 2) {
      // The current topology is exhausted. Self-organize into a fresh
      // tree and restart the pass from a seeded perturbation of the kept
      // state; the revert rule discards escapes that do not pay off.
      // Converged for good once several escapes in a row change nothing.
      ++stalled_topologies;
      if (stalled_topologies >= 12 || iter >= max_iterations) break;
      tree = build_tree(ids, rng::mix_seed(seed, "reorganize", static_cast<std::uint64_t>(iter)),
                        fanout);
      map_positions();
      rng::SplitMix64 perturb(rng::mix_seed(seed, "perturb", static_cast<std::uint64_t>(iter)));
      for (std::size_t i = 0; i < n; ++i)
        if (perturb.next_below(3) == 0) work_sel[i] = static_cast<int>(perturb.next_below(3));
      global = canonical_aggregate(work_sel);
      unchanged_streak = 0;
    } else if (!unchanged) {
      stalled_topologies = 0;
    }
  }

  OptimizeResult result;
  result.iterations_used = iterations;
  result.trace = std::move(trace);
  result.selections.aggregate.assign(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    result.selections.index_by_agent[plan_sets[i].agent] = selection[i];
    add_sparse(result.selections.aggregate,
               plan_sets[i].plans[static_cast<std::size_t>(selection[i])].utilization);
  }
  return result;
}

std::string selections_csv(const std::vector<plans::AgentPlanSet>& plan_sets,
                           const Selections& sel) {
  std::string out = "agent,router,plan_cost\n";
  for (const auto& set : plan_sets) {
    const int k = sel.index_by_agent.at(set.agent);
    const plans::Plan& p = set.plans[static_cast<std::size_t>(k)];
    out += set.agent + "," + routing::to_string(p.router) + "," + csv::fmt(p.cost) + "\n";
  }
  return out;
}

std::string trace_csv(const CostTrace& trace) {
  std::string out = "iteration,global_cost,local_cost,unfairness,combined\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out += std::to_string(i) + "," + csv::fmt(trace[i].global_cost) + "," +
           csv::fmt(trace[i].local_cost) + "," + csv::fmt(trace[i].unfairness) + "," +
           csv::fmt(trace[i].combined) + "\n";
  return out;
}

}  // namespace altroute::collective
