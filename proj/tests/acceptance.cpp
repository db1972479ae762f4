// Acceptance suite: one pass/fail line per criterion. Run all with no
// arguments, or pass criterion numbers to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "altroute/collective.hpp"
#include "altroute/demand.hpp"
#include "altroute/experiment.hpp"
#include "altroute/mesosim.hpp"
#include "altroute/network.hpp"
#include "altroute/plans.hpp"
#include "altroute/rng.hpp"
#include "altroute/routing.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace altroute;

namespace {

constexpr std::uint64_t kMasterSeed = 2026;

struct Check {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << (detail.tellp() > 0 ? "; " : "") << "FAILED: " << what;
    }
  }
  void note(const std::string& what) {
    detail << (detail.tellp() > 0 ? "; " : "") << what;
  }
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

// --- shared fixture: the beta sweep on the 10x10 arterial grid -------------

struct BetaSweepProtocol {
  net::RoadNetwork network;
  experiment::SweepTable table;
  std::vector<double> betas;
  std::map<double, double> median_gc, median_lc;
};

const BetaSweepProtocol& beta_protocol() {
  static const BetaSweepProtocol protocol = [] {
    BetaSweepProtocol p;
    p.network = fixtures::arterial_grid10();
    experiment::Constants consts;
    experiment::TrafficSetting setting{"grid10", &p.network, nullptr, 600, 1800};
    const auto logs = experiment::run_baselines(setting, 40, kMasterSeed, consts, 0);
    const auto costs = plans::mine_router_costs(logs);
    p.betas = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0};
    p.table = experiment::beta_sweep(setting, costs, p.betas, 5, kMasterSeed, consts, 0);
    for (std::size_t bi = 0; bi < p.betas.size(); ++bi) {
      std::vector<double> gc, lc;
      for (int si = 0; si < 5; ++si) {
        const auto& row = p.table.rows[bi * 5 + static_cast<std::size_t>(si)];
        if (!row.ok()) continue;
        gc.push_back(row.global_cost);
        lc.push_back(row.local_cost);
      }
      p.median_gc[p.betas[bi]] = median_of(gc);
      p.median_lc[p.betas[bi]] = median_of(lc);
    }
    return p;
  }();
  return protocol;
}

// --- criteria ---------------------------------------------------------------

// 50 seeded random instances, alpha=0, beta=1: the optimizer must return
// exactly every agent's argmin-cost plan.
Check selfish_fixed_point() {
  Check c;
  rng::SplitMix64 gen(rng::mix_seed(kMasterSeed, "crit1"));
  for (int trial = 0; trial < 50 && c.passed; ++trial) {
    const auto sets = oracles::random_instance(1 + gen.next_below(50), 8, gen);
    const auto res = collective::optimize(sets, {0.0, 1.0}, gen.next_u64());
    for (const auto& s : sets)
      c.require(res.selections.index_by_agent.at(s.agent) == s.preferred,
                "instance " + std::to_string(trial) + ": agent " + s.agent +
                    " deviated from its preferred plan");
  }
  c.note("50/50 instances at the selfish fixed point");
  return c;
}

// 20 instances of 4..6 agents, alpha=0, beta=0: never worse than the
// all-preferred selection, traces non-increasing, gap to the 3^n optimum
// reported.
Check optimizer_oracle() {
  Check c;
  rng::SplitMix64 gen(rng::mix_seed(kMasterSeed, "crit2"));
  std::vector<double> gaps;
  int optima = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto sets = oracles::random_instance(4 + gen.next_below(3), 5, gen);
    const auto res = collective::optimize(sets, {0.0, 0.0}, gen.next_u64());

    std::vector<int> preferred;
    for (const auto& s : sets) preferred.push_back(s.preferred);
    c.require(res.trace.back().global_cost <= oracles::ref_global_cost(sets, preferred),
              "instance " + std::to_string(trial) + " lost to the selfish selection");
    for (std::size_t t = 1; t < res.trace.size(); ++t)
      c.require(res.trace[t].combined <= res.trace[t - 1].combined,
                "instance " + std::to_string(trial) + " trace increased at step " +
                    std::to_string(t));

    const auto brute = oracles::brute_force_best(sets, 0.0, 0.0);
    const double gap = res.trace.back().global_cost - brute.combined;
    c.require(gap >= -1e-12, "instance " + std::to_string(trial) + " beat the exhaustive optimum");
    gaps.push_back(std::max(0.0, gap));
    if (gap <= 1e-12) ++optima;
  }
  std::sort(gaps.begin(), gaps.end());
  std::ostringstream s;
  s << "20/20 beat-or-matched selfish, 20/20 monotone traces; exhaustive optimum hit " << optima
    << "/20, gap min/median/max = " << gaps.front() << "/" << gaps[gaps.size() / 2] << "/"
    << gaps.back();
  c.note(s.str());
  return c;
}

// 1000 random weighted tuples against direct evaluation, 1e-12.
Check combined_cost_algebra() {
  Check c;
  rng::SplitMix64 gen(rng::mix_seed(kMasterSeed, "crit3"));
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = gen.next_double();
    const double beta = (1.0 - alpha) * gen.next_double();
    const double gc = gen.next_double() * 100.0;
    const double u = gen.next_double() * 10.0;
    const double lc = gen.next_double();
    const double direct = (1.0 - alpha - beta) * gc + alpha * u + beta * lc;
    const double err = std::abs(collective::combined_cost(gc, lc, u, {alpha, beta}) - direct);
    worst = std::max(worst, err);
  }
  c.require(worst <= 1e-12, "max error " + std::to_string(worst));
  std::ostringstream s;
  s << "1000 tuples, max |error| = " << worst;
  c.note(s.str());
  return c;
}

// 25 random strongly connected networks with <= 12 nodes: route cost equals
// the exhaustive simple-path minimum for all three cost modes, bitwise
// (identical fold order on both sides).
Check routing_oracle() {
  Check c;
  rng::SplitMix64 gen(rng::mix_seed(kMasterSeed, "crit4"));
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = oracles::random_network(4 + gen.next_below(9), 8, gen);
    const int o = static_cast<int>(gen.next_below(n.edge_count()));
    const int d = static_cast<int>(gen.next_below(n.edge_count()));
    for (routing::CostMode mode : routing::kAllModes) {
      const auto route = routing::shortest_route(n, o, d, mode);
      const auto best = oracles::exhaustive_min_cost(n, o, d, mode);
      c.require(best.has_value(), "oracle found no path on a strongly connected network");
      if (!best) continue;
      const double got = oracles::path_cost(n, route.edges, mode);
      c.require(got == *best, "network " + std::to_string(trial) + " mode " +
                                  routing::to_string(mode) + ": " + std::to_string(got) +
                                  " != exhaustive minimum " + std::to_string(*best));
      ++checked;
    }
  }
  std::ostringstream s;
  s << checked << " route/mode pairs equal the exhaustive minimum, zero tolerance";
  c.note(s.str());
  return c;
}

// Median global cost falls when agents turn altruistic.
Check global_cost_trend() {
  Check c;
  const auto& p = beta_protocol();
  for (const auto& row : p.table.rows)
    c.require(row.ok(), "sweep cell failed: " + row.status);

  const double g1 = p.median_gc.at(1.0), g05 = p.median_gc.at(0.5), g0 = p.median_gc.at(0.0);
  c.require(g0 < g1, "median GC at beta=0 not strictly below beta=1");
  int inversions = 0;
  if (g05 > g1) ++inversions;
  if (g0 > g05) ++inversions;
  c.require(inversions <= 1, "more than one adjacent inversion across beta {1.0, 0.5, 0.0}");
  std::ostringstream s;
  s << "median GC beta=1: " << g1 << ", beta=0.5: " << g05 << ", beta=0: " << g0 << " ("
    << (1.0 - g0 / g1) * 100.0 << "% drop, " << inversions << " adjacent inversion(s))";
  c.note(s.str());
  return c;
}

// Local cost spikes only at complete altruism.
Check local_cost_sharp_rise() {
  Check c;
  const auto& p = beta_protocol();
  const double lc0 = p.median_lc.at(0.0), lc01 = p.median_lc.at(0.1);
  c.require(lc0 >= 1.10 * lc01, "median LC at beta=0 rose by less than 10% over beta=0.1");
  double lo = p.median_lc.at(0.1), hi = lo;
  for (double beta : p.betas) {
    if (beta < 0.1) continue;
    lo = std::min(lo, p.median_lc.at(beta));
    hi = std::max(hi, p.median_lc.at(beta));
  }
  const double rel_range = (hi - lo) / hi;  // relative range over beta in [0.1, 1.0]
  c.require(rel_range < 0.10, "median LC varies by " + std::to_string(rel_range * 100) +
                                  "% across beta in [0.1, 1.0]");
  std::ostringstream s;
  s << "median LC beta=0: " << lc0 << " vs beta=0.1: " << lc01 << " (+"
    << (lc0 / lc01 - 1.0) * 100.0 << "%); relative range over beta in [0.1,1.0] = "
    << rel_range * 100.0 << "%";
  c.note(s.str());
  return c;
}

// Load sweep: above some load L*, altruists never travel slower than
// selfish agents; far below L* the two are within 5%.
Check critical_load() {
  Check c;
  const auto network = fixtures::arterial_grid10();
  experiment::Constants consts;

  experiment::TrafficSetting mining{"grid10-mining", &network, nullptr, 1500, 1800};
  const auto logs = experiment::run_baselines(mining, 35, kMasterSeed, consts, 0);
  const auto costs = plans::mine_router_costs(logs);

  const auto result =
      experiment::load_sweep("grid10", network, costs, {}, {1.0, 0.0}, 5, 800, kMasterSeed,
                             consts, 0);
  for (const auto& row : result.table.rows)
    c.require(row.ok(), "load sweep cell failed: " + row.status);

  std::map<std::int64_t, std::pair<double, double>> by_load;  // load -> (ov at b1, ov at b0)
  for (const auto& m : result.medians) {
    auto& slot = by_load[m.load];
    (m.beta == 1.0 ? slot.first : slot.second) = m.median_overhead;
  }

  std::vector<std::int64_t> loads;
  for (const auto& [load, ov] : by_load) loads.push_back(load);
  std::sort(loads.begin(), loads.end());

  // L*: smallest load from which beta=0 stays at or below beta=1.
  std::optional<std::int64_t> l_star;
  for (auto it = loads.rbegin(); it != loads.rend(); ++it) {
    const auto [ov1, ov0] = by_load.at(*it);
    if (ov0 <= ov1) l_star = *it;
    else break;
  }
  c.require(l_star.has_value(), "no load from which altruism consistently helps");
  if (l_star) {
    for (std::int64_t load : loads) {
      if (load > *l_star / 2) continue;  // "well below" pinned to loads <= L*/2
      const auto [ov1, ov0] = by_load.at(load);
      c.require(std::abs(ov0 - ov1) / ov1 < 0.05,
                "load " + std::to_string(load) + " medians differ by >= 5%");
    }
    std::ostringstream s;
    const auto [t1, t0] = by_load.at(loads.back());
    s << "L* = " << *l_star << " (reported, not asserted); at load " << loads.back()
      << " median overhead beta=1: " << t1 << " vs beta=0: " << t0;
    c.note(s.str());
  }
  return c;
}

// Simulator invariants on a full-scale inspected run plus the degenerate
// lone-vehicle case.
Check simulator_invariants() {
  Check c;
  const auto network = fixtures::arterial_grid10();
  experiment::Constants consts;
  const auto spawnable = net::spawnable_edges(network, consts.vehicle_length_m);

  // Lone vehicle: overhead 1.0 within one tick of quantization.
  {
    const auto trips = demand::sample_trips_uniform(network, 1, rng::mix_seed(kMasterSeed, "c8"));
    const auto route =
        routing::shortest_route(network, trips[0].first, trips[0].second,
                                routing::CostMode::Balanced);
    mesosim::VehicleSpec solo{"solo", route, routing::CostMode::Balanced};
    const auto out = mesosim::run(network, {solo}, 1800, 1,
                                  mesosim::make_preferred_respawner(network, spawnable));
    c.require(out.completed_first_trips == 1, "lone vehicle failed to finish");
    if (out.completed_first_trips == 1) {
      const auto& t = out.trips.front();
      c.require(t.actual_s - t.theoretical_s >= 0 && t.actual_s - t.theoretical_s <= 1.0,
                "lone vehicle deviated from free flow by more than one tick");
      c.require(t.overhead >= 1.0, "lone vehicle overhead below 1");
    }
  }

  // Congested 600-vehicle run inspected record by record.
  {
    const auto trips =
        demand::sample_trips_uniform(network, 600, rng::mix_seed(kMasterSeed, "c8full"));
    std::vector<mesosim::VehicleSpec> specs;
    for (std::size_t k = 0; k < trips.size(); ++k) {
      const auto route = routing::shortest_route(network, trips[k].first, trips[k].second,
                                                 routing::CostMode::MinLength);
      specs.push_back({experiment::vehicle_id(k), route, routing::CostMode::MinLength});
    }
    const auto out = mesosim::run(network, specs, 1800, rng::mix_seed(kMasterSeed, "c8sim"),
                                  mesosim::make_preferred_respawner(network, spawnable));
    c.require(out.population_violations == 0, "vehicle count drifted during the run");
    std::size_t records = 0;
    for (const auto& t : out.trips) {
      if (t.overhead < 1.0)
        c.require(false, "trip with overhead " + std::to_string(t.overhead) + " for " + t.vehicle);
      ++records;
    }
    std::ostringstream s;
    s << records << " trip records with overhead >= 1; population conserved every tick "
      << "(also enforced inside every sweep run)";
    c.note(s.str());
  }
  return c;
}

// Shipped fixture statistics and the reference fleet sizes.
Check table_anchored_statistics() {
  Check c;
  const std::string path = std::string(ALTROUTE_DATA_DIR) + "/reference_net.json";
  const auto network = net::load_network(path);
  const auto s = net::network_stats(network);
  c.require(s.node_count == 4, "node count");
  c.require(s.edge_count == 6, "edge count");
  c.require(s.total_street_length_m == 6200.0, "total street length");
  c.require(s.avg_street_length_m == 6200.0 / 6.0, "average street length");
  c.require(s.max_street_length_m == 1300.0, "max street length");
  c.require(s.min_street_length_m == 800.0, "min street length");
  c.require(s.edges_per_length == 6.0 / 6200.0, "edges per length");
  c.require(s.nodes_per_length == 4.0 / 6200.0, "nodes per length");

  const auto duluth = demand::compute_fleet_size(116688, 0.744, 6);
  c.require(duluth.rounded == 14000, "Duluth fleet size");
  const auto manhattan = demand::compute_fleet_size(1002576, 0.058, 6);
  c.require(manhattan.rounded == 10000, "Manhattan fleet size");
  c.note("reference network statistics exact; fleet sizes 14000 and 10000 reproduced");
  return c;
}

// Byte-identical sweep outputs regardless of worker count.
Check determinism() {
  Check c;
  const auto network = fixtures::arterial_grid10();
  experiment::Constants consts;
  experiment::TrafficSetting setting{"grid10-det", &network, nullptr, 24, 300};
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < 24; ++k) ids.push_back(experiment::vehicle_id(k));
  const auto costs = plans::RouterCostTable::zero(ids);

  const auto beta_a = experiment::beta_sweep(setting, costs, {1.0, 0.5, 0.0}, 2, 9, consts, 1);
  const auto beta_b = experiment::beta_sweep(setting, costs, {1.0, 0.5, 0.0}, 2, 9, consts, 3);
  c.require(experiment::results_csv(beta_a) == experiment::results_csv(beta_b),
            "beta sweep differs across worker pool sizes");

  const auto load_a =
      experiment::load_sweep("grid10-det", network, costs, {6, 12}, {1.0, 0.0}, 2, 300, 9, consts, 1);
  const auto load_b =
      experiment::load_sweep("grid10-det", network, costs, {6, 12}, {1.0, 0.0}, 2, 300, 9, consts, 3);
  c.require(experiment::results_csv(load_a.table) == experiment::results_csv(load_b.table),
            "load sweep differs across worker pool sizes");
  c.require(experiment::medians_csv(load_a.medians) == experiment::medians_csv(load_b.medians),
            "load sweep medians differ across worker pool sizes");
  c.note("beta and load sweeps byte-identical with 1 and 3 workers");
  return c;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 = no stated budget
  std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "selfish fixed point", 5.0, selfish_fixed_point},
      {2, "optimizer oracle", 10.0, optimizer_oracle},
      {3, "combined cost algebra", 0.0, combined_cost_algebra},
      {4, "routing oracle", 10.0, routing_oracle},
      {5, "global cost trend", 300.0, global_cost_trend},
      {6, "local cost sharp rise", 0.0, local_cost_sharp_rise},
      {7, "critical load", 600.0, critical_load},
      {8, "simulator invariants", 0.0, simulator_invariants},
      {9, "table-anchored statistics", 0.0, table_anchored_statistics},
      {10, "determinism", 0.0, determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Check check;
    try {
      check = criterion.run();
    } catch (const std::exception& e) {
      check.passed = false;
      check.note(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criterion.budget_s > 0 && seconds > criterion.budget_s) {
      check.passed = false;
      check.note("runtime budget exceeded");
    }
    if (!check.passed) ++failures;

    std::ostringstream line;
    line << "criterion " << criterion.id << " " << (check.passed ? "PASS" : "FAIL") << " ["
         << criterion.name << "] (" << seconds << " s";
    if (criterion.budget_s > 0) line << ", budget " << criterion.budget_s << " s";
    line << "): " << check.detail.str();
    std::cout << line.str() << "\n";
  }
  std::cout << (failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << " (" << failures
            << " failing criteria)\n";
  return failures == 0 ? 0 : 1;
}
