// altroute command line: network tooling, routing, demand generation and
// the sweep harness.
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "altroute/csvio.hpp"
#include "altroute/demand.hpp"
#include "altroute/errors.hpp"
#include "altroute/experiment.hpp"
#include "altroute/mesosim.hpp"
#include "altroute/network.hpp"
#include "altroute/plans.hpp"
#include "altroute/routing.hpp"

using namespace altroute;

namespace {

experiment::SweepTable maybe_previous(const std::string& out, bool resume) {
  experiment::SweepTable previous;
  if (resume && std::filesystem::exists(out)) previous = experiment::results_from_csv(out);
  return previous;
}

plans::RouterCostTable load_costs(const std::string& costs_path, bool zero_costs,
                                  std::size_t fleet) {
  if (zero_costs) {
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < fleet; ++k) ids.push_back(experiment::vehicle_id(k));
    return plans::RouterCostTable::zero(ids);
  }
  return plans::RouterCostTable::from_csv(costs_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized route planning toolkit"};
  app.require_subcommand(1);

  // --- gen-grid ---
  auto* gen = app.add_subcommand("gen-grid", "generate a rows x cols grid network");
  int rows = 10, cols = 10, lanes = 1;
  double edge_length = 100.0, max_speed = 10.0;
  std::string gen_out = "grid.json";
  gen->add_option("--rows", rows)->check(CLI::Range(2, 10000));
  gen->add_option("--cols", cols)->check(CLI::Range(2, 10000));
  gen->add_option("--edge-length", edge_length);
  gen->add_option("--max-speed", max_speed);
  gen->add_option("--lanes", lanes);
  gen->add_option("--out", gen_out)->required();

  // --- stats ---
  auto* stats = app.add_subcommand("stats", "print network statistics as CSV");
  std::string stats_net;
  stats->add_option("--net", stats_net)->required();

  // --- route ---
  auto* route = app.add_subcommand("route", "shortest route between two edges");
  std::string route_net, route_from, route_to, route_mode = "minlength";
  route->add_option("--net", route_net)->required();
  route->add_option("--from", route_from)->required();
  route->add_option("--to", route_to)->required();
  route->add_option("--mode", route_mode)
      ->check(CLI::IsMember({"minlength", "maxspeed", "balanced"}));

  // --- demand ---
  auto* dem = app.add_subcommand("demand", "sample origin/destination pairs");
  std::string dem_net, dem_pop, dem_out = "trips.csv";
  double dem_cell = 1000.0, dem_vehicle_length = 5.0;
  std::size_t dem_n = 1000;
  std::uint64_t dem_seed = 1;
  dem->add_option("--net", dem_net)->required();
  dem->add_option("--pop", dem_pop, "population CSV; omit for uniform origins");
  dem->add_option("--cell", dem_cell);
  dem->add_option("--n", dem_n)->required();
  dem->add_option("--seed", dem_seed);
  dem->add_option("--vehicle-length", dem_vehicle_length);
  dem->add_option("--out", dem_out);

  // --- baseline ---
  auto* base = app.add_subcommand("baseline", "run baseline simulations, log trip overheads");
  std::string base_config, base_setting, base_out = "baseline.csv";
  int base_runs = 0, base_jobs = -1;
  std::uint64_t base_seed = 0;
  bool base_seed_given = false;
  base->add_option("--config", base_config)->required();
  base->add_option("--setting", base_setting)->required();
  base->add_option("--out", base_out);
  base->add_option("--runs", base_runs, "override the config's baseline_runs");
  auto* seed_opt = base->add_option("--seed", base_seed, "override the config's master_seed");
  base->add_option("--jobs", base_jobs);

  // --- mine-costs ---
  auto* mine = app.add_subcommand("mine-costs", "turn a baseline log into a router cost table");
  std::string mine_in, mine_out = "costs.csv";
  mine->add_option("--baseline", mine_in)->required();
  mine->add_option("--out", mine_out);

  // --- sweep-beta ---
  auto* sweep = app.add_subcommand("sweep-beta", "beta sweep over one traffic setting");
  std::string sweep_config, sweep_setting, sweep_costs, sweep_out = "results.csv";
  bool sweep_resume = false, sweep_zero = false;
  int sweep_jobs = -1;
  sweep->add_option("--config", sweep_config)->required();
  sweep->add_option("--setting", sweep_setting)->required();
  sweep->add_option("--costs", sweep_costs);
  sweep->add_flag("--zero-costs", sweep_zero, "use an all-zero cost table");
  sweep->add_option("--out", sweep_out);
  sweep->add_flag("--resume", sweep_resume, "reuse ok rows already in --out");
  sweep->add_option("--jobs", sweep_jobs);

  // --- sweep-load ---
  auto* loads = app.add_subcommand("sweep-load", "load sweep with uniform demand");
  std::string load_config, load_setting, load_costs_path, load_out = "load_results.csv";
  std::string load_medians = "load_medians.csv";
  bool load_resume = false, load_zero = false;
  int load_jobs = -1;
  loads->add_option("--config", load_config)->required();
  loads->add_option("--setting", load_setting)->required();
  loads->add_option("--costs", load_costs_path);
  loads->add_flag("--zero-costs", load_zero, "use an all-zero cost table");
  loads->add_option("--out", load_out);
  loads->add_option("--medians", load_medians);
  loads->add_flag("--resume", load_resume);
  loads->add_option("--jobs", load_jobs);

  // --- run-one ---
  auto* one = app.add_subcommand("run-one", "one optimized run with full artifact dumps");
  std::string one_config, one_setting, one_costs, one_dir = "run_one";
  double one_beta = 0.0;
  int one_seed_index = 0;
  bool one_zero = false, one_occupancy = false;
  one->add_option("--config", one_config)->required();
  one->add_option("--setting", one_setting)->required();
  one->add_option("--costs", one_costs);
  one->add_flag("--zero-costs", one_zero, "use an all-zero cost table");
  one->add_option("--beta", one_beta, "must be one of the config's sweep betas")->required();
  one->add_option("--seed-index", one_seed_index);
  one->add_option("--out-dir", one_dir);
  one->add_flag("--dump-occupancy", one_occupancy, "also write tick,edge,occupants samples");

  // --- normalize ---
  auto* norm = app.add_subcommand("normalize", "min-max normalize metrics across settings");
  std::vector<std::string> norm_in;
  std::string norm_out = "normalized.csv", norm_meta;
  norm->add_option("--in", norm_in)->required()->delimiter(',');
  norm->add_option("--meta", norm_meta, "metric,min,max,range CSV (default <out>.meta.csv)");
  norm->add_option("--out", norm_out);

  // --- report ---
  auto* rep = app.add_subcommand("report", "long-format plot-ready CSV");
  std::string rep_results, rep_medians, rep_out = "report.csv";
  rep->add_option("--results", rep_results)->required();
  rep->add_option("--medians", rep_medians);
  rep->add_option("--out", rep_out);

  CLI11_PARSE(app, argc, argv);
  base_seed_given = seed_opt->count() > 0;

  try {
    if (*gen) {
      net::save_network(net::generate_grid(rows, cols, edge_length, max_speed, lanes), gen_out);
      std::cout << "wrote " << gen_out << "\n";
    } else if (*stats) {
      std::cout << net::stats_csv(net::network_stats(net::load_network(stats_net)));
    } else if (*route) {
      const auto network = net::load_network(route_net);
      const auto r = routing::shortest_route(network, route_from, route_to,
                                             routing::mode_from_string(route_mode));
      std::cout << "edge,length_m,max_speed_mps,cum_length_m,cum_time_s\n";
      double cum_len = 0, cum_time = 0;
      for (int ei : r.edges) {
        const auto& e = network.edge(ei);
        cum_len += e.length_m;
        cum_time += e.length_m / e.max_speed_mps;
        std::cout << e.id << "," << csv::fmt(e.length_m) << "," << csv::fmt(e.max_speed_mps)
                  << "," << csv::fmt(cum_len) << "," << csv::fmt(cum_time) << "\n";
      }
    } else if (*dem) {
      const auto network = net::load_network(dem_net);
      std::vector<std::pair<int, int>> trips;
      if (dem_pop.empty()) {
        trips = demand::sample_trips_uniform(network, dem_n, dem_seed, dem_vehicle_length);
      } else {
        const auto records = demand::load_population_csv(dem_pop);
        const auto grid = demand::build_districts(records, network, dem_cell, dem_vehicle_length);
        if (grid.dropped_records > 0)
          std::cerr << "warning: " << grid.dropped_records
                    << " population records outside the network box were dropped\n";
        if (grid.redistributed_cells > 0)
          std::cerr << "warning: " << grid.redistributed_cells
                    << " populated districts had no spawnable street; weight redistributed\n";
        trips = demand::sample_trips(grid, network, dem_n, dem_seed);
      }
      std::string out = "origin_edge,dest_edge\n";
      for (const auto& [o, d] : trips)
        out += network.edge(o).id + "," + network.edge(d).id + "\n";
      csv::write_file(dem_out, out);
      std::cout << "wrote " << dem_out << " (" << trips.size() << " trips)\n";
    } else if (*base) {
      const auto cfg = experiment::load_config(base_config);
      const auto loaded =
          experiment::materialize(experiment::find_setting(cfg, base_setting), cfg.constants);
      const int runs = base_runs > 0 ? base_runs : cfg.baseline_runs;
      const std::uint64_t seed0 = base_seed_given ? base_seed : cfg.master_seed;
      const int jobs = base_jobs >= 0 ? base_jobs : cfg.jobs;
      const auto logs =
          experiment::run_baselines(loaded.setting(), runs, seed0, cfg.constants, jobs);
      csv::write_file(base_out, plans::baseline_log_to_csv(logs));
      std::cout << "wrote " << base_out << " (" << logs.size() << " first-trip records from "
                << runs << " runs)\n";
    } else if (*mine) {
      const auto table = plans::mine_router_costs(plans::baseline_log_from_csv(mine_in));
      csv::write_file(mine_out, table.to_csv());
      std::cout << "wrote " << mine_out << " (" << table.agent_count() << " agents)\n";
    } else if (*sweep) {
      const auto cfg = experiment::load_config(sweep_config);
      const auto loaded =
          experiment::materialize(experiment::find_setting(cfg, sweep_setting), cfg.constants);
      if (!sweep_zero && sweep_costs.empty())
        throw ConfigError("sweep-beta needs --costs or --zero-costs");
      const auto costs = load_costs(sweep_costs, sweep_zero, loaded.vehicles);
      const auto previous = maybe_previous(sweep_out, sweep_resume);
      const int jobs = sweep_jobs >= 0 ? sweep_jobs : cfg.jobs;
      const auto table = experiment::beta_sweep(loaded.setting(), costs, cfg.betas,
                                                cfg.beta_seeds, cfg.master_seed, cfg.constants,
                                                jobs, sweep_resume ? &previous : nullptr);
      csv::write_file(sweep_out, experiment::results_csv(table));
      std::cout << "wrote " << sweep_out << " (" << table.rows.size() << " rows)\n";
    } else if (*loads) {
      const auto cfg = experiment::load_config(load_config);
      const auto& spec = experiment::find_setting(cfg, load_setting);
      const auto network = net::load_network(spec.network_path);
      auto load_grid = cfg.loads;
      if (load_grid.empty())
        for (std::int64_t l = 100; l <= 1500; l += 100) load_grid.push_back(l);
      std::size_t max_load = 0;
      for (std::int64_t l : load_grid) max_load = std::max(max_load, static_cast<std::size_t>(l));
      if (!load_zero && load_costs_path.empty())
        throw ConfigError("sweep-load needs --costs or --zero-costs");
      const auto costs = load_costs(load_costs_path, load_zero, max_load);
      const auto previous = maybe_previous(load_out, load_resume);
      const int jobs = load_jobs >= 0 ? load_jobs : cfg.jobs;
      const auto result = experiment::load_sweep(
          spec.label, network, costs, load_grid, cfg.load_betas, cfg.load_seeds,
          cfg.load_horizon_ticks, cfg.master_seed, cfg.constants, jobs,
          load_resume ? &previous : nullptr);
      csv::write_file(load_out, experiment::results_csv(result.table));
      csv::write_file(load_medians, experiment::medians_csv(result.medians));
      std::cout << "wrote " << load_out << " (" << result.table.rows.size() << " rows) and "
                << load_medians << "\n";
    } else if (*one) {
      const auto cfg = experiment::load_config(one_config);
      const auto loaded =
          experiment::materialize(experiment::find_setting(cfg, one_setting), cfg.constants);
      if (!one_zero && one_costs.empty()) throw ConfigError("run-one needs --costs or --zero-costs");
      const auto costs = load_costs(one_costs, one_zero, loaded.vehicles);
      auto betas = cfg.betas;
      if (betas.empty())
        for (int k = 10; k >= 0; --k) betas.push_back(static_cast<double>(k) / 10.0);
      std::sort(betas.begin(), betas.end(), std::greater<>());
      const auto bit = std::find(betas.begin(), betas.end(), one_beta);
      if (bit == betas.end())
        throw ConfigError("--beta must be one of the config's sweep betas");
      const int bi = static_cast<int>(bit - betas.begin());
      const collective::Weights w{cfg.constants.alpha, one_beta};
      const auto run = experiment::run_setting_detailed(
          loaded.setting(), w, one_seed_index,
          experiment::demand_seed(cfg.master_seed, loaded.label, one_seed_index),
          experiment::optimizer_seed(cfg.master_seed, loaded.label, bi, one_seed_index),
          experiment::simulator_seed(cfg.master_seed, loaded.label, bi, one_seed_index), costs,
          cfg.constants, one_occupancy);
      std::filesystem::create_directories(one_dir);
      csv::write_file(one_dir + "/selections.csv",
                      collective::selections_csv(run.plan_sets, run.optimizer.selections));
      csv::write_file(one_dir + "/trace.csv", collective::trace_csv(run.optimizer.trace));
      csv::write_file(one_dir + "/trips.csv", mesosim::trip_log_csv(run.sim));
      csv::write_file(one_dir + "/plan_debug.csv",
                      plans::plan_debug_csv(loaded.network, run.plan_sets));
      if (one_occupancy)
        csv::write_file(one_dir + "/occupancy.csv",
                        mesosim::occupancy_csv(loaded.network, run.sim));
      experiment::SweepTable single;
      single.rows.push_back(run.result);
      csv::write_file(one_dir + "/result.csv", experiment::results_csv(single));
      std::cout << "wrote " << one_dir << "/{selections,trace,trips,plan_debug,result"
                << (one_occupancy ? ",occupancy" : "") << "}.csv\n";
    } else if (*norm) {
      std::vector<experiment::SweepTable> tables;
      for (const auto& path : norm_in) tables.push_back(experiment::results_from_csv(path));
      const auto merged = experiment::normalize_cross_setting(tables);
      csv::write_file(norm_out, experiment::results_csv(merged));
      const std::string meta_path = norm_meta.empty() ? norm_out + ".meta.csv" : norm_meta;
      csv::write_file(meta_path, experiment::norm_meta_csv(merged));
      std::cout << "wrote " << norm_out << " and " << meta_path << "\n";
    } else if (*rep) {
      const auto results = experiment::results_from_csv(rep_results);
      std::vector<experiment::MedianRow> medians;
      if (!rep_medians.empty()) medians = experiment::medians_from_csv(rep_medians);
      csv::write_file(rep_out, experiment::report_csv(results, medians));
      std::cout << "wrote " << rep_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
