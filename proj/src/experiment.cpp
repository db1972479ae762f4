#include "altroute/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "altroute/csvio.hpp"
#include "altroute/errors.hpp"
#include "altroute/rng.hpp"
#include "json.hpp"

namespace altroute::experiment {

std::uint64_t demand_seed(std::uint64_t master, const std::string& label, int seed_index) {
  return rng::SeedMixer(master).mix(label).mix("demand").mix(static_cast<std::uint64_t>(seed_index)).seed();
}

std::uint64_t demand_seed_load(std::uint64_t master, const std::string& label, std::int64_t load,
                               int seed_index) {
  return rng::SeedMixer(master)
      .mix(label)
      .mix("demand")
      .mix(static_cast<std::uint64_t>(load))
      .mix(static_cast<std::uint64_t>(seed_index))
      .seed();
}

std::uint64_t optimizer_seed(std::uint64_t master, const std::string& label, int beta_index,
                             int seed_index) {
  return rng::SeedMixer(master)
      .mix(label)
      .mix("optimize")
      .mix(static_cast<std::uint64_t>(beta_index))
      .mix(static_cast<std::uint64_t>(seed_index))
      .seed();
}

std::uint64_t simulator_seed(std::uint64_t master, const std::string& label, int beta_index,
                             int seed_index) {
  return rng::SeedMixer(master)
      .mix(label)
      .mix("simulate")
      .mix(static_cast<std::uint64_t>(beta_index))
      .mix(static_cast<std::uint64_t>(seed_index))
      .seed();
}

std::uint64_t baseline_seed(std::uint64_t seed0, const std::string& label, int run_index) {
  return rng::SeedMixer(seed0).mix(label).mix("baseline").mix(static_cast<std::uint64_t>(run_index)).seed();
}

std::string vehicle_id(std::size_t k) {
  std::string digits = std::to_string(k);
  while (digits.size() < 4) digits.insert(digits.begin(), '0');
  return "v" + digits;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[") + name + "] " + e.what());
  }
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::pair<int, int>> sample_for(const TrafficSetting& s, std::uint64_t seed,
                                            const Constants& consts) {
  if (s.districts) return demand::sample_trips(*s.districts, *s.network, s.vehicle_count, seed);
  return demand::sample_trips_uniform(*s.network, s.vehicle_count, seed, consts.vehicle_length_m);
}

mesosim::SimConfig sim_config(const Constants& c) {
  mesosim::SimConfig cfg;
  cfg.vehicle_length_m = c.vehicle_length_m;
  cfg.min_gap_m = c.min_gap_m;
  cfg.tick_seconds = c.tick_seconds;
  return cfg;
}

const RunResult* find_previous(const SweepTable* previous, const std::string& setting,
                               double beta, int seed_index) {
  if (!previous) return nullptr;
  for (const RunResult& r : previous->rows)
    if (r.ok() && r.setting == setting && r.beta == beta && r.seed_index == seed_index) return &r;
  return nullptr;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<plans::BaselineRecord> run_baselines(const TrafficSetting& setting, int n_runs,
                                                 std::uint64_t seed0, const Constants& consts,
                                                 int jobs) {
  if (n_runs < 1) throw ConfigError("baseline run count must be at least 1");
  if (!setting.network) throw ConfigError("setting '" + setting.label + "' has no network");
  const net::RoadNetwork& network = *setting.network;
  const std::vector<int> spawnable = net::spawnable_edges(network, consts.vehicle_length_m);

  std::vector<std::vector<plans::BaselineRecord>> per_run(static_cast<std::size_t>(n_runs));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_runs));

  parallel_for(static_cast<std::size_t>(n_runs), jobs, [&](std::size_t r) {
    try {
      const std::uint64_t run_seed = baseline_seed(seed0, setting.label, static_cast<int>(r));
      const auto trips = sample_for(setting, rng::mix_seed(run_seed, "demand"), consts);

      rng::SplitMix64 router_gen(rng::mix_seed(run_seed, "routers"));
      std::vector<mesosim::VehicleSpec> specs(trips.size());
      std::vector<routing::CostMode> assigned(trips.size());
      for (std::size_t k = 0; k < trips.size(); ++k) {
        assigned[k] = routing::kAllModes[router_gen.next_below(3)];
        specs[k].id = vehicle_id(k);
        specs[k].preferred = assigned[k];
        specs[k].route =
            routing::shortest_route(network, trips[k].first, trips[k].second, assigned[k]);
      }

      // Baseline respawns draw a fresh random router for every new trip.
      auto respawn = [&network, &spawnable](const mesosim::VehicleSpec& spec, int current,
                                            rng::SplitMix64& gen) {
        for (int attempt = 0; attempt < 100; ++attempt) {
          const int dest = spawnable[gen.next_below(spawnable.size())];
          if (dest == current) continue;
          const routing::CostMode mode = routing::kAllModes[gen.next_below(3)];
          return routing::shortest_route(network, current, dest, mode);
        }
        throw DemandError("baseline respawn for '" + spec.id + "' exhausted 100 draws");
      };

      const mesosim::SimOutput out = mesosim::run(network, specs, setting.horizon_ticks,
                                                  rng::mix_seed(run_seed, "sim"), respawn,
                                                  sim_config(consts));
      std::map<std::string, std::size_t> index_of;
      for (std::size_t k = 0; k < specs.size(); ++k) index_of[specs[k].id] = k;
      for (const mesosim::TripRecord& t : out.trips)
        if (t.trip_index == 0)
          per_run[r].push_back({t.vehicle, assigned[index_of.at(t.vehicle)], t.overhead});
    } catch (...) {
      failures[r] = std::current_exception();
    }
  });

  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<plans::BaselineRecord> merged;
  for (auto& run : per_run)
    merged.insert(merged.end(), run.begin(), run.end());
  return merged;
}

DetailedRun run_setting_detailed(const TrafficSetting& setting, const collective::Weights& w,
                                 int seed_index, std::uint64_t dem_seed, std::uint64_t opt_seed,
                                 std::uint64_t sim_seed, const plans::RouterCostTable& costs,
                                 const Constants& consts, bool record_occupancy) {
  collective::validate(w);
  if (!setting.network) throw ConfigError("setting '" + setting.label + "' has no network");
  const net::RoadNetwork& network = *setting.network;

  DetailedRun run;
  RunResult& res = run.result;
  res.setting = setting.label;
  res.beta = w.beta;
  res.alpha = w.alpha;
  res.seed_index = seed_index;

  const auto trips = stage("demand", [&] { return sample_for(setting, dem_seed, consts); });

  const double horizon_s = static_cast<double>(setting.horizon_ticks) * consts.tick_seconds;
  run.plan_sets.resize(trips.size());
  stage("plans", [&] {
    for (std::size_t k = 0; k < trips.size(); ++k)
      run.plan_sets[k] = plans::make_plan_set(network, vehicle_id(k), trips[k].first,
                                              trips[k].second, horizon_s,
                                              consts.vehicle_length_m, costs);
    return 0;
  });

  run.optimizer = stage("optimize", [&] {
    return collective::optimize(run.plan_sets, w, opt_seed, consts.max_iterations, consts.fanout);
  });
  res.local_cost = run.optimizer.trace.back().local_cost;
  res.global_cost = run.optimizer.trace.back().global_cost;
  res.iterations = run.optimizer.iterations_used;
  res.router_fractions = router_distribution(run.plan_sets, run.optimizer.selections);

  run.sim = stage("simulate", [&] {
    std::vector<mesosim::VehicleSpec> specs(run.plan_sets.size());
    for (std::size_t k = 0; k < run.plan_sets.size(); ++k) {
      const auto& set = run.plan_sets[k];
      const int sel = run.optimizer.selections.index_by_agent.at(set.agent);
      specs[k].id = set.agent;
      specs[k].route = set.plans[static_cast<std::size_t>(sel)].route;
      specs[k].preferred = set.plans[static_cast<std::size_t>(set.preferred)].router;
    }
    const std::vector<int> spawnable = net::spawnable_edges(network, consts.vehicle_length_m);
    mesosim::SimConfig cfg = sim_config(consts);
    cfg.record_occupancy = record_occupancy;
    mesosim::SimOutput o = mesosim::run(network, specs, setting.horizon_ticks, sim_seed,
                                        mesosim::make_preferred_respawner(network, spawnable),
                                        cfg);
    if (o.population_violations > 0)
      throw SimError("vehicle conservation violated in " +
                     std::to_string(o.population_violations) + " ticks");
    return o;
  });

  stage("metrics", [&] {
    const auto mean = mesosim::mean_first_trip_overhead(run.sim);
    if (!mean)
      throw SimError("no first trip completed within " +
                     std::to_string(setting.horizon_ticks) + " ticks");
    res.mean_overhead = *mean;
    return 0;
  });

  return run;
}

RunResult run_setting(const TrafficSetting& setting, const collective::Weights& w, int seed_index,
                      std::uint64_t dem_seed, std::uint64_t opt_seed, std::uint64_t sim_seed,
                      const plans::RouterCostTable& costs, const Constants& consts) {
  return run_setting_detailed(setting, w, seed_index, dem_seed, opt_seed, sim_seed, costs, consts)
      .result;
}

SweepTable beta_sweep(const TrafficSetting& setting, const plans::RouterCostTable& costs,
                      std::vector<double> betas, int n_seeds, std::uint64_t master_seed,
                      const Constants& consts, int jobs, const SweepTable* previous) {
  if (betas.empty()) {
    for (int k = 10; k >= 0; --k) betas.push_back(static_cast<double>(k) / 10.0);
  }
  std::sort(betas.begin(), betas.end(), std::greater<>());
  if (n_seeds < 1) throw ConfigError("beta sweep needs at least one seed");

  const std::size_t cells = betas.size() * static_cast<std::size_t>(n_seeds);
  SweepTable table;
  table.rows.resize(cells);

  parallel_for(cells, jobs, [&](std::size_t cell) {
    const int bi = static_cast<int>(cell) / n_seeds;
    const int si = static_cast<int>(cell) % n_seeds;
    const collective::Weights w{consts.alpha, betas[static_cast<std::size_t>(bi)]};
    if (const RunResult* done = find_previous(previous, setting.label, w.beta, si)) {
      table.rows[cell] = *done;
      return;
    }
    try {
      table.rows[cell] = run_setting(setting, w, si, demand_seed(master_seed, setting.label, si),
                                     optimizer_seed(master_seed, setting.label, bi, si),
                                     simulator_seed(master_seed, setting.label, bi, si), costs,
                                     consts);
    } catch (const std::exception& e) {
      RunResult failed;
      failed.setting = setting.label;
      failed.beta = w.beta;
      failed.alpha = w.alpha;
      failed.seed_index = si;
      failed.status = "failed " + sanitize(e.what());
      table.rows[cell] = std::move(failed);
    }
  });
  return table;
}

LoadSweepResult load_sweep(const std::string& label, const net::RoadNetwork& network,
                           const plans::RouterCostTable& costs, std::vector<std::int64_t> loads,
                           std::vector<double> betas, int n_seeds, std::int64_t horizon_ticks,
                           std::uint64_t master_seed, const Constants& consts, int jobs,
                           const SweepTable* previous) {
  if (loads.empty())
    for (std::int64_t l = 100; l <= 1500; l += 100) loads.push_back(l);
  if (betas.empty()) betas = {1.0, 0.0};
  std::sort(loads.begin(), loads.end());
  std::sort(betas.begin(), betas.end(), std::greater<>());
  if (n_seeds < 1) throw ConfigError("load sweep needs at least one seed");

  auto load_label = [&](std::int64_t load) {
    std::string digits = std::to_string(load);
    while (digits.size() < 4) digits.insert(digits.begin(), '0');
    return label + "-load" + digits;
  };

  const std::size_t per_load = betas.size() * static_cast<std::size_t>(n_seeds);
  const std::size_t cells = loads.size() * per_load;
  LoadSweepResult result;
  result.table.rows.resize(cells);

  parallel_for(cells, jobs, [&](std::size_t cell) {
    const std::size_t li = cell / per_load;
    const std::size_t rest = cell % per_load;
    const int bi = static_cast<int>(rest) / n_seeds;
    const int si = static_cast<int>(rest) % n_seeds;
    const std::int64_t load = loads[li];
    const collective::Weights w{consts.alpha, betas[static_cast<std::size_t>(bi)]};

    TrafficSetting setting;
    setting.label = load_label(load);
    setting.network = &network;
    setting.districts = nullptr;  // uniform origins and destinations
    setting.vehicle_count = static_cast<std::size_t>(load);
    setting.horizon_ticks = horizon_ticks;

    if (const RunResult* done = find_previous(previous, setting.label, w.beta, si)) {
      RunResult row = *done;
      row.load = load;
      result.table.rows[cell] = std::move(row);
      return;
    }
    try {
      RunResult row = run_setting(setting, w, si, demand_seed_load(master_seed, label, load, si),
                                  optimizer_seed(master_seed, setting.label, bi, si),
                                  simulator_seed(master_seed, setting.label, bi, si), costs,
                                  consts);
      row.load = load;
      result.table.rows[cell] = std::move(row);
    } catch (const std::exception& e) {
      RunResult failed;
      failed.setting = setting.label;
      failed.beta = w.beta;
      failed.alpha = w.alpha;
      failed.seed_index = si;
      failed.load = load;
      failed.status = "failed " + sanitize(e.what());
      result.table.rows[cell] = std::move(failed);
    }
  });

  for (std::size_t li = 0; li < loads.size(); ++li)
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      std::vector<double> over, glob, loc;
      for (int si = 0; si < n_seeds; ++si) {
        const RunResult& row =
            result.table.rows[li * per_load + bi * static_cast<std::size_t>(n_seeds) +
                              static_cast<std::size_t>(si)];
        if (!row.ok()) continue;
        over.push_back(row.mean_overhead);
        glob.push_back(row.global_cost);
        loc.push_back(row.local_cost);
      }
      MedianRow m;
      m.setting = label;
      m.load = loads[li];
      m.beta = betas[bi];
      m.median_overhead = median(over);
      m.median_global = median(glob);
      m.median_local = median(loc);
      result.medians.push_back(m);
    }
  return result;
}

SweepTable normalize_cross_setting(const std::vector<SweepTable>& tables) {
  if (tables.empty()) throw ConfigError("normalize needs at least one table");
  SweepTable out;
  for (const SweepTable& t : tables)
    out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());

  struct Extract {
    const char* name;
    double RunResult::* raw;
    double RunResult::* norm;
  };
  const Extract metrics[] = {{"local_cost", &RunResult::local_cost, &RunResult::norm_local},
                             {"global_cost", &RunResult::global_cost, &RunResult::norm_global},
                             {"mean_overhead", &RunResult::mean_overhead, &RunResult::norm_overhead}};

  for (const Extract& m : metrics) {
    bool any = false;
    MetricRange range;
    for (const RunResult& r : out.rows) {
      if (!r.ok() || !std::isfinite(r.*(m.raw))) continue;
      const double v = r.*(m.raw);
      if (!any) {
        range.min = range.max = v;
        any = true;
      } else {
        range.min = std::min(range.min, v);
        range.max = std::max(range.max, v);
      }
    }
    if (!any) continue;
    out.meta[m.name] = range;
    for (RunResult& r : out.rows) {
      if (!r.ok() || !std::isfinite(r.*(m.raw))) continue;
      r.*(m.norm) = range.range() > 0 ? (r.*(m.raw) - range.min) / range.range() : 0.0;
    }
  }
  out.normalized = true;
  return out;
}

std::array<double, 3> router_distribution(const std::vector<plans::AgentPlanSet>& plan_sets,
                                          const collective::Selections& sel) {
  if (plan_sets.empty()) throw ConfigError("router distribution of an empty selection");
  std::array<double, 3> counts{0, 0, 0};
  for (const auto& set : plan_sets) {
    const int k = sel.index_by_agent.at(set.agent);
    counts[static_cast<std::size_t>(k)] += 1;
  }
  for (double& c : counts) c /= static_cast<double>(plan_sets.size());
  return counts;
}

// --- CSV --------------------------------------------------------------------

std::string results_csv(const SweepTable& table) {
  std::string out = std::string(kResultsHeader);
  if (table.normalized) out += ",norm_local_cost,norm_global_cost,norm_mean_overhead";
  out += "\n";
  for (const RunResult& r : table.rows) {
    out += r.setting + "," + csv::fmt(r.beta) + "," + csv::fmt(r.alpha) + "," +
           std::to_string(r.seed_index) + "," + csv::fmt(r.local_cost) + "," +
           csv::fmt(r.global_cost) + "," + csv::fmt(r.mean_overhead) + "," +
           csv::fmt(r.router_fractions[0]) + "," + csv::fmt(r.router_fractions[1]) + "," +
           csv::fmt(r.router_fractions[2]) + "," + std::to_string(r.iterations) + "," + r.status;
    if (table.normalized)
      out += "," + csv::fmt(r.norm_local) + "," + csv::fmt(r.norm_global) + "," +
             csv::fmt(r.norm_overhead);
    out += "\n";
  }
  return out;
}

SweepTable results_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open results file '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw ParseError("'" + path + "' is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::string plain = kResultsHeader;
  const std::string with_norm = plain + ",norm_local_cost,norm_global_cost,norm_mean_overhead";
  bool normalized;
  if (header == plain)
    normalized = false;
  else if (header == with_norm)
    normalized = true;
  else
    throw ParseError("'" + path + "' has an unexpected header");

  SweepTable table;
  table.normalized = normalized;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_line(line);
    const std::size_t expected = normalized ? 15 : 12;
    if (f.size() != expected)
      throw ParseError("'" + path + "': row with " + std::to_string(f.size()) + " fields");
    RunResult r;
    r.setting = f[0];
    r.beta = csv::parse_double(f[1]);
    r.alpha = csv::parse_double(f[2]);
    r.seed_index = static_cast<int>(csv::parse_int(f[3]));
    r.local_cost = csv::parse_double(f[4]);
    r.global_cost = csv::parse_double(f[5]);
    r.mean_overhead = csv::parse_double(f[6]);
    r.router_fractions = {csv::parse_double(f[7]), csv::parse_double(f[8]),
                          csv::parse_double(f[9])};
    r.iterations = static_cast<int>(csv::parse_int(f[10]));
    r.status = f[11];
    if (normalized) {
      r.norm_local = csv::parse_double(f[12]);
      r.norm_global = csv::parse_double(f[13]);
      r.norm_overhead = csv::parse_double(f[14]);
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::string medians_csv(const std::vector<MedianRow>& medians) {
  std::string out = std::string(kMediansHeader) + "\n";
  for (const MedianRow& m : medians)
    out += m.setting + "," + std::to_string(m.load) + "," + csv::fmt(m.beta) + "," +
           csv::fmt(m.median_overhead) + "," + csv::fmt(m.median_global) + "," +
           csv::fmt(m.median_local) + "\n";
  return out;
}

std::vector<MedianRow> medians_from_csv(const std::string& path) {
  std::vector<MedianRow> out;
  for (const auto& f : csv::read_file(path, kMediansHeader)) {
    if (f.size() != 6) throw ParseError("'" + path + "': expected 6 fields per median row");
    MedianRow m;
    m.setting = f[0];
    m.load = csv::parse_int(f[1]);
    m.beta = csv::parse_double(f[2]);
    m.median_overhead = csv::parse_double(f[3]);
    m.median_global = csv::parse_double(f[4]);
    m.median_local = csv::parse_double(f[5]);
    out.push_back(std::move(m));
  }
  return out;
}

std::string norm_meta_csv(const SweepTable& table) {
  std::string out = "metric,min,max,range\n";
  for (const auto& [name, r] : table.meta)
    out += name + "," + csv::fmt(r.min) + "," + csv::fmt(r.max) + "," + csv::fmt(r.range()) + "\n";
  return out;
}

std::string report_csv(const SweepTable& results, const std::vector<MedianRow>& medians) {
  std::string out = "setting,load,beta,seed,metric,value,normalized\n";
  struct Col {
    const char* name;
    double RunResult::* raw;
    double RunResult::* norm;
  };
  const Col cols[] = {{"local_cost", &RunResult::local_cost, &RunResult::norm_local},
                      {"global_cost", &RunResult::global_cost, &RunResult::norm_global},
                      {"mean_overhead", &RunResult::mean_overhead, &RunResult::norm_overhead}};
  const char* fracs[] = {"frac_minlength", "frac_maxspeed", "frac_balanced"};
  for (const RunResult& r : results.rows) {
    if (!r.ok()) continue;
    const std::string prefix = r.setting + "," + (r.load >= 0 ? std::to_string(r.load) : "") +
                               "," + csv::fmt(r.beta) + "," + std::to_string(r.seed_index) + ",";
    for (const Col& c : cols) {
      out += prefix + c.name + "," + csv::fmt(r.*(c.raw)) + ",";
      if (results.normalized && std::isfinite(r.*(c.norm))) out += csv::fmt(r.*(c.norm));
      out += "\n";
    }
    for (std::size_t k = 0; k < 3; ++k)
      out += prefix + fracs[k] + "," + csv::fmt(r.router_fractions[k]) + ",\n";
  }
  for (const MedianRow& m : medians) {
    const std::string prefix =
        m.setting + "," + std::to_string(m.load) + "," + csv::fmt(m.beta) + ",,";
    out += prefix + "median_overhead," + csv::fmt(m.median_overhead) + ",\n";
    out += prefix + "median_global," + csv::fmt(m.median_global) + ",\n";
    out += prefix + "median_local," + csv::fmt(m.median_local) + ",\n";
  }
  return out;
}

// --- config -----------------------------------------------------------------

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }

  Config cfg;
  try {
    if (doc.contains("constants")) {
      const auto& c = doc["constants"];
      cfg.constants.vehicle_length_m = c.value("vehicle_length_m", cfg.constants.vehicle_length_m);
      cfg.constants.min_gap_m = c.value("min_gap_m", cfg.constants.min_gap_m);
      cfg.constants.tick_seconds = c.value("tick_seconds", cfg.constants.tick_seconds);
      cfg.constants.alpha = c.value("alpha", cfg.constants.alpha);
      cfg.constants.fanout = c.value("fanout", cfg.constants.fanout);
      cfg.constants.max_iterations = c.value("max_iterations", cfg.constants.max_iterations);
    }
    for (const auto& js : doc.value("settings", nlohmann::json::array())) {
      SettingSpec s;
      s.label = js.at("label").get<std::string>();
      s.network_path = js.at("network").get<std::string>();
      s.population_path = js.value("population", std::string{});
      s.vehicles = js.at("vehicles").get<std::size_t>();
      s.horizon_ticks = js.value("horizon_ticks", s.horizon_ticks);
      s.cell_size_m = js.value("cell_size_m", s.cell_size_m);
      cfg.settings.push_back(std::move(s));
    }
    if (doc.contains("beta_sweep")) {
      const auto& b = doc["beta_sweep"];
      for (const auto& v : b.value("betas", nlohmann::json::array()))
        cfg.betas.push_back(v.get<double>());
      cfg.beta_seeds = b.value("seeds", cfg.beta_seeds);
    }
    if (doc.contains("load_sweep")) {
      const auto& l = doc["load_sweep"];
      for (const auto& v : l.value("loads", nlohmann::json::array()))
        cfg.loads.push_back(v.get<std::int64_t>());
      for (const auto& v : l.value("betas", nlohmann::json::array()))
        cfg.load_betas.push_back(v.get<double>());
      cfg.load_seeds = l.value("seeds", cfg.load_seeds);
      cfg.load_horizon_ticks = l.value("horizon_ticks", cfg.load_horizon_ticks);
    }
    cfg.baseline_runs = doc.value("baseline_runs", cfg.baseline_runs);
    cfg.master_seed = doc.value("master_seed", cfg.master_seed);
    cfg.jobs = doc.value("jobs", cfg.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  return cfg;
}

const SettingSpec& find_setting(const Config& cfg, const std::string& label) {
  for (const SettingSpec& s : cfg.settings)
    if (s.label == label) return s;
  throw ConfigError("config has no setting labelled '" + label + "'");
}

LoadedSetting materialize(const SettingSpec& spec, const Constants& consts) {
  LoadedSetting ls;
  ls.label = spec.label;
  ls.vehicles = spec.vehicles;
  ls.horizon_ticks = spec.horizon_ticks;
  ls.network = net::load_network(spec.network_path);
  if (!spec.population_path.empty()) {
    const auto records = demand::load_population_csv(spec.population_path);
    ls.districts =
        demand::build_districts(records, ls.network, spec.cell_size_m, consts.vehicle_length_m);
    ls.has_districts = true;
  }
  return ls;
}

}  // namespace altroute::experiment
