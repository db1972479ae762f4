#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "altroute/collective.hpp"
#include "altroute/demand.hpp"
#include "altroute/mesosim.hpp"
#include "altroute/network.hpp"
#include "altroute/plans.hpp"

namespace altroute::experiment {

/// Run-wide constants shared by the simulator and the optimizer.
struct Constants {
  double vehicle_length_m = 5.0;
  double min_gap_m = 2.5;
  double tick_seconds = 1.0;
  double alpha = 0.0;
  int fanout = 2;
  int max_iterations = 40;
};

/// A traffic setting: one network and one fleet size (plus the demand
/// model and horizon used with them).
struct TrafficSetting {
  std::string label;
  const net::RoadNetwork* network = nullptr;
  const demand::DistrictGrid* districts = nullptr;  // null: uniform origins
  std::size_t vehicle_count = 1;
  std::int64_t horizon_ticks = 1800;
};

struct RunResult {
  std::string setting;
  double beta = 0;
  double alpha = 0;
  int seed_index = 0;
  std::int64_t load = -1;  // load-sweep bookkeeping; not serialized
  double local_cost = std::numeric_limits<double>::quiet_NaN();
  double global_cost = std::numeric_limits<double>::quiet_NaN();
  double mean_overhead = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 3> router_fractions{0, 0, 0};  // MinLength, MaxSpeed, Balanced
  int iterations = 0;
  std::string status = "ok";
  // Filled by normalize_cross_setting.
  double norm_local = std::numeric_limits<double>::quiet_NaN();
  double norm_global = std::numeric_limits<double>::quiet_NaN();
  double norm_overhead = std::numeric_limits<double>::quiet_NaN();

  bool ok() const { return status == "ok"; }
};

struct MetricRange {
  double min = 0;
  double max = 0;
  double range() const { return max - min; }
};

struct SweepTable {
  std::vector<RunResult> rows;
  bool normalized = false;
  std::map<std::string, MetricRange> meta;  // per metric, set by normalization
};

struct MedianRow {
  std::string setting;
  std::int64_t load = 0;
  double beta = 0;
  double median_overhead = 0;
  double median_global = 0;
  double median_local = 0;
};

// --- seed splitting -------------------------------------------------------
// Cell seeds derive from the master seed via hash64(master, fields...)
// (FNV-1a + SplitMix64 finalizer, see rng.hpp). The demand seed does not
// depend on beta, so runs with the same seed index share their trip sample
// across beta values and comparisons are paired.
std::uint64_t demand_seed(std::uint64_t master, const std::string& label, int seed_index);
std::uint64_t demand_seed_load(std::uint64_t master, const std::string& label, std::int64_t load,
                               int seed_index);
std::uint64_t optimizer_seed(std::uint64_t master, const std::string& label, int beta_index,
                             int seed_index);
std::uint64_t simulator_seed(std::uint64_t master, const std::string& label, int beta_index,
                             int seed_index);
std::uint64_t baseline_seed(std::uint64_t seed0, const std::string& label, int run_index);

/// Zero-padded fleet member id ("v0000"); stable across fleet sizes so a
/// cost table mined at one load covers every smaller load.
std::string vehicle_id(std::size_t k);

/// Bounded worker pool; jobs <= 0 means hardware concurrency. fn(i) must
/// not throw. Results must be written to slot i only, which keeps output
/// independent of scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Baseline runs: every vehicle drives a uniformly random router (fresh
/// draw each respawn too), no optimizer. Logs (agent, first-trip router,
/// overhead) for completed first trips.
std::vector<plans::BaselineRecord> run_baselines(const TrafficSetting& setting, int n_runs,
                                                 std::uint64_t seed0, const Constants& consts,
                                                 int jobs = 0);

/// One optimized run: sample trips, build plan sets, optimize once at t=0,
/// simulate the selected routes, aggregate metrics. Throws with stage
/// attribution ([demand], [plans], [optimize], [simulate], [metrics]).
RunResult run_setting(const TrafficSetting& setting, const collective::Weights& w, int seed_index,
                      std::uint64_t dem_seed, std::uint64_t opt_seed, std::uint64_t sim_seed,
                      const plans::RouterCostTable& costs, const Constants& consts);

/// run_setting plus every intermediate artifact, for inspection dumps.
struct DetailedRun {
  RunResult result;
  std::vector<plans::AgentPlanSet> plan_sets;
  collective::OptimizeResult optimizer;
  mesosim::SimOutput sim;
};

DetailedRun run_setting_detailed(const TrafficSetting& setting, const collective::Weights& w,
                                 int seed_index, std::uint64_t dem_seed, std::uint64_t opt_seed,
                                 std::uint64_t sim_seed, const plans::RouterCostTable& costs,
                                 const Constants& consts, bool record_occupancy = false);

/// Full beta sweep: len(betas) x n_seeds runs, rows ordered by (beta desc,
/// seed asc). Failed cells become flagged rows, never abort the sweep.
/// previous (when given) resumes: cells already ok in it are copied
/// instead of recomputed.
SweepTable beta_sweep(const TrafficSetting& setting, const plans::RouterCostTable& costs,
                      std::vector<double> betas, int n_seeds, std::uint64_t master_seed,
                      const Constants& consts, int jobs = 0,
                      const SweepTable* previous = nullptr);

struct LoadSweepResult {
  SweepTable table;                // rows labelled "<label>-load<load>"
  std::vector<MedianRow> medians;  // per (load, beta), over the seeds
};

/// Load sweep with uniform origins and destinations; betas default {0,1}.
LoadSweepResult load_sweep(const std::string& label, const net::RoadNetwork& network,
                           const plans::RouterCostTable& costs, std::vector<std::int64_t> loads,
                           std::vector<double> betas, int n_seeds, std::int64_t horizon_ticks,
                           std::uint64_t master_seed, const Constants& consts, int jobs = 0,
                           const SweepTable* previous = nullptr);

/// Pools every ok row of the given tables and min-max normalizes the three
/// metrics across them; range-zero metrics map to 0. Raw values are kept;
/// the per-metric min/max land in the table meta.
SweepTable normalize_cross_setting(const std::vector<SweepTable>& tables);

/// Selected-router shares, ordered [MinLength, MaxSpeed, Balanced].
std::array<double, 3> router_distribution(const std::vector<plans::AgentPlanSet>& plan_sets,
                                          const collective::Selections& sel);

// --- CSV ------------------------------------------------------------------
inline constexpr const char* kResultsHeader =
    "setting,beta,alpha,seed,local_cost,global_cost,mean_overhead,frac_minlength,frac_maxspeed,"
    "frac_balanced,iterations,status";
inline constexpr const char* kMediansHeader =
    "setting,load,beta,median_overhead,median_global,median_local";

std::string results_csv(const SweepTable& table);
SweepTable results_from_csv(const std::string& path);
std::string medians_csv(const std::vector<MedianRow>& medians);
std::string norm_meta_csv(const SweepTable& table);  // metric,min,max,range
std::vector<MedianRow> medians_from_csv(const std::string& path);

/// Plot-ready long format: setting,load,beta,seed,metric,value,normalized.
std::string report_csv(const SweepTable& results, const std::vector<MedianRow>& medians);

// --- config ----------------------------------------------------------------

struct SettingSpec {
  std::string label;
  std::string network_path;
  std::string population_path;  // empty: uniform origins
  std::size_t vehicles = 1;
  std::int64_t horizon_ticks = 1800;
  double cell_size_m = 1000.0;
};

struct Config {
  Constants constants;
  std::vector<SettingSpec> settings;
  std::vector<double> betas;           // default 1.0 .. 0.0 step 0.1
  int beta_seeds = 5;
  std::vector<std::int64_t> loads;     // default 100 .. 1500 step 100
  std::vector<double> load_betas;      // default {1.0, 0.0}
  int load_seeds = 5;
  std::int64_t load_horizon_ticks = 800;
  int baseline_runs = 100;
  std::uint64_t master_seed = 1;
  int jobs = 0;
};

Config load_config(const std::string& path);
const SettingSpec& find_setting(const Config& cfg, const std::string& label);

/// A setting with its network (and districts, when configured) loaded.
struct LoadedSetting {
  std::string label;
  std::size_t vehicles = 1;
  std::int64_t horizon_ticks = 1800;
  net::RoadNetwork network;
  bool has_districts = false;
  demand::DistrictGrid districts;

  TrafficSetting setting() const {
    return {label, &network, has_districts ? &districts : nullptr, vehicles, horizon_ticks};
  }
};

LoadedSetting materialize(const SettingSpec& spec, const Constants& consts);

}  // namespace altroute::experiment
