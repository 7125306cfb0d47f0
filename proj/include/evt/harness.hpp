#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evt/blocking.hpp"
#include "evt/distributions.hpp"
#include "evt/extremal_index.hpp"
#include "evt/rng.hpp"

namespace evt {

// Per-replication seed: base_seed XOR mix64(replication_index). Fixed
// bit-exactly so that reports are reproducible and any replication's data can
// be regenerated in isolation.
inline std::uint64_t replication_seed(std::uint64_t base_seed,
                                      std::uint64_t replication) {
  return base_seed ^ mix64(replication);
}

// Either an i.i.d. catalog member or a time-series model.
struct DataModel {
  std::optional<DistributionSpec> dist;
  std::optional<TimeSeriesModel> ts;

  static DataModel from_dist(const DistributionSpec& d);
  static DataModel from_ts(const TimeSeriesModel& t);

  Series simulate(std::size_t n, std::uint64_t seed) const;
  // Ground-truth extreme value index of the (marginal) distribution, when the
  // catalog knows it.
  std::optional<double> gamma_truth() const;
  // True upper-tail quantile at level p of the stationary distribution.
  std::optional<double> quantile_truth(double p) const;
  std::string str() const;
};

enum class HarnessMethod {
  gev_ml,
  gev_pwm,
  gp_ml,
  gp_pwm,
  hill,
  quantile_pot,
  quantile_bm,
  return_level_bm,
  return_level_pot,
};

const char* harness_method_name(HarnessMethod m);
HarnessMethod parse_harness_method(std::string_view name);
bool is_fitter_method(HarnessMethod m);

enum class ThetaChoice { none, intervals, blocks };

// k = round(c * n^a), clamped to [1, n-1].
struct KRule {
  double c = 1.0;
  double a = 1.0;
};

struct TargetSpec {
  std::optional<double> p;   // quantile level
  std::optional<double> T;   // return period
  std::size_t r = 0;         // block size of the return level
};

// One horse race: every method runs on the same data per replication (common
// random numbers), over the n-grid and the per-n k-grid. BM methods read the
// cell k as the number of blocks (block size r = floor(n/k)); POT methods
// read it as the number of upper order statistics.
struct ExperimentConfig {
  DataModel model;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> k_grid;  // absolute cell values
  std::vector<KRule> k_rules;       // n-dependent cell values
  std::vector<HarnessMethod> methods;
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;
  ThetaChoice theta_method = ThetaChoice::none;
  TargetSpec target;
  BlockScheme scheme = BlockScheme::disjoint;

  std::vector<std::size_t> ks_for(std::size_t n) const;
  void validate() const;
};

// Aggregates over the successful replications of one cell. `truth`, `bias`
// and `rmse` are NaN when no ground truth applies. The variance is the
// population variance, so rmse^2 = bias^2 + variance holds exactly.
struct RaceRecord {
  HarnessMethod method;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t replications = 0;
  std::size_t failures = 0;
  double mean = 0.0;
  double truth = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double rmse = 0.0;
};

struct RatePoint {
  std::size_t n = 0;
  std::size_t best_k = 0;
  double rmse = 0.0;
};

// Least-squares fit of log RMSE on log n at the per-n best k.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  std::vector<RatePoint> points;
};

struct HorseRaceReport {
  ExperimentConfig config;
  std::vector<RaceRecord> records;
  std::vector<std::pair<HarnessMethod, RateFit>> rate_fits;
  double wall_seconds = 0.0;
};

// threads <= 0 selects hardware concurrency. Results are bit-identical for
// any thread count: replications write into preassigned slots and are
// reduced in index order.
HorseRaceReport run_horserace(const ExperimentConfig& config, int threads = 0);

RateFit rate_fit(const HorseRaceReport& report, HarnessMethod method);

struct KSweepRecord {
  std::size_t k = 0;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t failures = 0;
  std::size_t replications = 0;
};

// Mean and standard deviation of the estimate per k (a "Hill plot" across
// any of the fitters).
std::vector<KSweepRecord> ksweep(const DataModel& model, std::size_t n,
                                 HarnessMethod method,
                                 std::span<const std::size_t> k_grid,
                                 std::size_t replications,
                                 std::uint64_t base_seed, int threads = 0,
                                 const TargetSpec& target = {},
                                 ThetaChoice theta = ThetaChoice::none);

std::string report_csv(const HorseRaceReport& report);
// `include_wall_time` exists so determinism checks can compare full
// summaries; wall time is the only non-reproducible field.
std::string report_json(const HorseRaceReport& report,
                        bool include_wall_time = true);
std::string ksweep_csv(HarnessMethod method, std::size_t n,
                       std::span<const KSweepRecord> records);

ExperimentConfig parse_config_json(const std::string& text);
std::string config_json(const ExperimentConfig& config);

// Deterministic static partition of [0, count) over worker threads.
void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn);

}  // namespace evt
