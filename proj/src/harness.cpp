#include "evt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "evt/errors.hpp"
#include "evt/fitters.hpp"
#include "evt/io.hpp"
#include "evt/tail_targets.hpp"

namespace evt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t bm_block_size(std::size_t n, std::size_t k) {
  return std::max<std::size_t>(1, n / k);
}

}  // namespace

// ---------------------------------------------------------------------------
// DataModel

DataModel DataModel::from_dist(const DistributionSpec& d) {
  DataModel m;
  m.dist = d;
  return m;
}

DataModel DataModel::from_ts(const TimeSeriesModel& t) {
  DataModel m;
  m.ts = t;
  return m;
}

Series DataModel::simulate(std::size_t n, std::uint64_t seed) const {
  if (dist) return sample(*dist, n, seed);
  if (ts) return simulate_timeseries(*ts, n, seed);
  throw invalid_argument("data model: neither dist nor model set");
}

std::optional<double> DataModel::gamma_truth() const {
  try {
    if (dist) return truth(*dist).gamma;
    if (ts) return truth(ts->marginal).gamma;
  } catch (const unsupported_truth&) {
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> DataModel::quantile_truth(double p) const {
  if (!(p > 0.0 && p < 1.0)) return std::nullopt;
  if (dist) return quantile(*dist, 1.0 - p);
  if (ts) return marginal_quantile(*ts, 1.0 - p);
  return std::nullopt;
}

std::string DataModel::str() const {
  if (dist) return format_spec(*dist);
  if (ts) return format_model(*ts);
  return "";
}

// ---------------------------------------------------------------------------
// Methods

const char* harness_method_name(HarnessMethod m) {
  switch (m) {
    case HarnessMethod::gev_ml: return "gev_ml";
    case HarnessMethod::gev_pwm: return "gev_pwm";
    case HarnessMethod::gp_ml: return "gp_ml";
    case HarnessMethod::gp_pwm: return "gp_pwm";
    case HarnessMethod::hill: return "hill";
    case HarnessMethod::quantile_pot: return "quantile_pot";
    case HarnessMethod::quantile_bm: return "quantile_bm";
    case HarnessMethod::return_level_bm: return "return_level_bm";
    case HarnessMethod::return_level_pot: return "return_level_pot";
  }
  return "?";
}

HarnessMethod parse_harness_method(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(HarnessMethod::return_level_pot); ++i) {
    const auto m = static_cast<HarnessMethod>(i);
    if (name == harness_method_name(m)) return m;
  }
  throw invalid_argument("unknown method '" + std::string(name) + "'");
}

bool is_fitter_method(HarnessMethod m) {
  switch (m) {
    case HarnessMethod::gev_ml:
    case HarnessMethod::gev_pwm:
    case HarnessMethod::gp_ml:
    case HarnessMethod::gp_pwm:
    case HarnessMethod::hill:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Config

std::vector<std::size_t> ExperimentConfig::ks_for(std::size_t n) const {
  std::vector<std::size_t> ks = k_grid;
  for (const KRule& rule : k_rules) {
    const double v = rule.c * std::pow(static_cast<double>(n), rule.a);
    const auto k = static_cast<std::size_t>(std::llround(
        std::clamp(v, 1.0, static_cast<double>(n - 1))));
    ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

void ExperimentConfig::validate() const {
  if (!model.dist && !model.ts)
    throw invalid_argument("config: need a dist or a model");
  if (n_grid.empty()) throw invalid_argument("config: empty n grid");
  if (k_grid.empty() && k_rules.empty())
    throw invalid_argument("config: empty k grid");
  if (methods.empty()) throw invalid_argument("config: no methods");
  if (replications < 1) throw invalid_argument("config: replications must be >= 1");
  for (std::size_t n : n_grid) {
    if (n < 2) throw invalid_argument("config: n must be >= 2");
    for (std::size_t k : ks_for(n))
      if (k < 1 || k >= n)
        throw invalid_argument("config: every (n,k) must satisfy 1 <= k < n");
  }
  for (HarnessMethod m : methods) {
    const bool needs_p = m == HarnessMethod::quantile_pot ||
                         m == HarnessMethod::quantile_bm;
    const bool needs_rl = m == HarnessMethod::return_level_bm ||
                          m == HarnessMethod::return_level_pot;
    if (needs_p && !target.p)
      throw invalid_argument("config: quantile methods need target.p");
    if (needs_rl && (!target.T || target.r == 0))
      throw invalid_argument("config: return-level methods need target.T and target.r");
  }
}

// ---------------------------------------------------------------------------
// Engine

namespace {

struct Cell {
  HarnessMethod method;
  std::size_t n;
  std::size_t k;
};

// One method on one prepared data set; NaN marks a failed or non-converged
// fit (failures are counted, never imputed).
double evaluate_cell(const Cell& cell, const Series& data,
                     const ExperimentConfig& cfg) {
  const std::size_t n = data.size();
  try {
    switch (cell.method) {
      case HarnessMethod::gev_ml:
      case HarnessMethod::gev_pwm: {
        const auto bm =
            block_maxima(data.view(), bm_block_size(n, cell.k), cfg.scheme);
        const TailFit fit = cell.method == HarnessMethod::gev_ml
                                ? fit_gev_ml(bm)
                                : fit_gev_pwm(bm);
        return fit.converged ? fit.gamma_hat : kNaN;
      }
      case HarnessMethod::gp_ml:
      case HarnessMethod::gp_pwm: {
        const auto ex = threshold_excesses(data.view(), cell.k);
        const TailFit fit = cell.method == HarnessMethod::gp_ml
                                ? fit_gp_ml(ex)
                                : fit_gp_pwm(ex);
        return fit.converged ? fit.gamma_hat : kNaN;
      }
      case HarnessMethod::hill: {
        const TailFit fit = hill(data.view(), cell.k);
        return fit.converged ? fit.gamma_hat : kNaN;
      }
      case HarnessMethod::quantile_pot:
        return quantile_pot(data, cell.k, *cfg.target.p).value;
      case HarnessMethod::quantile_bm: {
        const std::size_t r = bm_block_size(n, cell.k);
        std::optional<ThetaEstimate> theta;
        if (cfg.theta_method == ThetaChoice::intervals)
          theta = theta_intervals(data, cell.k);
        else if (cfg.theta_method == ThetaChoice::blocks)
          theta = theta_blocks(data, r, cell.k);
        return quantile_bm(data, r, *cfg.target.p, theta, cfg.scheme).value;
      }
      case HarnessMethod::return_level_bm:
        return return_level_bm(data, cfg.target.r, *cfg.target.T, cfg.scheme)
            .value;
      case HarnessMethod::return_level_pot: {
        ThetaEstimate theta;
        if (cfg.theta_method == ThetaChoice::blocks)
          theta = theta_blocks(data, bm_block_size(n, cell.k), cell.k);
        else if (cfg.theta_method == ThetaChoice::intervals)
          theta = theta_intervals(data, cell.k);
        // ThetaChoice::none keeps theta = 1.
        return return_level_pot(data, cell.k, cfg.target.r, *cfg.target.T,
                                theta)
            .value;
      }
    }
  } catch (const error&) {
    return kNaN;
  }
  return kNaN;
}

std::optional<double> cell_truth(const Cell& cell,
                                 const ExperimentConfig& cfg) {
  if (is_fitter_method(cell.method)) return cfg.model.gamma_truth();
  if (cell.method == HarnessMethod::quantile_pot ||
      cell.method == HarnessMethod::quantile_bm)
    return cfg.model.quantile_truth(*cfg.target.p);
  return std::nullopt;  // return levels have no analytic truth here
}

}  // namespace

void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0
                            ? static_cast<std::size_t>(threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

HorseRaceReport run_horserace(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  // Enumerate cells deterministically: methods x n x k. Return-level BM cells
  // do not depend on the k grid and are keyed once per n at k = n / target.r.
  std::vector<Cell> cells;
  for (HarnessMethod m : cfg.methods) {
    for (std::size_t n : cfg.n_grid) {
      if (m == HarnessMethod::return_level_bm) {
        cells.push_back({m, n, std::max<std::size_t>(1, n / cfg.target.r)});
        continue;
      }
      for (std::size_t k : cfg.ks_for(n)) cells.push_back({m, n, k});
    }
  }

  // estimates[rep * cells + cell]
  std::vector<double> estimates(cfg.replications * cells.size(), kNaN);
  const auto& n_grid = cfg.n_grid;
  parallel_for_index(cfg.replications, threads, [&](std::size_t rep) {
    const std::uint64_t seed = replication_seed(cfg.base_seed, rep);
    for (std::size_t n : n_grid) {
      const Series data = cfg.model.simulate(n, seed);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].n != n) continue;
        estimates[rep * cells.size() + c] = evaluate_cell(cells[c], data, cfg);
      }
    }
  });

  HorseRaceReport report;
  report.config = cfg;
  report.records.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    RaceRecord rec;
    rec.method = cells[c].method;
    rec.n = cells[c].n;
    rec.k = cells[c].k;
    rec.replications = cfg.replications;

    double sum = 0.0;
    std::size_t good = 0;
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const double v = estimates[rep * cells.size() + c];
      if (std::isnan(v)) continue;
      sum += v;
      ++good;
    }
    rec.failures = cfg.replications - good;
    if (good == 0) {
      rec.mean = rec.truth = rec.bias = rec.variance = rec.rmse = kNaN;
      report.records.push_back(rec);
      continue;
    }
    rec.mean = sum / static_cast<double>(good);
    double ss = 0.0;
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const double v = estimates[rep * cells.size() + c];
      if (std::isnan(v)) continue;
      ss += (v - rec.mean) * (v - rec.mean);
    }
    rec.variance = ss / static_cast<double>(good);

    const auto truth = cell_truth(cells[c], cfg);
    if (truth) {
      rec.truth = *truth;
      rec.bias = rec.mean - *truth;
      rec.rmse = std::sqrt(rec.bias * rec.bias + rec.variance);
    } else {
      rec.truth = rec.bias = rec.rmse = kNaN;
    }
    report.records.push_back(rec);
  }

  for (HarnessMethod m : cfg.methods) {
    if (cfg.n_grid.size() < 3) break;
    try {
      report.rate_fits.emplace_back(m, rate_fit(report, m));
    } catch (const error&) {
      // no truth or degenerate grid for this method; skip its rate fit
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

RateFit rate_fit(const HorseRaceReport& report, HarnessMethod method) {
  // Best k per n by empirical RMSE (ties -> smaller k).
  std::vector<RatePoint> points;
  for (std::size_t n : report.config.n_grid) {
    const RaceRecord* best = nullptr;
    for (const RaceRecord& rec : report.records) {
      if (rec.method != method || rec.n != n || std::isnan(rec.rmse)) continue;
      if (!best || rec.rmse < best->rmse) best = &rec;
    }
    if (best) points.push_back({best->n, best->k, best->rmse});
  }
  std::vector<double> xs, ys;
  for (const RatePoint& pt : points) {
    if (!(pt.rmse > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(pt.n)));
    ys.push_back(std::log(pt.rmse));
  }
  const std::size_t m = xs.size();
  if (m < 3)
    throw degenerate_sample("rate_fit: need records with truth at >= 3 distinct n");

  const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    syy += (ys[i] - ybar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0)) throw degenerate_sample("rate_fit: n values are not distinct");

  RateFit fit;
  fit.points = points;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += e * e;
  }
  fit.stderr_slope = m > 2 ? std::sqrt(ssr / static_cast<double>(m - 2) / sxx) : 0.0;
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

std::vector<KSweepRecord> ksweep(const DataModel& model, std::size_t n,
                                 HarnessMethod method,
                                 std::span<const std::size_t> k_grid,
                                 std::size_t replications,
                                 std::uint64_t base_seed, int threads,
                                 const TargetSpec& target, ThetaChoice theta) {
  if (k_grid.empty()) throw invalid_argument("ksweep: empty k grid");
  if (replications < 1) throw invalid_argument("ksweep: replications must be >= 1");
  for (std::size_t k : k_grid)
    if (k < 1 || k >= n) throw invalid_argument("ksweep: need 1 <= k < n");

  ExperimentConfig cfg;
  cfg.model = model;
  cfg.n_grid = {n};
  cfg.k_grid.assign(k_grid.begin(), k_grid.end());
  cfg.methods = {method};
  cfg.replications = replications;
  cfg.base_seed = base_seed;
  cfg.target = target;
  cfg.theta_method = theta;
  const HorseRaceReport report = run_horserace(cfg, threads);

  std::vector<KSweepRecord> out;
  std::vector<std::size_t> ks = cfg.ks_for(n);
  for (std::size_t k : ks) {
    for (const RaceRecord& rec : report.records) {
      if (rec.k != k) continue;
      KSweepRecord r;
      r.k = k;
      r.mean = rec.mean;
      const std::size_t good = rec.replications - rec.failures;
      // sample standard deviation from the population variance
      r.sd = good > 1 ? std::sqrt(rec.variance * static_cast<double>(good) /
                                  static_cast<double>(good - 1))
                      : 0.0;
      r.failures = rec.failures;
      r.replications = rec.replications;
      out.push_back(r);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string report_csv(const HorseRaceReport& report) {
  std::string out = "method,n,k,replications,failures,mean,truth,bias,variance,rmse\n";
  for (const RaceRecord& r : report.records) {
    out += csv_join({harness_method_name(r.method), std::to_string(r.n),
                     std::to_string(r.k), std::to_string(r.replications),
                     std::to_string(r.failures), csv_field(r.mean),
                     csv_field(r.truth), csv_field(r.bias),
                     csv_field(r.variance), csv_field(r.rmse)});
    out += '\n';
  }
  return out;
}

std::string ksweep_csv(HarnessMethod method, std::size_t n,
                       std::span<const KSweepRecord> records) {
  std::string out = "method,n,k,mean,sd,failures,replications\n";
  for (const KSweepRecord& r : records) {
    out += csv_join({harness_method_name(method), std::to_string(n),
                     std::to_string(r.k), csv_field(r.mean), csv_field(r.sd),
                     std::to_string(r.failures),
                     std::to_string(r.replications)});
    out += '\n';
  }
  return out;
}

namespace {

const char* theta_choice_name(ThetaChoice t) {
  switch (t) {
    case ThetaChoice::none: return "none";
    case ThetaChoice::intervals: return "intervals";
    case ThetaChoice::blocks: return "blocks";
  }
  return "?";
}

ThetaChoice parse_theta_choice(std::string_view s) {
  if (s == "none") return ThetaChoice::none;
  if (s == "intervals") return ThetaChoice::intervals;
  if (s == "blocks") return ThetaChoice::blocks;
  throw invalid_argument("theta method must be none, intervals or blocks");
}

nlohmann::json config_to_json_obj(const ExperimentConfig& cfg) {
  nlohmann::json j;
  if (cfg.model.dist) j["dist"] = format_spec(*cfg.model.dist);
  if (cfg.model.ts) j["model"] = format_model(*cfg.model.ts);
  j["n"] = cfg.n_grid;
  if (!cfg.k_grid.empty()) j["k"] = cfg.k_grid;
  if (!cfg.k_rules.empty()) {
    nlohmann::json rules = nlohmann::json::array();
    for (const KRule& r : cfg.k_rules) rules.push_back({{"c", r.c}, {"a", r.a}});
    j["k_rules"] = rules;
  }
  std::vector<std::string> methods;
  for (HarnessMethod m : cfg.methods) methods.push_back(harness_method_name(m));
  j["methods"] = methods;
  j["replications"] = cfg.replications;
  j["seed"] = cfg.base_seed;
  if (cfg.theta_method != ThetaChoice::none)
    j["theta_method"] = theta_choice_name(cfg.theta_method);
  if (cfg.target.p || cfg.target.T || cfg.target.r) {
    nlohmann::json t;
    if (cfg.target.p) t["p"] = *cfg.target.p;
    if (cfg.target.T) t["T"] = *cfg.target.T;
    if (cfg.target.r) t["r"] = cfg.target.r;
    j["target"] = t;
  }
  if (cfg.scheme == BlockScheme::sliding) j["scheme"] = "sliding";
  return j;
}

}  // namespace

std::string config_json(const ExperimentConfig& cfg) {
  return config_to_json_obj(cfg).dump(2);
}

ExperimentConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid_argument(std::string("config: bad JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("dist")) cfg.model.dist = parse_spec(j["dist"].get<std::string>());
    if (j.contains("model")) cfg.model.ts = parse_model(j["model"].get<std::string>());
    cfg.n_grid = j.at("n").get<std::vector<std::size_t>>();
    if (j.contains("k")) cfg.k_grid = j["k"].get<std::vector<std::size_t>>();
    if (j.contains("k_rules"))
      for (const auto& r : j["k_rules"])
        cfg.k_rules.push_back({r.at("c").get<double>(), r.at("a").get<double>()});
    for (const auto& m : j.at("methods"))
      cfg.methods.push_back(parse_harness_method(m.get<std::string>()));
    cfg.replications = j.at("replications").get<std::size_t>();
    cfg.base_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("theta_method"))
      cfg.theta_method = parse_theta_choice(j["theta_method"].get<std::string>());
    if (j.contains("target")) {
      const auto& t = j["target"];
      if (t.contains("p")) cfg.target.p = t["p"].get<double>();
      if (t.contains("T")) cfg.target.T = t["T"].get<double>();
      if (t.contains("r")) cfg.target.r = t["r"].get<std::size_t>();
    }
    if (j.contains("scheme")) {
      const auto s = j["scheme"].get<std::string>();
      if (s == "sliding") cfg.scheme = BlockScheme::sliding;
      else if (s == "disjoint") cfg.scheme = BlockScheme::disjoint;
      else throw invalid_argument("config: scheme must be disjoint or sliding");
    }
  } catch (const nlohmann::json::exception& e) {
    throw invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string report_json(const HorseRaceReport& report, bool include_wall_time) {
  nlohmann::json j;
  j["config"] = config_to_json_obj(report.config);
  nlohmann::json fits = nlohmann::json::object();
  for (const auto& [method, fit] : report.rate_fits) {
    nlohmann::json pts = nlohmann::json::array();
    for (const RatePoint& p : fit.points)
      pts.push_back({{"n", p.n}, {"best_k", p.best_k}, {"rmse", p.rmse}});
    fits[harness_method_name(method)] = {{"slope", fit.slope},
                                         {"intercept", fit.intercept},
                                         {"stderr_slope", fit.stderr_slope},
                                         {"r_squared", fit.r_squared},
                                         {"points", pts}};
  }
  j["rate_fits"] = fits;
  std::size_t failures = 0;
  for (const RaceRecord& r : report.records) failures += r.failures;
  j["failures_total"] = failures;
  if (include_wall_time) j["wall_time_seconds"] = report.wall_seconds;
  return j.dump(2);
}

}  // namespace evt
