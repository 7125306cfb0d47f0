#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evt/distributions.hpp"
#include "evt/series.hpp"

namespace evt {

enum class TsKind { iid, armax, ar1_cauchy, moving_maxima };

// A stationary time-series generator with (where known) analytic extremal
// index. The armax and ar1_cauchy truths theta = 1 - alpha and 1 - phi, and
// theta = max weight for moving maxima, are standard results adopted as
// stored ground truth.
struct TimeSeriesModel {
  TsKind kind = TsKind::iid;
  double alpha = 0.0;             // armax
  double phi = 0.0;               // ar1_cauchy
  std::vector<double> weights;    // moving maxima, normalized to sum 1
  DistributionSpec marginal;      // stationary marginal distribution
  std::optional<double> theta_true;

  static TimeSeriesModel iid(const DistributionSpec& marginal);
  // X_t = max(alpha X_{t-1}, (1-alpha) Z_t), Z_t unit Frechet, alpha in [0,1)
  static TimeSeriesModel armax(double alpha);
  // X_t = phi X_{t-1} + C_t, C_t standard Cauchy, phi in [0,1)
  static TimeSeriesModel ar1_cauchy(double phi);
  // X_t = max_j w_j Z_{t-j}, Z unit Frechet
  static TimeSeriesModel moving_maxima(std::vector<double> weights);
};

Series simulate_timeseries(const TimeSeriesModel& model, std::size_t n,
                           std::uint64_t seed);

// Marginal quantile of the stationary distribution (used as ground truth for
// quantile targets).
double marginal_quantile(const TimeSeriesModel& model, double p);

// Model grammar for the CLI: "armax(0.5)", "ar1cauchy(0.7)",
// "movmax(0.5,0.3,0.2)", "iid(frechet(1))".
std::string format_model(const TimeSeriesModel& model);
TimeSeriesModel parse_model(std::string_view text);

enum class ThetaMethod { blocks, intervals };

struct ThetaEstimate {
  double theta_hat = 1.0;  // clipped to [0, 1]
  double theta_raw = 1.0;  // before clipping
  ThetaMethod method = ThetaMethod::intervals;
  std::optional<std::size_t> r;  // blocks method only
  std::size_t k = 0;
  std::size_t n = 0;
};

// Interexceedance-time estimator (Ferro-Segers). With interexceedance times
// T_1..T_{N-1} of the exceedances of X_{n-k:n}:
//   max T <= 2:  2 (sum T)^2 / ((N-1) sum T^2)
//   otherwise:   2 (sum (T-1))^2 / ((N-1) sum (T-1)(T-2))
// clipped to [0,1].
ThetaEstimate theta_intervals(const Series& series, std::size_t k);
ThetaEstimate theta_intervals(std::span<const double> series, std::size_t k);
// Same statistic evaluated directly on 0-based exceedance times.
ThetaEstimate theta_intervals_from_times(std::span<const std::size_t> times,
                                         std::size_t n, std::size_t k);

// Blocks estimator: log of the share of disjoint block maxima at or below
// u = X_{n-k:n}, divided by r log Fhat(u).
ThetaEstimate theta_blocks(const Series& series, std::size_t r, std::size_t k);
ThetaEstimate theta_blocks(std::span<const double> series, std::size_t r,
                           std::size_t k);

struct GevNorming {
  double scale = 1.0;  // a
  double loc = 0.0;    // b
};

// Maps i.i.d. norming constants (a, b) to the time-series constants
// (a theta^gamma, b - a (1 - theta^gamma)/gamma); gamma = 0 uses the
// log-theta limit. Defined for theta in (0, 1].
GevNorming tilde_transform(double scale, double loc, double gamma, double theta);
GevNorming inverse_tilde_transform(double scale_tilde, double loc_tilde,
                                   double gamma, double theta);

const char* theta_method_name(ThetaMethod m);
std::string theta_csv_header();
std::string theta_csv_row(const ThetaEstimate& est);

}  // namespace evt
