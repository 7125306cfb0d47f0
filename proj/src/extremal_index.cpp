#include "evt/extremal_index.hpp"

#include <algorithm>
#include <cmath>

#include "evt/blocking.hpp"
#include "evt/errors.hpp"
#include "evt/io.hpp"
#include "evt/rng.hpp"

namespace evt {

namespace {

double unit_frechet_draw(SplitMix64& g) {
  return -1.0 / std::log(g.next_unit());
}

double cauchy_draw(SplitMix64& g) {
  return std::tan(3.14159265358979323846 * (g.next_unit() - 0.5));
}

}  // namespace

// ---------------------------------------------------------------------------
// Models

TimeSeriesModel TimeSeriesModel::iid(const DistributionSpec& marginal) {
  TimeSeriesModel m;
  m.kind = TsKind::iid;
  m.marginal = marginal;
  m.theta_true = 1.0;
  return m;
}

TimeSeriesModel TimeSeriesModel::armax(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw invalid_parameter("armax: alpha must lie in [0,1)");
  TimeSeriesModel m;
  m.kind = TsKind::armax;
  m.alpha = alpha;
  m.marginal = DistributionSpec::frechet(1.0);
  m.theta_true = 1.0 - alpha;
  return m;
}

TimeSeriesModel TimeSeriesModel::ar1_cauchy(double phi) {
  if (!(phi >= 0.0 && phi < 1.0))
    throw invalid_parameter("ar1_cauchy: phi must lie in [0,1)");
  TimeSeriesModel m;
  m.kind = TsKind::ar1_cauchy;
  m.phi = phi;
  m.marginal = DistributionSpec::cauchy(0.0, 1.0 / (1.0 - phi));
  m.theta_true = 1.0 - phi;
  return m;
}

TimeSeriesModel TimeSeriesModel::moving_maxima(std::vector<double> weights) {
  if (weights.empty())
    throw invalid_parameter("moving_maxima: need at least one weight");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw invalid_parameter("moving_maxima: weights must be >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw invalid_parameter("moving_maxima: weights sum to zero");
  for (double& w : weights) w /= sum;
  TimeSeriesModel m;
  m.kind = TsKind::moving_maxima;
  m.weights = std::move(weights);
  m.marginal = DistributionSpec::frechet(1.0);
  m.theta_true = *std::max_element(m.weights.begin(), m.weights.end());
  return m;
}

Series simulate_timeseries(const TimeSeriesModel& model, std::size_t n,
                           std::uint64_t seed) {
  if (n < 1) throw invalid_argument("simulate_timeseries: n must be >= 1");
  switch (model.kind) {
    case TsKind::iid: {
      Series s = sample(model.marginal, n, seed);
      s.model = format_model(model);
      return s;
    }
    case TsKind::armax: {
      SplitMix64 g(seed);
      Series s;
      s.kind = SeriesKind::stationary;
      s.seed = seed;
      s.model = format_model(model);
      s.values.resize(n);
      // X_1 unit Frechet gives an exactly stationary start.
      s.values[0] = unit_frechet_draw(g);
      const double a = model.alpha;
      for (std::size_t t = 1; t < n; ++t)
        s.values[t] =
            std::max(a * s.values[t - 1], (1.0 - a) * unit_frechet_draw(g));
      return s;
    }
    case TsKind::ar1_cauchy: {
      SplitMix64 g(seed);
      Series s;
      s.kind = SeriesKind::stationary;
      s.seed = seed;
      s.model = format_model(model);
      s.values.resize(n);
      // Stationary distribution is Cauchy with scale 1/(1-phi).
      s.values[0] = cauchy_draw(g) / (1.0 - model.phi);
      for (std::size_t t = 1; t < n; ++t)
        s.values[t] = model.phi * s.values[t - 1] + cauchy_draw(g);
      return s;
    }
    case TsKind::moving_maxima: {
      SplitMix64 g(seed);
      const std::size_t m = model.weights.size();
      std::vector<double> z(n + m - 1);
      for (auto& v : z) v = unit_frechet_draw(g);
      Series s;
      s.kind = SeriesKind::stationary;
      s.seed = seed;
      s.model = format_model(model);
      s.values.resize(n);
      for (std::size_t t = 0; t < n; ++t) {
        double v = 0.0;
        for (std::size_t j = 0; j < m; ++j)
          v = std::max(v, model.weights[j] * z[t + m - 1 - j]);
        s.values[t] = v;
      }
      return s;
    }
  }
  throw invalid_parameter("unknown time series kind");
}

double marginal_quantile(const TimeSeriesModel& model, double p) {
  return quantile(model.marginal, p);
}

// ---------------------------------------------------------------------------
// Theta estimators

ThetaEstimate theta_intervals_from_times(std::span<const std::size_t> times,
                                         std::size_t n, std::size_t k) {
  const std::size_t N = times.size();
  if (N < 2)
    throw insufficient_exceedances(
        "theta_intervals: need at least 2 exceedances");

  double sum_t = 0.0, sum_t2 = 0.0, sum_tm1 = 0.0, sum_prod = 0.0;
  double max_t = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double t = static_cast<double>(times[i + 1] - times[i]);
    sum_t += t;
    sum_t2 += t * t;
    sum_tm1 += t - 1.0;
    sum_prod += (t - 1.0) * (t - 2.0);
    max_t = std::max(max_t, t);
  }
  const double count = static_cast<double>(N - 1);
  double raw;
  if (max_t <= 2.0) {
    raw = 2.0 * sum_t * sum_t / (count * sum_t2);
  } else {
    raw = 2.0 * sum_tm1 * sum_tm1 / (count * sum_prod);
  }

  ThetaEstimate est;
  est.method = ThetaMethod::intervals;
  est.theta_raw = raw;
  est.theta_hat = std::clamp(raw, 0.0, 1.0);
  est.k = k;
  est.n = n;
  return est;
}

ThetaEstimate theta_intervals(std::span<const double> series, std::size_t k) {
  const ExcessSample ex = threshold_excesses(series, k);
  return theta_intervals_from_times(ex.exceedance_times, ex.n, k);
}

ThetaEstimate theta_intervals(const Series& series, std::size_t k) {
  return theta_intervals(series.view(), k);
}

ThetaEstimate theta_blocks(std::span<const double> series, std::size_t r,
                           std::size_t k) {
  const std::size_t n = series.size();
  if (r < 2) throw invalid_argument("theta_blocks: need r >= 2");
  if (k < 1 || k >= n) throw invalid_argument("theta_blocks: need 1 <= k < n");

  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const double u = sorted[n - k - 1];  // X_{n-k:n}

  const double f_hat =
      static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), u) -
                          sorted.begin()) /
      static_cast<double>(n);
  if (!(f_hat > 0.0 && f_hat < 1.0))
    throw invalid_threshold("theta_blocks: empirical cdf at u must lie in (0,1)");

  const BlockMaximaSample bm = disjoint_block_maxima(series, r);
  std::size_t below = 0;
  for (double m : bm.maxima)
    if (m <= u) ++below;
  if (below == 0)
    throw threshold_too_low("theta_blocks: every block maximum exceeds u");

  const double share =
      static_cast<double>(below) / static_cast<double>(bm.maxima.size());
  const double raw =
      std::log(share) / (static_cast<double>(r) * std::log(f_hat));

  ThetaEstimate est;
  est.method = ThetaMethod::blocks;
  est.theta_raw = raw;
  est.theta_hat = std::clamp(raw, 0.0, 1.0);
  est.r = r;
  est.k = k;
  est.n = n;
  return est;
}

ThetaEstimate theta_blocks(const Series& series, std::size_t r, std::size_t k) {
  return theta_blocks(series.view(), r, k);
}

// ---------------------------------------------------------------------------
// Norming transform

GevNorming tilde_transform(double scale, double loc, double gamma,
                           double theta) {
  if (!(scale > 0.0)) throw invalid_argument("tilde_transform: scale must be > 0");
  if (!(theta > 0.0 && theta <= 1.0))
    throw invalid_argument("tilde_transform: theta must lie in (0,1]");
  const double lt = std::log(theta);
  if (std::abs(gamma) < kShapeZeroTol) return {scale, loc + scale * lt};
  // (theta^gamma - 1)/gamma via expm1: no cancellation for small gamma
  return {scale * std::exp(gamma * lt),
          loc + scale * std::expm1(gamma * lt) / gamma};
}

GevNorming inverse_tilde_transform(double scale_tilde, double loc_tilde,
                                   double gamma, double theta) {
  if (!(scale_tilde > 0.0))
    throw invalid_argument("inverse_tilde_transform: scale must be > 0");
  if (!(theta > 0.0 && theta <= 1.0))
    throw invalid_argument("inverse_tilde_transform: theta must lie in (0,1]");
  const double lt = std::log(theta);
  if (std::abs(gamma) < kShapeZeroTol)
    return {scale_tilde, loc_tilde - scale_tilde * lt};
  return {scale_tilde * std::exp(-gamma * lt),
          loc_tilde + scale_tilde * std::expm1(-gamma * lt) / gamma};
}

// ---------------------------------------------------------------------------
// Grammar & serialization

std::string format_model(const TimeSeriesModel& m) {
  switch (m.kind) {
    case TsKind::iid:
      return "iid(" + format_spec(m.marginal) + ")";
    case TsKind::armax:
      return "armax(" + format_double(m.alpha) + ")";
    case TsKind::ar1_cauchy:
      return "ar1cauchy(" + format_double(m.phi) + ")";
    case TsKind::moving_maxima: {
      std::string out = "movmax(";
      for (std::size_t i = 0; i < m.weights.size(); ++i) {
        if (i) out += ',';
        out += format_double(m.weights[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

TimeSeriesModel parse_model(std::string_view text) {
  const std::size_t open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')')
    throw invalid_argument("model grammar: expected kind(...) in '" +
                           std::string(text) + "'");
  const std::string_view name = text.substr(0, open);
  const std::string_view body = text.substr(open + 1, text.size() - open - 2);

  if (name == "iid") return TimeSeriesModel::iid(parse_spec(body));

  std::vector<double> args;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string_view::npos) comma = body.size();
    const std::string tok(body.substr(pos, comma - pos));
    try {
      args.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw invalid_argument("model grammar: bad number '" + tok + "'");
    }
    pos = comma + 1;
  }
  if (name == "armax") {
    if (args.size() != 1) throw invalid_argument("armax(alpha) takes one parameter");
    return TimeSeriesModel::armax(args[0]);
  }
  if (name == "ar1cauchy") {
    if (args.size() != 1) throw invalid_argument("ar1cauchy(phi) takes one parameter");
    return TimeSeriesModel::ar1_cauchy(args[0]);
  }
  if (name == "movmax") return TimeSeriesModel::moving_maxima(args);
  throw invalid_argument("model grammar: unknown kind '" + std::string(name) + "'");
}

const char* theta_method_name(ThetaMethod m) {
  return m == ThetaMethod::blocks ? "blocks" : "intervals";
}

std::string theta_csv_header() { return "method,r,k,theta_hat,theta_raw,n"; }

std::string theta_csv_row(const ThetaEstimate& est) {
  return csv_join({theta_method_name(est.method),
                   est.r ? std::to_string(*est.r) : std::string(),
                   std::to_string(est.k), csv_field(est.theta_hat),
                   csv_field(est.theta_raw), std::to_string(est.n)});
}

}  // namespace evt
