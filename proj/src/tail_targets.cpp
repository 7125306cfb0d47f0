#include "evt/tail_targets.hpp"

#include <cmath>

#include "evt/distributions.hpp"
#include "evt/errors.hpp"
#include "evt/io.hpp"

namespace evt {

namespace {

// ((t)^-gamma - 1) / gamma with the -log t limit at gamma = 0; t in (0, 1).
double inverse_power_growth(double t, double gamma) {
  const double lt = std::log(t);
  if (std::abs(gamma) < kShapeZeroTol) return -lt;
  return std::expm1(-gamma * lt) / gamma;
}

void check_fit(const TailFit& fit, const char* where) {
  if (!fit.converged)
    throw degenerate_sample(std::string(where) + ": tail fit did not converge");
}

}  // namespace

double gp_tail_quantile(double threshold, double sigma, double gamma,
                        double k_over_n, double p) {
  if (!(sigma > 0.0)) throw invalid_argument("gp_tail_quantile: sigma must be > 0");
  if (!(k_over_n > 0.0 && k_over_n <= 1.0))
    throw invalid_argument("gp_tail_quantile: k/n must lie in (0,1]");
  if (!(p > 0.0)) throw invalid_argument("gp_tail_quantile: p must be > 0");
  // p = k/n is the zero-excess boundary and returns the threshold exactly;
  // anything above it would interpolate, which the pipelines reject earlier.
  if (p > k_over_n)
    throw extrapolation_error("gp_tail_quantile: requires p <= k/n");
  return threshold + sigma * inverse_power_growth(p / k_over_n, gamma);
}

double gev_tail_quantile(double loc, double scale, double gamma, std::size_t r,
                         double p) {
  if (!(scale > 0.0)) throw invalid_argument("gev_tail_quantile: scale must be > 0");
  const double rp = static_cast<double>(r) * p;
  if (!(p > 0.0 && rp < 1.0))
    throw invalid_argument("gev_tail_quantile: need p > 0 and r p < 1");
  return loc + scale * inverse_power_growth(rp, gamma);
}

double gev_return_level(double loc, double scale, double gamma, double T) {
  if (!(scale > 0.0)) throw invalid_argument("gev_return_level: scale must be > 0");
  if (!(T > 1.0)) throw invalid_argument("gev_return_level: T must be > 1");
  const double y = -std::log1p(-1.0 / T);  // -log(1 - 1/T)
  return loc + scale * inverse_power_growth(y, gamma);
}

TargetEstimate quantile_pot(const Series& series, std::size_t k, double p) {
  const std::size_t n = series.size();
  const double k_over_n = static_cast<double>(k) / static_cast<double>(n);
  if (!(p > 0.0 && p < k_over_n))
    throw extrapolation_error("quantile_pot: requires 0 < p < k/n");

  const ExcessSample ex = threshold_excesses(series, k);
  const TailFit fit = fit_gp_ml(ex);
  check_fit(fit, "quantile_pot");

  TargetEstimate est;
  est.kind = TargetKind::quantile;
  est.pipeline = Pipeline::pot;
  est.p = p;
  est.fit = fit;
  est.value =
      gp_tail_quantile(ex.threshold, fit.scale_hat, fit.gamma_hat, k_over_n, p);
  return est;
}

TargetEstimate quantile_bm(const Series& series, std::size_t r, double p,
                           const std::optional<ThetaEstimate>& theta,
                           BlockScheme scheme) {
  if (!(p > 0.0 && static_cast<double>(r) * p < 1.0))
    throw invalid_argument("quantile_bm: need p > 0 and r p < 1");

  const BlockMaximaSample bm = block_maxima(series.view(), r, scheme);
  const TailFit fit = fit_gev_ml(bm);
  check_fit(fit, "quantile_bm");

  // The fitted (loc, scale) estimate the tilde constants; undo the tilde
  // transform to recover the i.i.d. constants before extrapolating.
  const double th = theta ? theta->theta_hat : 1.0;
  if (!(th > 0.0))
    throw invalid_argument("quantile_bm: theta estimate must be positive");
  const GevNorming norm =
      inverse_tilde_transform(fit.scale_hat, *fit.loc_hat, fit.gamma_hat, th);

  TargetEstimate est;
  est.kind = TargetKind::quantile;
  est.pipeline = theta ? Pipeline::bm_theta_corrected : Pipeline::bm;
  est.p = p;
  est.r = r;
  est.fit = fit;
  est.theta = theta;
  est.value = gev_tail_quantile(norm.loc, norm.scale, fit.gamma_hat, r, p);
  return est;
}

TargetEstimate return_level_bm(const Series& series, std::size_t r, double T,
                               BlockScheme scheme) {
  if (!(T > 1.0)) throw invalid_argument("return_level_bm: T must be > 1");
  const BlockMaximaSample bm = block_maxima(series.view(), r, scheme);
  const TailFit fit = fit_gev_ml(bm);
  check_fit(fit, "return_level_bm");

  TargetEstimate est;
  est.kind = TargetKind::return_level;
  est.pipeline = Pipeline::bm;
  est.T = T;
  est.r = r;
  est.fit = fit;
  est.value = gev_return_level(*fit.loc_hat, fit.scale_hat, fit.gamma_hat, T);
  return est;
}

TargetEstimate return_level_pot(const Series& series, std::size_t k,
                                std::size_t r, double T,
                                const ThetaEstimate& theta) {
  if (!(T > 1.0)) throw invalid_argument("return_level_pot: T must be > 1");
  if (!(theta.theta_hat > 0.0 && theta.theta_hat <= 1.0))
    throw invalid_argument("return_level_pot: theta must lie in (0,1]");
  const std::size_t n = series.size();
  const double k_over_n = static_cast<double>(k) / static_cast<double>(n);
  const double p_anchor = 1.0 / static_cast<double>(r);
  if (!(p_anchor <= k_over_n))
    throw extrapolation_error("return_level_pot: requires 1/r <= k/n");

  const ExcessSample ex = threshold_excesses(series, k);
  const TailFit fit = fit_gp_ml(ex);
  check_fit(fit, "return_level_pot");

  // POT estimates of the i.i.d. norming constants at block size r: the
  // location is the POT quantile at p = 1/r, the scale rescales sigma from
  // threshold level n/k to level r by regular variation.
  const double loc_r = gp_tail_quantile(ex.threshold, fit.scale_hat,
                                        fit.gamma_hat, k_over_n, p_anchor);
  const double scale_r =
      fit.scale_hat *
      std::pow(static_cast<double>(k) * static_cast<double>(r) /
                   static_cast<double>(n),
               fit.gamma_hat);

  const GevNorming tilde =
      tilde_transform(scale_r, loc_r, fit.gamma_hat, theta.theta_hat);

  TargetEstimate est;
  est.kind = TargetKind::return_level;
  est.pipeline = Pipeline::pot_theta_corrected;
  est.T = T;
  est.r = r;
  est.fit = fit;
  est.theta = theta;
  est.value = gev_return_level(tilde.loc, tilde.scale, fit.gamma_hat, T);
  return est;
}

const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::quantile: return "quantile";
    case TargetKind::tail_prob: return "tail_prob";
    case TargetKind::return_level: return "return_level";
  }
  return "?";
}

const char* pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::pot: return "pot";
    case Pipeline::bm: return "bm";
    case Pipeline::bm_theta_corrected: return "bm_theta_corrected";
    case Pipeline::pot_theta_corrected: return "pot_theta_corrected";
  }
  return "?";
}

std::string target_csv_header() {
  return "kind,params,pipeline,value,gamma_hat,theta_hat";
}

std::string target_csv_row(const TargetEstimate& est) {
  std::string params;
  switch (est.kind) {
    case TargetKind::quantile:
      params = "p=" + format_double(est.p);
      if (est.r) params += ";r=" + std::to_string(est.r);
      break;
    case TargetKind::tail_prob:
      params = "x=" + format_double(est.x);
      break;
    case TargetKind::return_level:
      params = "T=" + format_double(est.T) + ";r=" + std::to_string(est.r);
      break;
  }
  return csv_join({target_kind_name(est.kind), params,
                   pipeline_name(est.pipeline), csv_field(est.value),
                   csv_field(est.fit.gamma_hat),
                   est.theta ? csv_field(est.theta->theta_hat) : std::string()});
}

}  // namespace evt
