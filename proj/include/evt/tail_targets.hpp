#pragma once

#include <optional>
#include <string>

#include "evt/blocking.hpp"
#include "evt/extremal_index.hpp"
#include "evt/fitters.hpp"

namespace evt {

enum class TargetKind { quantile, tail_prob, return_level };
enum class Pipeline { pot, bm, bm_theta_corrected, pot_theta_corrected };

struct TargetEstimate {
  TargetKind kind = TargetKind::quantile;
  Pipeline pipeline = Pipeline::pot;
  double value = 0.0;
  // target parameters; only those relevant to `kind` are set
  double p = 0.0;       // quantile level (upper tail)
  double T = 0.0;       // return period, in blocks
  std::size_t r = 0;    // block size
  double x = 0.0;       // tail_prob evaluation point
  TailFit fit;
  std::optional<ThetaEstimate> theta;
};

// --- Plug-in formulas on frozen fits -----------------------------------

// threshold + sigma ((p/(k/n))^-gamma - 1)/gamma; the POT tail expansion with
// 1 - F(threshold) replaced by k/n.
double gp_tail_quantile(double threshold, double sigma, double gamma,
                        double k_over_n, double p);

// loc + scale ((r p)^-gamma - 1)/gamma, the block-maxima tail expansion with
// (loc, scale) the i.i.d. norming constants of block size r.
double gev_tail_quantile(double loc, double scale, double gamma, std::size_t r,
                         double p);

// Quantile of the fitted GEV at 1 - 1/T: loc + scale ((-log(1-1/T))^-gamma -
// 1)/gamma. Applied to the block-maxima fit this is the T-return level of
// blocks of the fitted size.
double gev_return_level(double loc, double scale, double gamma, double T);

// --- Pipelines ----------------------------------------------------------

// GP-ML on the k excesses, then the tail expansion. Requires p < k/n.
TargetEstimate quantile_pot(const Series& series, std::size_t k, double p);

// GEV-ML on block maxima; the fitted (loc, scale) estimate the time-series
// norming constants and are mapped back to the i.i.d. constants through the
// inverse tilde transform before extrapolating. theta absent means theta = 1
// (the i.i.d./naive estimator).
TargetEstimate quantile_bm(const Series& series, std::size_t r, double p,
                           const std::optional<ThetaEstimate>& theta = {},
                           BlockScheme scheme = BlockScheme::disjoint);

// GEV-ML on block maxima, evaluated at 1 - 1/T. No extremal index needed.
TargetEstimate return_level_bm(const Series& series, std::size_t r, double T,
                               BlockScheme scheme = BlockScheme::disjoint);

// GP fit converted to block-maxima norming constants: loc_r = the POT
// quantile at p = 1/r, scale_r = sigma (k r / n)^gamma; then the tilde
// transform with theta, and the GEV quantile at 1 - 1/T.
TargetEstimate return_level_pot(const Series& series, std::size_t k,
                                std::size_t r, double T,
                                const ThetaEstimate& theta);

const char* target_kind_name(TargetKind k);
const char* pipeline_name(Pipeline p);
std::string target_csv_header();
std::string target_csv_row(const TargetEstimate& est);

}  // namespace evt
