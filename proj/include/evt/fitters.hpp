#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "evt/blocking.hpp"

namespace evt {

enum class FitMethod { gev_ml, gev_pwm, gp_ml, gp_pwm, hill };

const char* fit_method_name(FitMethod m);

// A fitted tail model. `loc_hat` is absent for threshold-side fits, where the
// location is the threshold itself. Non-convergence is reported through
// `converged`, not an exception, so benchmark loops can count failures.
struct TailFit {
  FitMethod method = FitMethod::gev_ml;
  double gamma_hat = 0.0;
  std::optional<double> loc_hat;
  double scale_hat = 0.0;
  std::size_t tuning = 0;  // block size r for BM fits, k for POT fits
  bool converged = false;
  std::size_t n_used = 0;
  std::optional<double> log_likelihood;  // ML fits only
};

// Probability weighted moments of a GEV sample, matched to the first three
// theoretical moments. The shape solves
//   (3 b2 - b0) / (2 b1 - b0) = (3^g - 1) / (2^g - 1)
// by bisection on (-5, 1); location and scale follow from b0, b1.
TailFit fit_gev_pwm(std::span<const double> maxima, std::size_t r = 1);
TailFit fit_gev_pwm(const BlockMaximaSample& maxima);

// GEV maximum likelihood via a simplex search on (gamma, loc, log scale),
// initialized at the PWM fit (moment-matched Gumbel if PWM fails). The shape
// is searched over (-0.99, 5); points violating the support constraint score
// -inf.
TailFit fit_gev_ml(std::span<const double> maxima, std::size_t r = 1);
TailFit fit_gev_ml(const BlockMaximaSample& maxima);

// GP probability weighted moments:
//   b0 = mean excess,  b1 = (1/k) sum_j (1 - (j-1/2)/k) X_{j:k}
//   gamma = 2 - b0/(b0 - 2 b1),  sigma = 2 b0 b1 / (b0 - 2 b1).
TailFit fit_gp_pwm(std::span<const double> excesses, std::size_t k = 0);
TailFit fit_gp_pwm(const ExcessSample& excesses);

// GP maximum likelihood on (gamma, log sigma); same search setup as the GEV
// fit.
TailFit fit_gp_ml(std::span<const double> excesses, std::size_t k = 0);
TailFit fit_gp_ml(const ExcessSample& excesses);

// Hill estimator: mean log-spacing of the top k order statistics over
// X_{n-k:n}. Requires the top k+1 order statistics to be strictly positive.
TailFit hill(std::span<const double> series, std::size_t k);
TailFit hill(const Series& series, std::size_t k);

// Log-likelihoods (sum over observations); -inf outside the support.
double gev_log_likelihood(std::span<const double> x, double gamma, double loc,
                          double scale);
double gp_log_likelihood(std::span<const double> excesses, double gamma,
                         double scale);

// First three sample PWMs b_s = (1/m) sum_j X_{j:m} prod_{l<=s} (j-l)/(m-l).
std::array<double, 3> sample_pwm(std::span<const double> values);
// Plotting-position estimate of E[X (1-F(X))] used by the GP fit.
double gp_sample_pwm_b1(std::span<const double> excesses);
// Theoretical GEV PWMs for the moment-matching identity.
std::array<double, 3> gev_theoretical_pwm(double gamma, double loc, double scale);

std::string tail_fit_csv_header();
std::string tail_fit_csv_row(const TailFit& fit);

}  // namespace evt
