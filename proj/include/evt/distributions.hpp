#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "evt/ext_real.hpp"
#include "evt/series.hpp"

namespace evt {

// Shape values below this magnitude are evaluated with the gamma -> 0 limit
// formulas to avoid cancellation in ((.)^(-gamma) - 1) / gamma.
inline constexpr double kShapeZeroTol = 1e-8;

enum class Family {
  gev,
  gp,
  exponential,
  uniform,
  arcsin,
  burr,
  student_t,
  cauchy,
  weibull,
  gamma,
  normal,
  frechet,
  reverse_weibull,
  composite,
};

// A member of the simulation catalog. Construct through the factories, which
// validate the family-specific parameter constraints.
//
// Parameter layout (in order):
//   gev(gamma, loc, scale)           cdf exp(-(1 + g (x-b)/a)^(-1/g))
//   gp(gamma, scale)                 cdf 1 - (1 + g x / s)^(-1/g), x >= 0
//   exponential(rate)
//   uniform(lo, hi)
//   arcsin()                         Beta(1/2, 1/2) on (0,1)
//   burr(eta, tau, lambda)           cdf 1 - (1 + x^tau / eta)^(-lambda)
//   student_t(nu)
//   cauchy(loc, scale)
//   weibull(scale, shape)            cdf 1 - exp(-(x/scale)^shape)
//   gamma(shape, rate)
//   normal(mu, sigma)                sigma is the standard deviation
//   frechet(alpha, scale)            cdf exp(-(x/scale)^(-alpha)), x > 0
//   reverse_weibull(beta, loc, scale) cdf exp(-((loc-x)/scale)^beta), x <= loc
//   composite(alpha, beta)           cdf exp(-(1 + x^alpha)^(-beta)), x >= 0
//
// The composite family carries an atom of mass e^-1 at zero; it exists for
// its upper tail only.
struct DistributionSpec {
  Family family = Family::uniform;
  std::array<double, 3> p{0.0, 0.0, 0.0};
  int nparams = 0;

  static DistributionSpec gev(double gamma, double loc = 0.0, double scale = 1.0);
  static DistributionSpec gp(double gamma, double scale = 1.0);
  static DistributionSpec exponential(double rate = 1.0);
  static DistributionSpec uniform(double lo = 0.0, double hi = 1.0);
  static DistributionSpec arcsin();
  static DistributionSpec burr(double eta, double tau, double lambda);
  static DistributionSpec student_t(double nu);
  static DistributionSpec cauchy(double loc = 0.0, double scale = 1.0);
  static DistributionSpec weibull(double scale, double shape);
  static DistributionSpec gamma(double shape, double rate = 1.0);
  static DistributionSpec normal(double mu = 0.0, double sigma = 1.0);
  static DistributionSpec frechet(double alpha, double scale = 1.0);
  static DistributionSpec reverse_weibull(double beta, double loc = 0.0,
                                          double scale = 1.0);
  static DistributionSpec composite(double alpha, double beta);

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

// Ground-truth extreme value index and second-order indices of a catalog
// member. rho values are <= 0, possibly -inf.
struct TruthRecord {
  double gamma;
  ExtReal rho_pot;
  ExtReal rho_bm;
};

double cdf(const DistributionSpec& spec, double x);
double quantile(const DistributionSpec& spec, double p);

// Right end-point of the support; +inf when unbounded.
double support_upper_endpoint(const DistributionSpec& spec);

// n i.i.d. draws. Inverse transform wherever the quantile has a closed form;
// normal and gamma use standard samplers. Identical (spec, n, seed) give
// bit-identical output.
Series sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

TruthRecord truth(const DistributionSpec& spec);

// Tail quantile functions U(t) = F^{-1}(1 - 1/t) and V(t) = F^{-1}(e^{-1/t}),
// t > 1. U feeds threshold-based analysis, V block-maxima analysis.
double tail_quantile_U(const DistributionSpec& spec, double t);
double tail_quantile_V(const DistributionSpec& spec, double t);

// GEV / GP family evaluated directly from parameters.
double gev_cdf(double x, double gamma, double loc, double scale);
double gev_quantile(double p, double gamma, double loc, double scale);
double gp_cdf(double x, double gamma, double scale);
double gp_quantile(double p, double gamma, double scale);

// Checks the pairing rule between rho_pot and rho_bm: finite values in
// [-1, 0] coincide, and a value below -1 (or -inf) on one side forces -1 on
// the other. The Cauchy member is the documented exception.
bool truth_compatible(const TruthRecord& rec);

// Compact spec grammar "family(p1,p2,...)" used by the CLI and report files,
// e.g. "burr(1,1,1)", "frechet(1)", "gp(0.5,1)".
std::string format_spec(const DistributionSpec& spec);
DistributionSpec parse_spec(std::string_view text);

const char* family_name(Family f);

}  // namespace evt
