#include "evt/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "evt/errors.hpp"
#include "evt/io.hpp"
#include "evt/rng.hpp"

namespace evt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* what) {
  if (!ok) throw invalid_parameter(what);
}

void check_prob(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw invalid_argument("probability must lie in (0,1)");
}

double std_normal_quantile(double u) {
  return std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
}

// Marsaglia-Tsang squeeze method, unit scale. Rejection consumes a variable
// number of stream draws; determinism per seed is unaffected.
double gamma_draw(SplitMix64& g, double shape) {
  if (shape < 1.0) {
    const double u = g.next_unit();
    return gamma_draw(g, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = std_normal_quantile(g.next_unit());
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = g.next_unit();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

boost::math::students_t_distribution<double> t_dist(const DistributionSpec& s) {
  return boost::math::students_t_distribution<double>(s.p[0]);
}
boost::math::gamma_distribution<double> gamma_dist(const DistributionSpec& s) {
  return boost::math::gamma_distribution<double>(s.p[0], 1.0 / s.p[1]);
}
boost::math::normal_distribution<double> normal_dist(const DistributionSpec& s) {
  return boost::math::normal_distribution<double>(s.p[0], s.p[1]);
}

// (t^gamma - 1) / gamma with the log limit at gamma = 0; t > 0.
double power_growth(double t, double gamma) {
  const double lt = std::log(t);
  if (std::abs(gamma) < kShapeZeroTol) return lt;
  return std::expm1(gamma * lt) / gamma;
}

DistributionSpec make(Family f, std::initializer_list<double> params) {
  DistributionSpec s;
  s.family = f;
  s.nparams = static_cast<int>(params.size());
  int i = 0;
  for (double v : params) {
    require(std::isfinite(v), "distribution parameters must be finite");
    s.p[i++] = v;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories

DistributionSpec DistributionSpec::gev(double gamma, double loc, double scale) {
  require(std::isfinite(gamma) && std::isfinite(loc), "gev: non-finite parameter");
  require(scale > 0.0, "gev: scale must be > 0");
  return make(Family::gev, {gamma, loc, scale});
}
DistributionSpec DistributionSpec::gp(double gamma, double scale) {
  require(std::isfinite(gamma), "gp: non-finite shape");
  require(scale > 0.0, "gp: scale must be > 0");
  return make(Family::gp, {gamma, scale});
}
DistributionSpec DistributionSpec::exponential(double rate) {
  require(rate > 0.0, "exponential: rate must be > 0");
  return make(Family::exponential, {rate});
}
DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo,
          "uniform: need lo < hi");
  return make(Family::uniform, {lo, hi});
}
DistributionSpec DistributionSpec::arcsin() { return make(Family::arcsin, {}); }
DistributionSpec DistributionSpec::burr(double eta, double tau, double lambda) {
  require(eta > 0.0 && tau > 0.0 && lambda > 0.0,
          "burr: all parameters must be > 0");
  return make(Family::burr, {eta, tau, lambda});
}
DistributionSpec DistributionSpec::student_t(double nu) {
  require(nu > 0.0, "t: degrees of freedom must be > 0");
  return make(Family::student_t, {nu});
}
DistributionSpec DistributionSpec::cauchy(double loc, double scale) {
  require(std::isfinite(loc), "cauchy: non-finite location");
  require(scale > 0.0, "cauchy: scale must be > 0");
  return make(Family::cauchy, {loc, scale});
}
DistributionSpec DistributionSpec::weibull(double scale, double shape) {
  require(scale > 0.0 && shape > 0.0, "weibull: parameters must be > 0");
  return make(Family::weibull, {scale, shape});
}
DistributionSpec DistributionSpec::gamma(double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, "gamma: parameters must be > 0");
  return make(Family::gamma, {shape, rate});
}
DistributionSpec DistributionSpec::normal(double mu, double sigma) {
  require(std::isfinite(mu), "normal: non-finite mean");
  require(sigma > 0.0, "normal: sigma must be > 0");
  return make(Family::normal, {mu, sigma});
}
DistributionSpec DistributionSpec::frechet(double alpha, double scale) {
  require(alpha > 0.0 && scale > 0.0, "frechet: parameters must be > 0");
  return make(Family::frechet, {alpha, scale});
}
DistributionSpec DistributionSpec::reverse_weibull(double beta, double loc,
                                                   double scale) {
  require(beta > 0.0, "revweibull: shape must be > 0");
  require(std::isfinite(loc), "revweibull: non-finite location");
  require(scale > 0.0, "revweibull: scale must be > 0");
  return make(Family::reverse_weibull, {beta, loc, scale});
}
DistributionSpec DistributionSpec::composite(double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, "composite: parameters must be > 0");
  return make(Family::composite, {alpha, beta});
}

// ---------------------------------------------------------------------------
// GEV / GP

double gev_cdf(double x, double gamma, double loc, double scale) {
  require(scale > 0.0, "gev: scale must be > 0");
  const double z = (x - loc) / scale;
  if (std::abs(gamma) < kShapeZeroTol) return std::exp(-std::exp(-z));
  const double w = 1.0 + gamma * z;
  if (w <= 0.0) return gamma > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(w, -1.0 / gamma));
}

double gev_quantile(double p, double gamma, double loc, double scale) {
  require(scale > 0.0, "gev: scale must be > 0");
  check_prob(p);
  const double t = -std::log(p);
  if (std::abs(gamma) < kShapeZeroTol) return loc - scale * std::log(t);
  return loc + scale * std::expm1(-gamma * std::log(t)) / gamma;
}

double gp_cdf(double x, double gamma, double scale) {
  require(scale > 0.0, "gp: scale must be > 0");
  if (x <= 0.0) return 0.0;
  if (std::abs(gamma) < kShapeZeroTol) return -std::expm1(-x / scale);
  const double w = 1.0 + gamma * x / scale;
  if (w <= 0.0) return 1.0;  // beyond the upper endpoint (gamma < 0)
  return -std::expm1(-std::log(w) / gamma);
}

double gp_quantile(double p, double gamma, double scale) {
  require(scale > 0.0, "gp: scale must be > 0");
  check_prob(p);
  const double l = std::log1p(-p);  // log(1-p)
  if (std::abs(gamma) < kShapeZeroTol) return -scale * l;
  return scale * std::expm1(-gamma * l) / gamma;
}

// ---------------------------------------------------------------------------
// cdf / quantile

double cdf(const DistributionSpec& s, double x) {
  switch (s.family) {
    case Family::gev:
      return gev_cdf(x, s.p[0], s.p[1], s.p[2]);
    case Family::gp:
      return gp_cdf(x, s.p[0], s.p[1]);
    case Family::exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-s.p[0] * x);
    case Family::uniform: {
      if (x <= s.p[0]) return 0.0;
      if (x >= s.p[1]) return 1.0;
      return (x - s.p[0]) / (s.p[1] - s.p[0]);
    }
    case Family::arcsin: {
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return 2.0 / kPi * std::asin(std::sqrt(x));
    }
    case Family::burr: {
      if (x <= 0.0) return 0.0;
      return -std::expm1(-s.p[2] * std::log1p(std::pow(x, s.p[1]) / s.p[0]));
    }
    case Family::student_t:
      return boost::math::cdf(t_dist(s), x);
    case Family::cauchy:
      return 0.5 + std::atan((x - s.p[0]) / s.p[1]) / kPi;
    case Family::weibull:
      return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / s.p[0], s.p[1]));
    case Family::gamma:
      return x <= 0.0 ? 0.0 : boost::math::cdf(gamma_dist(s), x);
    case Family::normal:
      return boost::math::cdf(normal_dist(s), x);
    case Family::frechet:
      return x <= 0.0 ? 0.0 : std::exp(-std::pow(x / s.p[1], -s.p[0]));
    case Family::reverse_weibull:
      return x >= s.p[1] ? 1.0
                         : std::exp(-std::pow((s.p[1] - x) / s.p[2], s.p[0]));
    case Family::composite:
      return x < 0.0 ? 0.0 : std::exp(-std::pow(1.0 + std::pow(x, s.p[0]), -s.p[1]));
  }
  throw invalid_parameter("unknown family");
}

double quantile(const DistributionSpec& s, double p) {
  check_prob(p);
  switch (s.family) {
    case Family::gev:
      return gev_quantile(p, s.p[0], s.p[1], s.p[2]);
    case Family::gp:
      return gp_quantile(p, s.p[0], s.p[1]);
    case Family::exponential:
      return -std::log1p(-p) / s.p[0];
    case Family::uniform:
      return s.p[0] + (s.p[1] - s.p[0]) * p;
    case Family::arcsin: {
      const double t = std::sin(kPi * p / 2.0);
      return t * t;
    }
    case Family::burr:
      return std::pow(s.p[0] * std::expm1(-std::log1p(-p) / s.p[2]),
                      1.0 / s.p[1]);
    case Family::student_t:
      return boost::math::quantile(t_dist(s), p);
    case Family::cauchy:
      return s.p[0] + s.p[1] * std::tan(kPi * (p - 0.5));
    case Family::weibull:
      return s.p[0] * std::pow(-std::log1p(-p), 1.0 / s.p[1]);
    case Family::gamma:
      return boost::math::quantile(gamma_dist(s), p);
    case Family::normal:
      return s.p[0] + s.p[1] * std_normal_quantile(p);
    case Family::frechet:
      return s.p[1] * std::pow(-std::log(p), -1.0 / s.p[0]);
    case Family::reverse_weibull:
      return s.p[1] - s.p[2] * std::pow(-std::log(p), 1.0 / s.p[0]);
    case Family::composite: {
      const double t = -std::log(p);
      if (t >= 1.0) return 0.0;  // atom at zero carries mass e^-1
      return std::pow(std::pow(t, -1.0 / s.p[1]) - 1.0, 1.0 / s.p[0]);
    }
  }
  throw invalid_parameter("unknown family");
}

double support_upper_endpoint(const DistributionSpec& s) {
  switch (s.family) {
    case Family::gev:
      return s.p[0] < 0.0 ? s.p[1] - s.p[2] / s.p[0] : kInf;
    case Family::gp:
      return s.p[0] < 0.0 ? -s.p[1] / s.p[0] : kInf;
    case Family::uniform:
      return s.p[1];
    case Family::arcsin:
      return 1.0;
    case Family::reverse_weibull:
      return s.p[1];
    default:
      return kInf;
  }
}

// ---------------------------------------------------------------------------
// Tail quantile functions

// Inverse survival function, q in (0,1); written against log1p/expm1 so that
// U(t) stays accurate for large t.
static double inverse_survival(const DistributionSpec& s, double q) {
  switch (s.family) {
    case Family::gev: {
      const double t = -std::log1p(-q);  // -log F at the target point
      if (std::abs(s.p[0]) < kShapeZeroTol)
        return s.p[1] - s.p[2] * std::log(t);
      return s.p[1] + s.p[2] * std::expm1(-s.p[0] * std::log(t)) / s.p[0];
    }
    case Family::gp: {
      if (std::abs(s.p[0]) < kShapeZeroTol) return -s.p[1] * std::log(q);
      return s.p[1] * std::expm1(-s.p[0] * std::log(q)) / s.p[0];
    }
    case Family::exponential:
      return -std::log(q) / s.p[0];
    case Family::uniform:
      return s.p[1] - (s.p[1] - s.p[0]) * q;
    case Family::arcsin: {
      const double t = std::cos(kPi * q / 2.0);
      return t * t;
    }
    case Family::burr:
      return std::pow(s.p[0] * std::expm1(-std::log(q) / s.p[2]), 1.0 / s.p[1]);
    case Family::student_t:
      return boost::math::quantile(boost::math::complement(t_dist(s), q));
    case Family::cauchy:
      return s.p[0] + s.p[1] * std::tan(kPi * (0.5 - q));
    case Family::weibull:
      return s.p[0] * std::pow(-std::log(q), 1.0 / s.p[1]);
    case Family::gamma:
      return boost::math::quantile(boost::math::complement(gamma_dist(s), q));
    case Family::normal:
      return boost::math::quantile(boost::math::complement(normal_dist(s), q));
    case Family::frechet:
      return s.p[1] * std::pow(-std::log1p(-q), -1.0 / s.p[0]);
    case Family::reverse_weibull:
      return s.p[1] - s.p[2] * std::pow(-std::log1p(-q), 1.0 / s.p[0]);
    case Family::composite: {
      const double t = -std::log1p(-q);
      if (t >= 1.0) return 0.0;
      return std::pow(std::pow(t, -1.0 / s.p[1]) - 1.0, 1.0 / s.p[0]);
    }
  }
  throw invalid_parameter("unknown family");
}

double tail_quantile_U(const DistributionSpec& s, double t) {
  if (!(t > 1.0)) throw invalid_argument("tail_quantile_U: t must be > 1");
  return inverse_survival(s, 1.0 / t);
}

double tail_quantile_V(const DistributionSpec& s, double t) {
  if (!(t > 1.0)) throw invalid_argument("tail_quantile_V: t must be > 1");
  switch (s.family) {
    // Families whose -log F inverts in closed form keep full precision.
    case Family::gev:
      return s.p[1] + s.p[2] * power_growth(t, s.p[0]);
    case Family::frechet:
      return s.p[1] * std::pow(t, 1.0 / s.p[0]);
    case Family::reverse_weibull:
      return s.p[1] - s.p[2] * std::pow(t, -1.0 / s.p[0]);
    case Family::composite:
      return std::pow(std::expm1(std::log(t) / s.p[1]), 1.0 / s.p[0]);
    default:
      return quantile(s, std::exp(-1.0 / t));
  }
}

// ---------------------------------------------------------------------------
// Sampling

Series sample(const DistributionSpec& s, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw invalid_argument("sample: n must be >= 1");
  SplitMix64 g(seed);
  Series out;
  out.values.resize(n);
  out.kind = SeriesKind::iid;
  out.seed = seed;
  out.model = format_spec(s);

  switch (s.family) {
    case Family::normal:
      for (auto& v : out.values)
        v = s.p[0] + s.p[1] * std_normal_quantile(g.next_unit());
      break;
    case Family::gamma:
      for (auto& v : out.values) v = gamma_draw(g, s.p[0]) / s.p[1];
      break;
    case Family::student_t: {
      const double nu = s.p[0];
      for (auto& v : out.values) {
        const double z = std_normal_quantile(g.next_unit());
        const double chi2 = 2.0 * gamma_draw(g, nu / 2.0);
        v = z / std::sqrt(chi2 / nu);
      }
      break;
    }
    default:
      for (auto& v : out.values) v = quantile(s, g.next_unit());
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ground truth catalog

TruthRecord truth(const DistributionSpec& s) {
  const auto fin = [](double v) { return ExtReal::finite(v); };
  const auto minf = ExtReal::minus_infinity();
  switch (s.family) {
    case Family::gev:
      return {s.p[0], fin(-1.0), minf};
    case Family::gp:
      return {s.p[0], minf, fin(-1.0)};
    case Family::exponential:
      return {0.0, minf, fin(-1.0)};
    case Family::uniform:
      return {-1.0, minf, fin(-1.0)};
    case Family::arcsin:
      return {-2.0, fin(-2.0), fin(-1.0)};
    case Family::burr: {
      const double lambda = s.p[2], tau = s.p[1];
      return {1.0 / (lambda * tau), fin(-1.0 / lambda),
              fin(std::max(-1.0 / lambda, -1.0))};
    }
    case Family::student_t: {
      const double nu = s.p[0];
      if (nu == 1.0) return {1.0, fin(-2.0), fin(-2.0)};  // t_1 = Cauchy
      return {1.0 / nu, fin(-2.0 / nu), fin(std::max(-2.0 / nu, -1.0))};
    }
    case Family::cauchy:
      return {1.0, fin(-2.0), fin(-2.0)};
    case Family::weibull:
      if (s.p[1] == 1.0)
        throw unsupported_truth(
            "weibull with shape 1 has no catalog row; use exponential(rate)");
      return {0.0, fin(0.0), fin(0.0)};
    case Family::gamma:
      return {0.0, fin(0.0), fin(0.0)};
    case Family::normal:
      return {0.0, fin(0.0), fin(0.0)};
    case Family::frechet:
      return {1.0 / s.p[0], fin(-1.0), minf};
    case Family::reverse_weibull:
      return {-1.0 / s.p[0], fin(-1.0), minf};
    case Family::composite: {
      const double alpha = s.p[0], beta = s.p[1];
      return {1.0 / (alpha * beta), fin(std::max(-1.0 / beta, -1.0)),
              fin(-1.0 / beta)};
    }
  }
  throw unsupported_truth("unknown family");
}

bool truth_compatible(const TruthRecord& rec) {
  const auto below_minus_one = [](const ExtReal& r) {
    return r.is_minus_infinity() || r.finite_value() < -1.0;
  };
  const bool pot_low = below_minus_one(rec.rho_pot);
  const bool bm_low = below_minus_one(rec.rho_bm);
  if (pot_low && bm_low) return false;
  if (pot_low) return rec.rho_bm == ExtReal::finite(-1.0);
  if (bm_low) return rec.rho_pot == ExtReal::finite(-1.0);
  return rec.rho_pot == rec.rho_bm;
}

// ---------------------------------------------------------------------------
// Spec grammar

const char* family_name(Family f) {
  switch (f) {
    case Family::gev: return "gev";
    case Family::gp: return "gp";
    case Family::exponential: return "exponential";
    case Family::uniform: return "uniform";
    case Family::arcsin: return "arcsin";
    case Family::burr: return "burr";
    case Family::student_t: return "t";
    case Family::cauchy: return "cauchy";
    case Family::weibull: return "weibull";
    case Family::gamma: return "gamma";
    case Family::normal: return "normal";
    case Family::frechet: return "frechet";
    case Family::reverse_weibull: return "revweibull";
    case Family::composite: return "composite";
  }
  return "?";
}

std::string format_spec(const DistributionSpec& s) {
  std::string out = family_name(s.family);
  out += '(';
  for (int i = 0; i < s.nparams; ++i) {
    if (i) out += ',';
    out += format_double(s.p[i]);
  }
  out += ')';
  return out;
}

namespace {

std::vector<double> parse_args(std::string_view body) {
  std::vector<double> args;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string_view::npos) comma = body.size();
    std::string_view tok = body.substr(pos, comma - pos);
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw invalid_argument("spec grammar: bad number '" + std::string(tok) + "'");
    args.push_back(v);
    pos = comma + 1;
  }
  return args;
}

}  // namespace

DistributionSpec parse_spec(std::string_view text) {
  std::string_view name = text;
  std::vector<double> a;
  const std::size_t open = text.find('(');
  if (open != std::string_view::npos) {
    if (text.back() != ')')
      throw invalid_argument("spec grammar: missing ')' in '" + std::string(text) + "'");
    name = text.substr(0, open);
    a = parse_args(text.substr(open + 1, text.size() - open - 2));
  }
  const auto want = [&](std::size_t lo, std::size_t hi) {
    if (a.size() < lo || a.size() > hi)
      throw invalid_argument("spec grammar: wrong parameter count for '" +
                             std::string(name) + "'");
  };
  const auto arg = [&](std::size_t i, double dflt) {
    return i < a.size() ? a[i] : dflt;
  };

  if (name == "gev") { want(1, 3); return DistributionSpec::gev(a[0], arg(1, 0), arg(2, 1)); }
  if (name == "gp") { want(1, 2); return DistributionSpec::gp(a[0], arg(1, 1)); }
  if (name == "exponential" || name == "exp") { want(0, 1); return DistributionSpec::exponential(arg(0, 1)); }
  if (name == "uniform") { want(0, 2); return DistributionSpec::uniform(arg(0, 0), arg(1, 1)); }
  if (name == "arcsin") { want(0, 0); return DistributionSpec::arcsin(); }
  if (name == "burr") { want(3, 3); return DistributionSpec::burr(a[0], a[1], a[2]); }
  if (name == "t" || name == "studentt") { want(1, 1); return DistributionSpec::student_t(a[0]); }
  if (name == "cauchy") { want(0, 2); return DistributionSpec::cauchy(arg(0, 0), arg(1, 1)); }
  if (name == "weibull") { want(2, 2); return DistributionSpec::weibull(a[0], a[1]); }
  if (name == "gamma") { want(1, 2); return DistributionSpec::gamma(a[0], arg(1, 1)); }
  if (name == "normal") { want(0, 2); return DistributionSpec::normal(arg(0, 0), arg(1, 1)); }
  if (name == "frechet") { want(1, 2); return DistributionSpec::frechet(a[0], arg(1, 1)); }
  if (name == "revweibull" || name == "reverse_weibull") {
    want(1, 3);
    return DistributionSpec::reverse_weibull(a[0], arg(1, 0), arg(2, 1));
  }
  if (name == "composite") { want(2, 2); return DistributionSpec::composite(a[0], a[1]); }
  throw invalid_argument("spec grammar: unknown family '" + std::string(name) + "'");
}

}  // namespace evt
