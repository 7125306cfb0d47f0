#include "evt/fitters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "evt/distributions.hpp"
#include "evt/errors.hpp"
#include "evt/io.hpp"
#include "nelder_mead.hpp"

namespace evt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kLn2 = 0.69314718055994531;
constexpr double kLn3 = 1.09861228866810969;

// ML search box for the shape; PWM uses (-5, 1).
constexpr double kMlShapeLo = -0.99;
constexpr double kMlShapeHi = 5.0;

std::size_t count_distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::unique(v.begin(), v.end()) - v.begin();
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// (3^g - 1) / (2^g - 1), strictly increasing, with limit log3/log2 at g = 0.
double pwm_shape_ratio(double g) {
  if (std::abs(g) < kShapeZeroTol) return kLn3 / kLn2;
  return std::expm1(g * kLn3) / std::expm1(g * kLn2);
}

// (1 - Gamma(1-g)) / g with limit -euler_gamma at g = 0.
double gev_loc_coeff(double g) {
  if (std::abs(g) < kShapeZeroTol) return -kEulerGamma;
  return (1.0 - std::tgamma(1.0 - g)) / g;
}

// g / (Gamma(1-g) (2^g - 1)) with limit 1/log2 at g = 0.
double gev_scale_coeff(double g) {
  if (std::abs(g) < kShapeZeroTol) return 1.0 / kLn2;
  return g / (std::tgamma(1.0 - g) * std::expm1(g * kLn2));
}

struct MlSetup {
  std::vector<double> x0;    // (gamma, ..., log scale)
  std::vector<double> step;
};

// Solve A x = b in place; A is a small symmetric matrix stored row-major.
bool solve_small(std::vector<double>& a, std::vector<double>& b) {
  const std::size_t d = b.size();
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < d; ++row)
      if (std::abs(a[row * d + col]) > std::abs(a[pivot * d + col])) pivot = row;
    if (std::abs(a[pivot * d + col]) < 1e-300) return false;
    if (pivot != col) {
      for (std::size_t j = 0; j < d; ++j) std::swap(a[col * d + j], a[pivot * d + j]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t row = col + 1; row < d; ++row) {
      const double f = a[row * d + col] / a[col * d + col];
      for (std::size_t j = col; j < d; ++j) a[row * d + j] -= f * a[col * d + j];
      b[row] -= f * b[col];
    }
  }
  for (std::size_t col = d; col-- > 0;) {
    for (std::size_t j = col + 1; j < d; ++j) b[col] -= a[col * d + j] * b[j];
    b[col] /= a[col * d + col];
  }
  return true;
}

// Finite-difference Newton refinement of a simplex optimum. Sharpens the
// stationarity of the returned point by a few orders of magnitude.
template <typename LL>
void newton_polish(LL&& f, std::vector<double>& x, double& fx) {
  const std::size_t d = x.size();
  const double h = 3e-6;
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> grad(d), hess(d * d);
    for (std::size_t i = 0; i < d; ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fp = f(xp), fm = f(xm);
      if (!std::isfinite(fp) || !std::isfinite(fm)) return;
      grad[i] = (fp - fm) / (2 * h);
      hess[i * d + i] = (fp - 2 * fx + fm) / (h * h);
      for (std::size_t j = i + 1; j < d; ++j) {
        auto xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += h; xpp[j] += h;
        xpm[i] += h; xpm[j] -= h;
        xmp[i] -= h; xmp[j] += h;
        xmm[i] -= h; xmm[j] -= h;
        const double v = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h * h);
        if (!std::isfinite(v)) return;
        hess[i * d + j] = hess[j * d + i] = v;
      }
    }
    std::vector<double> step = grad;
    if (!solve_small(hess, step)) return;  // step = H^{-1} grad
    auto cand = x;
    for (std::size_t i = 0; i < d; ++i) cand[i] -= step[i];
    const double fc = f(cand);
    if (!std::isfinite(fc) || fc + 1e-12 < fx) return;
    x = cand;
    fx = fc;
  }
}

template <typename LL>
TailFit run_ml(LL&& ll, MlSetup setup, FitMethod method, std::size_t tuning,
               std::size_t n_used, bool has_loc) {
  // Wide simplex search from the moment init, a tight restart, then a Newton
  // polish so the returned point meets the stationarity tolerance.
  auto r1 = detail::nelder_mead_max(ll, setup.x0, setup.step, 1e-10, 1e-9, 500);
  std::vector<double> step2(setup.step.size());
  for (std::size_t i = 0; i < step2.size(); ++i) step2[i] = 0.02 * setup.step[i];
  auto r2 = detail::nelder_mead_max(ll, r1.x, step2, 1e-12, 1e-10, 500);

  auto best = r2.fmax >= r1.fmax ? r2 : r1;
  if (std::isfinite(best.fmax)) newton_polish(ll, best.x, best.fmax);

  TailFit fit;
  fit.method = method;
  fit.tuning = tuning;
  fit.n_used = n_used;
  fit.gamma_hat = best.x[0];
  if (has_loc) fit.loc_hat = best.x[1];
  fit.scale_hat = std::exp(best.x.back());
  fit.log_likelihood = best.fmax * static_cast<double>(n_used);
  fit.converged = r2.converged && std::isfinite(best.fmax) &&
                  best.x[0] > kMlShapeLo && best.x[0] < kMlShapeHi;
  return fit;
}

}  // namespace

const char* fit_method_name(FitMethod m) {
  switch (m) {
    case FitMethod::gev_ml: return "gev_ml";
    case FitMethod::gev_pwm: return "gev_pwm";
    case FitMethod::gp_ml: return "gp_ml";
    case FitMethod::gp_pwm: return "gp_pwm";
    case FitMethod::hill: return "hill";
  }
  return "?";
}

std::array<double, 3> sample_pwm(std::span<const double> values) {
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t j = 1; j <= x.size(); ++j) {
    const double v = x[j - 1];
    const double jd = static_cast<double>(j);
    b0 += v;
    b1 += v * (jd - 1.0) / (m - 1.0);
    b2 += v * (jd - 1.0) * (jd - 2.0) / ((m - 1.0) * (m - 2.0));
  }
  return {b0 / m, b1 / m, b2 / m};
}

double gp_sample_pwm_b1(std::span<const double> excesses) {
  std::vector<double> x(excesses.begin(), excesses.end());
  std::sort(x.begin(), x.end());
  const double k = static_cast<double>(x.size());
  double b1 = 0.0;
  for (std::size_t j = 1; j <= x.size(); ++j)
    b1 += x[j - 1] * (1.0 - (static_cast<double>(j) - 0.5) / k);
  return b1 / k;
}

std::array<double, 3> gev_theoretical_pwm(double gamma, double loc, double scale) {
  std::array<double, 3> b{};
  for (int s = 0; s < 3; ++s) {
    const double m = static_cast<double>(s + 1);
    double v;
    if (std::abs(gamma) < kShapeZeroTol) {
      v = loc + scale * (kEulerGamma + std::log(m));
    } else {
      v = loc - scale / gamma +
          scale / gamma * std::tgamma(1.0 - gamma) * std::pow(m, gamma);
    }
    b[s] = v / m;
  }
  return b;
}

// ---------------------------------------------------------------------------
// GEV PWM

TailFit fit_gev_pwm(std::span<const double> maxima, std::size_t r) {
  if (maxima.size() < 3 ||
      count_distinct({maxima.begin(), maxima.end()}) < 3)
    throw degenerate_sample("fit_gev_pwm: need at least 3 distinct values");

  const auto b = sample_pwm(maxima);
  const double denom = 2.0 * b[1] - b[0];
  if (denom == 0.0)
    throw degenerate_moments("fit_gev_pwm: 2*b1 - b0 is zero");
  const double ratio = (3.0 * b[2] - b[0]) / denom;

  double lo = -5.0, hi = 1.0;
  bool bracketed = pwm_shape_ratio(lo) <= ratio && ratio <= pwm_shape_ratio(hi);
  double g;
  if (!bracketed) {
    g = ratio < pwm_shape_ratio(lo) ? lo : hi;
  } else {
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (pwm_shape_ratio(mid) < ratio ? lo : hi) = mid;
    }
    g = 0.5 * (lo + hi);
  }

  TailFit fit;
  fit.method = FitMethod::gev_pwm;
  fit.tuning = r;
  fit.n_used = maxima.size();
  fit.gamma_hat = g;
  fit.scale_hat = denom * gev_scale_coeff(g);
  fit.loc_hat = b[0] + fit.scale_hat * gev_loc_coeff(g);
  fit.converged = bracketed && g < 1.0 && fit.scale_hat > 0.0 &&
                  std::isfinite(fit.scale_hat) && std::isfinite(*fit.loc_hat);
  return fit;
}

TailFit fit_gev_pwm(const BlockMaximaSample& maxima) {
  return fit_gev_pwm(maxima.maxima, maxima.block_size);
}

// ---------------------------------------------------------------------------
// Log-likelihoods

double gev_log_likelihood(std::span<const double> x, double gamma, double loc,
                          double scale) {
  if (!(scale > 0.0)) return kNegInf;
  const double n = static_cast<double>(x.size());
  double acc = 0.0;
  if (std::abs(gamma) < kShapeZeroTol) {
    for (double xi : x) {
      const double z = (xi - loc) / scale;
      acc -= z + std::exp(-z);
    }
  } else {
    for (double xi : x) {
      const double z = (xi - loc) / scale;
      const double w = 1.0 + gamma * z;
      if (w <= 0.0) return kNegInf;
      const double lw = std::log1p(gamma * z);
      const double t = lw / gamma;
      acc -= lw + t + std::exp(-t);
    }
  }
  return acc - n * std::log(scale);
}

double gp_log_likelihood(std::span<const double> excesses, double gamma,
                         double scale) {
  if (!(scale > 0.0)) return kNegInf;
  const double n = static_cast<double>(excesses.size());
  double acc = 0.0;
  if (std::abs(gamma) < kShapeZeroTol) {
    for (double y : excesses) acc -= y / scale;
  } else {
    for (double y : excesses) {
      const double u = y / scale;
      const double w = 1.0 + gamma * u;
      if (w <= 0.0) return kNegInf;
      const double lw = std::log1p(gamma * u);
      acc -= lw + lw / gamma;
    }
  }
  return acc - n * std::log(scale);
}

// ---------------------------------------------------------------------------
// GEV ML

TailFit fit_gev_ml(std::span<const double> maxima, std::size_t r) {
  if (maxima.size() < 3 ||
      count_distinct({maxima.begin(), maxima.end()}) < 3)
    throw degenerate_sample("fit_gev_ml: need at least 3 distinct values");

  double g0 = 0.0, b0 = 0.0, a0 = 1.0;
  bool have_init = false;
  try {
    const TailFit pwm = fit_gev_pwm(maxima, r);
    if (pwm.converged && pwm.gamma_hat > kMlShapeLo) {
      g0 = pwm.gamma_hat;
      b0 = *pwm.loc_hat;
      a0 = pwm.scale_hat;
      have_init = std::isfinite(
          gev_log_likelihood(maxima, g0, b0, std::max(a0, 1e-300)));
    }
  } catch (const degenerate_moments&) {
  }
  if (!have_init) {
    // Gumbel moment init is feasible for any sample.
    a0 = sd_of(maxima) * std::sqrt(6.0) / 3.14159265358979323846;
    b0 = mean_of(maxima) - kEulerGamma * a0;
    g0 = 0.0;
  }

  const double inv_n = 1.0 / static_cast<double>(maxima.size());
  const auto objective = [&](const std::vector<double>& p) {
    if (p[0] <= kMlShapeLo || p[0] >= kMlShapeHi) return kNegInf;
    return gev_log_likelihood(maxima, p[0], p[1], std::exp(p[2])) * inv_n;
  };

  MlSetup setup;
  setup.x0 = {g0, b0, std::log(a0)};
  setup.step = {0.1, 0.3 * a0, 0.2};
  return run_ml(objective, std::move(setup), FitMethod::gev_ml, r,
                maxima.size(), /*has_loc=*/true);
}

TailFit fit_gev_ml(const BlockMaximaSample& maxima) {
  return fit_gev_ml(maxima.maxima, maxima.block_size);
}

// ---------------------------------------------------------------------------
// GP PWM

TailFit fit_gp_pwm(std::span<const double> excesses, std::size_t k) {
  std::vector<double> pos;
  for (double y : excesses)
    if (y > 0.0) pos.push_back(y);
  if (excesses.size() < 2 || count_distinct(pos) < 2)
    throw degenerate_sample("fit_gp_pwm: need at least 2 distinct positive excesses");

  const double b0 = mean_of(excesses);
  const double b1 = gp_sample_pwm_b1(excesses);
  const double denom = b0 - 2.0 * b1;
  if (denom == 0.0)
    throw degenerate_moments("fit_gp_pwm: b0 - 2*b1 is zero");

  TailFit fit;
  fit.method = FitMethod::gp_pwm;
  fit.tuning = k ? k : excesses.size();
  fit.n_used = excesses.size();
  fit.gamma_hat = 2.0 - b0 / denom;
  fit.scale_hat = 2.0 * b0 * b1 / denom;
  fit.converged = fit.gamma_hat < 1.0 && fit.scale_hat > 0.0;
  return fit;
}

TailFit fit_gp_pwm(const ExcessSample& excesses) {
  return fit_gp_pwm(excesses.excesses, excesses.k);
}

// ---------------------------------------------------------------------------
// GP ML

TailFit fit_gp_ml(std::span<const double> excesses, std::size_t k) {
  std::vector<double> pos;
  for (double y : excesses)
    if (y > 0.0) pos.push_back(y);
  if (excesses.size() < 2 || count_distinct(pos) < 2)
    throw degenerate_sample("fit_gp_ml: need at least 2 distinct positive excesses");

  const double y_max = *std::max_element(excesses.begin(), excesses.end());
  double g0 = 0.1, s0 = mean_of(excesses);
  try {
    const TailFit pwm = fit_gp_pwm(excesses, k);
    if (pwm.converged && pwm.gamma_hat > kMlShapeLo) {
      g0 = pwm.gamma_hat;
      s0 = pwm.scale_hat;
    }
  } catch (const degenerate_moments&) {
  }
  if (g0 < 0.0) s0 = std::max(s0, 1.0001 * (-g0) * y_max);  // keep init feasible

  const double inv_n = 1.0 / static_cast<double>(excesses.size());
  const auto objective = [&](const std::vector<double>& p) {
    if (p[0] <= kMlShapeLo || p[0] >= kMlShapeHi) return kNegInf;
    return gp_log_likelihood(excesses, p[0], std::exp(p[1])) * inv_n;
  };

  MlSetup setup;
  setup.x0 = {g0, std::log(s0)};
  setup.step = {0.1, 0.2};
  return run_ml(objective, std::move(setup), FitMethod::gp_ml,
                k ? k : excesses.size(), excesses.size(), /*has_loc=*/false);
}

TailFit fit_gp_ml(const ExcessSample& excesses) {
  return fit_gp_ml(excesses.excesses, excesses.k);
}

// ---------------------------------------------------------------------------
// Hill

TailFit hill(std::span<const double> series, std::size_t k) {
  const std::size_t n = series.size();
  if (k < 1 || k + 1 > n) throw invalid_argument("hill: need 1 <= k <= n-1");

  std::vector<double> top(series.begin(), series.end());
  std::nth_element(top.begin(), top.begin() + (n - k - 1), top.end());
  const double threshold = top[n - k - 1];
  if (!(threshold > 0.0))
    throw positivity_error("hill: top k+1 order statistics must be positive");

  const double log_t = std::log(threshold);
  double acc = 0.0;
  for (std::size_t i = n - k; i < n; ++i) acc += std::log(top[i]) - log_t;

  TailFit fit;
  fit.method = FitMethod::hill;
  fit.tuning = k;
  fit.n_used = k;
  fit.gamma_hat = acc / static_cast<double>(k);
  fit.loc_hat = threshold;
  // Pure-Pareto implied scale at the threshold.
  fit.scale_hat = fit.gamma_hat * threshold;
  fit.converged = fit.gamma_hat > 0.0;
  return fit;
}

TailFit hill(const Series& series, std::size_t k) {
  return hill(series.view(), k);
}

// ---------------------------------------------------------------------------
// Serialization

std::string tail_fit_csv_header() {
  return "method,tuning,gamma_hat,loc_hat,scale_hat,converged,n_used";
}

std::string tail_fit_csv_row(const TailFit& fit) {
  return csv_join({fit_method_name(fit.method), std::to_string(fit.tuning),
                   csv_field(fit.gamma_hat), csv_field(fit.loc_hat),
                   csv_field(fit.scale_hat), fit.converged ? "1" : "0",
                   std::to_string(fit.n_used)});
}

}  // namespace evt
