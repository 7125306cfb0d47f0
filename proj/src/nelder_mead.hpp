#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace evt::detail {

struct NmResult {
  std::vector<double> x;
  double fmax = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// Derivative-free simplex maximization. The objective may return -inf to
// encode an infeasible point; the start point must be feasible.
template <typename F>
NmResult nelder_mead_max(F&& f, const std::vector<double>& x0,
                         const std::vector<double>& step, double ftol,
                         double xtol, int max_iter) {
  const std::size_t d = x0.size();
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> v(d + 1, x0);
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i < d; ++i) v[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= d; ++i) fv[i] = -f(v[i]);  // minimize -f

  const auto order = [&] {
    std::vector<std::size_t> idx(d + 1);
    for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> v2(d + 1);
    std::vector<double> f2(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      v2[i] = v[idx[i]];
      f2[i] = fv[idx[i]];
    }
    v.swap(v2);
    fv.swap(f2);
  };

  NmResult res;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    order();

    double spread = std::abs(fv[d] - fv[0]);
    double diam = 0.0;
    for (std::size_t i = 1; i <= d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        diam = std::max(diam, std::abs(v[i][j] - v[0][j]));
    if (std::isfinite(fv[d]) && spread <= ftol * (std::abs(fv[0]) + 1e-300) &&
        diam <= xtol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) centroid[j] += v[i][j];
    }
    for (std::size_t j = 0; j < d; ++j) centroid[j] /= static_cast<double>(d);

    const auto at = [&](double coef) {
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j)
        x[j] = centroid[j] + coef * (v[d][j] - centroid[j]);
      return x;
    };

    const auto xr = at(-1.0);
    double fr = -f(xr);
    if (fr < fv[0]) {
      const auto xe = at(-2.0);
      const double fe = -f(xe);
      if (fe < fr) {
        v[d] = xe;
        fv[d] = fe;
      } else {
        v[d] = xr;
        fv[d] = fr;
      }
    } else if (fr < fv[d - 1]) {
      v[d] = xr;
      fv[d] = fr;
    } else {
      const bool outside = fr < fv[d];
      const auto xc = at(outside ? -0.5 : 0.5);
      const double fc = -f(xc);
      if (fc < std::min(fr, fv[d])) {
        v[d] = xc;
        fv[d] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t j = 0; j < d; ++j)
            v[i][j] = v[0][j] + 0.5 * (v[i][j] - v[0][j]);
          fv[i] = -f(v[i]);
        }
      }
    }
    if (fv[d] == inf && fv[0] == inf) break;  // nowhere feasible
  }
  order();
  res.x = v[0];
  res.fmax = -fv[0];
  res.iterations = iter;
  return res;
}

}  // namespace evt::detail
