#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace evt::test {

// Kolmogorov-Smirnov sup-distance between the empirical cdf of `sample` and
// the cdf `f`.
inline double ks_distance(std::span<const double> sample,
                          const std::function<double(double)>& f) {
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fx = f(x[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - fx));
    d = std::max(d, std::abs(fx - static_cast<double>(i) / n));
  }
  return d;
}

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_sd(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Midpoint-rule quadrature of f over (0,1); enough for smooth integrands.
inline double integrate_unit(const std::function<double(double)>& f,
                             std::size_t cells = 200000) {
  double acc = 0.0;
  const double h = 1.0 / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i)
    acc += f((static_cast<double>(i) + 0.5) * h);
  return acc * h;
}

}  // namespace evt::test
