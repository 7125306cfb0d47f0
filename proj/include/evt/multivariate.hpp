#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evt {

// Row-major n x d matrix of observations, d >= 2.
struct MultivariateSample {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> data;

  double at(std::size_t i, std::size_t j) const { return data[i * d + j]; }
  static MultivariateSample from_rows(const std::vector<std::vector<double>>& rows);
};

enum class DepKind { independence, comonotone, logistic };

// Analytic reference dependence structures with uniform marginals.
struct DependenceModel {
  DepKind kind = DepKind::independence;
  double alpha = 1.0;  // logistic parameter in (0,1]; 1 = independence
  std::size_t d = 2;

  static DependenceModel independence(std::size_t d);
  static DependenceModel comonotone(std::size_t d);
  static DependenceModel logistic(double alpha, std::size_t d);
};

// Empirical stable tail dependence function at x in [0,1]^d:
//   (1/k) #{ i : rank_j(X_ij) > n - k x_j for some j }
// with maximal ranks on ties and Fhat = rank/n.
double empirical_stdf(const MultivariateSample& sample, std::size_t k,
                      std::span<const double> x);

// Closed forms: sum (independence), max (comonotone),
// (sum x_j^(1/alpha))^alpha (logistic).
double true_stdf(const DependenceModel& model, std::span<const double> x);

MultivariateSample sample_dependence(const DependenceModel& model,
                                     std::size_t n, std::uint64_t seed);

// L-hat over the grid {0, 0.1, ..., 1}^d, one CSV row per grid point with
// columns x_1..x_d, L_hat, L_true (L_true blank without a model).
std::string stdf_grid_csv(const MultivariateSample& sample, std::size_t k,
                          const DependenceModel* model = nullptr);

std::string format_dependence(const DependenceModel& model);
DependenceModel parse_dependence(std::string_view text, std::size_t d);

}  // namespace evt
