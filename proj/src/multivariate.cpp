#include "evt/multivariate.hpp"

#include <algorithm>
#include <cmath>

#include "evt/errors.hpp"
#include "evt/io.hpp"
#include "evt/rng.hpp"

namespace evt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Kanter's representation of the positive alpha-stable law with Laplace
// transform exp(-t^alpha), 0 < alpha < 1.
double positive_stable_draw(SplitMix64& g, double alpha) {
  const double u = kPi * g.next_unit();
  const double w = -std::log(g.next_unit());  // Exp(1)
  const double a = std::pow(std::sin(alpha * u), alpha) *
                   std::pow(std::sin((1.0 - alpha) * u), 1.0 - alpha) /
                   std::sin(u);
  return std::pow(a / std::pow(w, 1.0 - alpha), 1.0 / alpha);
}

}  // namespace

MultivariateSample MultivariateSample::from_rows(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw invalid_argument("multivariate sample: no rows");
  MultivariateSample s;
  s.n = rows.size();
  s.d = rows[0].size();
  if (s.d < 2) throw invalid_argument("multivariate sample: need d >= 2");
  if (s.n < s.d) throw invalid_argument("multivariate sample: need n >= d");
  s.data.reserve(s.n * s.d);
  for (const auto& row : rows) {
    if (row.size() != s.d)
      throw invalid_argument("multivariate sample: ragged rows");
    for (double v : row) {
      if (!std::isfinite(v))
        throw invalid_argument("multivariate sample: non-finite entry");
      s.data.push_back(v);
    }
  }
  return s;
}

DependenceModel DependenceModel::independence(std::size_t d) {
  if (d < 2) throw invalid_parameter("dependence model: need d >= 2");
  return {DepKind::independence, 1.0, d};
}
DependenceModel DependenceModel::comonotone(std::size_t d) {
  if (d < 2) throw invalid_parameter("dependence model: need d >= 2");
  return {DepKind::comonotone, 1.0, d};
}
DependenceModel DependenceModel::logistic(double alpha, std::size_t d) {
  if (d < 2) throw invalid_parameter("dependence model: need d >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw invalid_parameter("logistic: alpha must lie in (0,1]");
  return {DepKind::logistic, alpha, d};
}

double empirical_stdf(const MultivariateSample& sample, std::size_t k,
                      std::span<const double> x) {
  const std::size_t n = sample.n, d = sample.d;
  if (x.size() != d) throw invalid_argument("empirical_stdf: x has wrong dimension");
  if (k < 1 || k >= n) throw invalid_argument("empirical_stdf: need 1 <= k < n");
  for (double xj : x)
    if (!(xj >= 0.0 && xj <= 1.0))
      throw invalid_argument("empirical_stdf: x must lie in [0,1]^d");

  // Maximal rank of each entry within its column: rank = #{l : X_lj <= X_ij}.
  std::vector<double> col(n);
  std::vector<std::uint32_t> rank(n * d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = sample.at(i, j);
    std::sort(col.begin(), col.end());
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = std::upper_bound(col.begin(), col.end(), sample.at(i, j));
      rank[i * d + j] = static_cast<std::uint32_t>(it - col.begin());
    }
  }

  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      // rank/n > 1 - (k/n) x_j  <=>  rank > n - k x_j
      if (static_cast<double>(rank[i * d + j]) >
          static_cast<double>(n) - static_cast<double>(k) * x[j]) {
        ++count;
        break;
      }
    }
  }
  return static_cast<double>(count) / static_cast<double>(k);
}

double true_stdf(const DependenceModel& model, std::span<const double> x) {
  if (x.size() != model.d)
    throw invalid_argument("true_stdf: x has wrong dimension");
  for (double xj : x)
    if (!(xj >= 0.0)) throw invalid_argument("true_stdf: x must be >= 0");
  switch (model.kind) {
    case DepKind::independence: {
      double s = 0.0;
      for (double xj : x) s += xj;
      return s;
    }
    case DepKind::comonotone:
      return *std::max_element(x.begin(), x.end());
    case DepKind::logistic: {
      if (model.alpha == 1.0) {
        double s = 0.0;
        for (double xj : x) s += xj;
        return s;
      }
      double s = 0.0;
      for (double xj : x) s += std::pow(xj, 1.0 / model.alpha);
      return std::pow(s, model.alpha);
    }
  }
  throw invalid_parameter("unknown dependence kind");
}

MultivariateSample sample_dependence(const DependenceModel& model,
                                     std::size_t n, std::uint64_t seed) {
  if (n < model.d) throw invalid_argument("sample_dependence: need n >= d");
  SplitMix64 g(seed);
  MultivariateSample s;
  s.n = n;
  s.d = model.d;
  s.data.resize(n * model.d);
  switch (model.kind) {
    case DepKind::independence:
      for (auto& v : s.data) v = g.next_unit();
      break;
    case DepKind::comonotone:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = g.next_unit();
        for (std::size_t j = 0; j < model.d; ++j) s.data[i * model.d + j] = u;
      }
      break;
    case DepKind::logistic: {
      if (model.alpha == 1.0) {
        for (auto& v : s.data) v = g.next_unit();
        break;
      }
      // Stable-frailty construction of the Gumbel copula: given M with
      // Laplace transform exp(-t^alpha), set U_j = exp(-(E_j / M)^alpha).
      for (std::size_t i = 0; i < n; ++i) {
        const double m = positive_stable_draw(g, model.alpha);
        for (std::size_t j = 0; j < model.d; ++j) {
          const double e = -std::log(g.next_unit());
          s.data[i * model.d + j] = std::exp(-std::pow(e / m, model.alpha));
        }
      }
      break;
    }
  }
  return s;
}

std::string stdf_grid_csv(const MultivariateSample& sample, std::size_t k,
                          const DependenceModel* model) {
  const std::size_t d = sample.d;
  std::string out;
  for (std::size_t j = 0; j < d; ++j)
    out += "x_" + std::to_string(j + 1) + ",";
  out += "L_hat,L_true\n";

  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  for (;;) {
    for (std::size_t j = 0; j < d; ++j) x[j] = 0.1 * static_cast<double>(idx[j]);
    std::vector<std::string> fields;
    for (std::size_t j = 0; j < d; ++j) fields.push_back(format_double(x[j]));
    fields.push_back(csv_field(empirical_stdf(sample, k, x)));
    fields.push_back(model ? csv_field(true_stdf(*model, x)) : std::string());
    out += csv_join(fields);
    out += '\n';

    std::size_t j = 0;
    while (j < d && ++idx[j] > 10) idx[j++] = 0;
    if (j == d) break;
  }
  return out;
}

std::string format_dependence(const DependenceModel& m) {
  switch (m.kind) {
    case DepKind::independence: return "independence";
    case DepKind::comonotone: return "comonotone";
    case DepKind::logistic: return "logistic(" + format_double(m.alpha) + ")";
  }
  return "?";
}

DependenceModel parse_dependence(std::string_view text, std::size_t d) {
  if (text == "independence") return DependenceModel::independence(d);
  if (text == "comonotone") return DependenceModel::comonotone(d);
  if (text.starts_with("logistic(") && text.back() == ')') {
    const std::string body(text.substr(9, text.size() - 10));
    try {
      return DependenceModel::logistic(std::stod(body), d);
    } catch (const std::invalid_argument&) {
      throw invalid_argument("dependence grammar: bad number '" + body + "'");
    }
  }
  throw invalid_argument("dependence grammar: expected independence, comonotone or logistic(alpha)");
}

}  // namespace evt
