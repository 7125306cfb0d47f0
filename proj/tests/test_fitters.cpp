#include <doctest.h>

#include <cmath>
#include <vector>

#include "evt/distributions.hpp"
#include "evt/errors.hpp"
#include "evt/fitters.hpp"
#include "evt/rng.hpp"
#include "test_util.hpp"

using namespace evt;

namespace {

std::vector<double> affine(std::span<const double> x, double c, double d) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i] + d;
  return y;
}

double fd_gradient_norm_gev(std::span<const double> x, const TailFit& fit) {
  const double h = 1e-5;
  const double ga = fit.gamma_hat, b = *fit.loc_hat, a = fit.scale_hat;
  const double dg = (gev_log_likelihood(x, ga + h, b, a) -
                     gev_log_likelihood(x, ga - h, b, a)) /
                    (2 * h);
  const double db = (gev_log_likelihood(x, ga, b + h * a, a) -
                     gev_log_likelihood(x, ga, b - h * a, a)) /
                    (2 * h * a);
  const double da = (gev_log_likelihood(x, ga, b, a * (1 + h)) -
                     gev_log_likelihood(x, ga, b, a * (1 - h))) /
                    (2 * h * a);
  return std::sqrt(dg * dg + db * db + da * da);
}

}  // namespace

TEST_CASE("gev pwm") {
  SUBCASE("moment ratio at the zero-shape limit") {
    const auto b = gev_theoretical_pwm(0.0, 0.0, 1.0);
    const double ratio = (3 * b[2] - b[0]) / (2 * b[1] - b[0]);
    CHECK(ratio == doctest::Approx(std::log(3.0) / std::log(2.0)).epsilon(1e-12));
  }

  SUBCASE("recovers a Gumbel sample") {
    const Series s = sample(DistributionSpec::gev(0.0, 0.0, 1.0), 100000, 101);
    const TailFit fit = fit_gev_pwm(s.values);
    CHECK(fit.converged);
    CHECK(fit.gamma_hat > -0.02);
    CHECK(fit.gamma_hat < 0.02);
  }

  SUBCASE("moment matching is the defining system") {
    const Series s = sample(DistributionSpec::gev(0.2, 0.5, 1.5), 5000, 55);
    const TailFit fit = fit_gev_pwm(s.values);
    REQUIRE(fit.converged);
    const auto sample_b = sample_pwm(s.values);
    const auto model_b =
        gev_theoretical_pwm(fit.gamma_hat, *fit.loc_hat, fit.scale_hat);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(sample_b[i] - model_b[i]) < 1e-8);
  }

  SUBCASE("affine equivariance") {
    const Series s = sample(DistributionSpec::gev(0.1, 0.0, 1.0), 2000, 7);
    const TailFit base = fit_gev_pwm(s.values);
    const double c = 3.5, d = -2.0;
    const TailFit mapped = fit_gev_pwm(affine(s.values, c, d));
    CHECK(mapped.gamma_hat == doctest::Approx(base.gamma_hat).epsilon(1e-9));
    CHECK(*mapped.loc_hat == doctest::Approx(c * *base.loc_hat + d).epsilon(1e-9));
    CHECK(mapped.scale_hat == doctest::Approx(c * base.scale_hat).epsilon(1e-9));
  }

  SUBCASE("degenerate samples") {
    const std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
    CHECK_THROWS_AS(fit_gev_pwm(flat), degenerate_sample);
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(fit_gev_pwm(two), degenerate_sample);
  }
}

TEST_CASE("gev ml") {
  SUBCASE("recovers its own model") {
    const Series s = sample(DistributionSpec::gev(0.25, 0.0, 1.0), 100000, 202);
    const TailFit fit = fit_gev_ml(s.values);
    CHECK(fit.converged);
    CHECK(fit.gamma_hat > 0.22);
    CHECK(fit.gamma_hat < 0.28);
    CHECK(fit.log_likelihood.has_value());
  }

  SUBCASE("affine equivariance") {
    const Series s = sample(DistributionSpec::gev(0.2, 1.0, 2.0), 3000, 8);
    const TailFit base = fit_gev_ml(s.values);
    REQUIRE(base.converged);
    const double c = 0.4, d = 5.0;
    const TailFit mapped = fit_gev_ml(affine(s.values, c, d));
    REQUIRE(mapped.converged);
    CHECK(mapped.gamma_hat == doctest::Approx(base.gamma_hat).epsilon(1e-5));
    CHECK(*mapped.loc_hat == doctest::Approx(c * *base.loc_hat + d).epsilon(1e-5));
    CHECK(mapped.scale_hat == doctest::Approx(c * base.scale_hat).epsilon(1e-5));
  }

  SUBCASE("stationarity at the optimum") {
    const Series s = sample(DistributionSpec::gev(0.15, 0.0, 1.0), 4000, 9);
    const TailFit fit = fit_gev_ml(s.values);
    REQUIRE(fit.converged);
    CHECK(fd_gradient_norm_gev(s.values, fit) < 1e-4);
  }

  SUBCASE("support feasibility of the fitted model") {
    const Series s = sample(DistributionSpec::gev(-0.3, 0.0, 1.0), 5000, 10);
    const TailFit fit = fit_gev_ml(s.values);
    REQUIRE(fit.converged);
    for (double x : s.values) {
      const double w = 1.0 + fit.gamma_hat * (x - *fit.loc_hat) / fit.scale_hat;
      CHECK(w > 0.0);
    }
  }

  SUBCASE("identical values are degenerate") {
    const std::vector<double> flat(100, 1.0);
    CHECK_THROWS_AS(fit_gev_ml(flat), degenerate_sample);
  }
}

TEST_CASE("gp pwm") {
  SUBCASE("integral oracle for the weighted moment") {
    // b1 estimates E[X (1-F(X))] = integral of Q(p)(1-p) over (0,1),
    // which is sigma / (2 (2-gamma)) for the GP family.
    for (double gamma : {-0.3, 0.0, 0.4}) {
      const double sigma = 1.7;
      const double quad = test::integrate_unit(
          [&](double p) { return gp_quantile(p, gamma, sigma) * (1.0 - p); });
      CHECK(quad == doctest::Approx(sigma / (2.0 * (2.0 - gamma))).epsilon(1e-5));
    }
    const Series s = sample(DistributionSpec::gp(0.3, 1.0), 100000, 77);
    CHECK(gp_sample_pwm_b1(s.values) ==
          doctest::Approx(1.0 / (2.0 * 1.7)).epsilon(0.02));
  }

  SUBCASE("recovers its own model") {
    const Series s = sample(DistributionSpec::gp(0.25, 1.0), 100000, 303);
    const TailFit fit = fit_gp_pwm(s.values);
    CHECK(fit.converged);
    CHECK(fit.gamma_hat > 0.22);
    CHECK(fit.gamma_hat < 0.28);
  }

  SUBCASE("exponential excesses give shape near zero") {
    const Series s = sample(DistributionSpec::exponential(1.0), 100000, 304);
    const TailFit fit = fit_gp_pwm(s.values);
    CHECK(std::abs(fit.gamma_hat) < 0.02);
  }

  SUBCASE("scale equivariance") {
    const Series s = sample(DistributionSpec::gp(0.2, 1.0), 2000, 11);
    const TailFit base = fit_gp_pwm(s.values);
    const TailFit mapped = fit_gp_pwm(affine(s.values, 4.0, 0.0));
    CHECK(mapped.gamma_hat == doctest::Approx(base.gamma_hat).epsilon(1e-9));
    CHECK(mapped.scale_hat == doctest::Approx(4.0 * base.scale_hat).epsilon(1e-9));
    CHECK_FALSE(mapped.loc_hat.has_value());
  }

  SUBCASE("degenerate samples") {
    const std::vector<double> zeros(50, 0.0);
    CHECK_THROWS_AS(fit_gp_pwm(zeros), degenerate_sample);
  }
}

TEST_CASE("gp ml") {
  SUBCASE("recovers its own model") {
    const Series s = sample(DistributionSpec::gp(0.5, 2.0), 100000, 404);
    const TailFit fit = fit_gp_ml(s.values);
    CHECK(fit.converged);
    CHECK(fit.gamma_hat > 0.45);
    CHECK(fit.gamma_hat < 0.55);
    CHECK(fit.scale_hat > 1.9);
    CHECK(fit.scale_hat < 2.1);
  }

  SUBCASE("scale equivariance") {
    const Series s = sample(DistributionSpec::gp(0.3, 1.0), 3000, 12);
    const TailFit base = fit_gp_ml(s.values);
    REQUIRE(base.converged);
    const TailFit mapped = fit_gp_ml(affine(s.values, 2.5, 0.0));
    REQUIRE(mapped.converged);
    CHECK(mapped.gamma_hat == doctest::Approx(base.gamma_hat).epsilon(1e-5));
    CHECK(mapped.scale_hat == doctest::Approx(2.5 * base.scale_hat).epsilon(1e-5));
  }

  SUBCASE("stationarity at the optimum") {
    const Series s = sample(DistributionSpec::gp(0.2, 1.0), 4000, 13);
    const TailFit fit = fit_gp_ml(s.values);
    REQUIRE(fit.converged);
    const double h = 1e-5;
    const double dg = (gp_log_likelihood(s.values, fit.gamma_hat + h, fit.scale_hat) -
                       gp_log_likelihood(s.values, fit.gamma_hat - h, fit.scale_hat)) /
                      (2 * h);
    const double ds =
        (gp_log_likelihood(s.values, fit.gamma_hat, fit.scale_hat * (1 + h)) -
         gp_log_likelihood(s.values, fit.gamma_hat, fit.scale_hat * (1 - h))) /
        (2 * h * fit.scale_hat);
    CHECK(std::sqrt(dg * dg + ds * ds) < 1e-4);
  }

  SUBCASE("support feasibility with negative shape") {
    const Series s = sample(DistributionSpec::gp(-0.4, 1.0), 5000, 14);
    const TailFit fit = fit_gp_ml(s.values);
    REQUIRE(fit.converged);
    for (double y : s.values)
      CHECK(1.0 + fit.gamma_hat * y / fit.scale_hat > 0.0);
  }

  SUBCASE("all-zero excesses are degenerate") {
    const std::vector<double> zeros(50, 0.0);
    CHECK_THROWS_AS(fit_gp_ml(zeros), degenerate_sample);
  }
}

TEST_CASE("hill") {
  SUBCASE("hand evaluation") {
    const std::vector<double> s{1.0, std::exp(1.0), std::exp(2.0)};
    const TailFit fit = hill(s, 2);
    CHECK(fit.gamma_hat == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(*fit.loc_hat == 1.0);
  }

  SUBCASE("scale invariance") {
    const Series s = sample(DistributionSpec::frechet(2.0), 5000, 15);
    const TailFit base = hill(s.values, 200);
    const TailFit mapped = hill(affine(s.values, 17.0, 0.0), 200);
    CHECK(mapped.gamma_hat == doctest::Approx(base.gamma_hat).epsilon(1e-12));
  }

  SUBCASE("frechet tail index") {
    const Series s = sample(DistributionSpec::frechet(1.0), 10000, 606);
    const TailFit fit = hill(s.values, 100);
    CHECK(fit.gamma_hat > 0.8);
    CHECK(fit.gamma_hat < 1.2);
  }

  SUBCASE("positivity requirement") {
    const Series s = sample(DistributionSpec::normal(), 1000, 16);
    CHECK_THROWS_AS(hill(s.values, 999), positivity_error);
    CHECK_THROWS_AS(hill(s.values, 1000), invalid_argument);
  }
}

TEST_CASE("round trip: refits of the fitted model agree within MC error") {
  struct Case {
    DistributionSpec spec;
    TailFit (*fitter)(std::span<const double>, std::size_t);
  };
  const Case cases[] = {
      {DistributionSpec::gev(0.2, 1.0, 2.0), &fit_gev_ml},
      {DistributionSpec::gev(0.2, 1.0, 2.0), &fit_gev_pwm},
      {DistributionSpec::gp(0.3, 1.5), &fit_gp_ml},
      {DistributionSpec::gp(0.3, 1.5), &fit_gp_pwm},
  };
  for (const auto& c : cases) {
    const Series base_data = sample(c.spec, 20000, 17);
    const TailFit base = c.fitter(base_data.values, 1);
    REQUIRE(base.converged);
    const DistributionSpec fitted =
        c.spec.family == Family::gev
            ? DistributionSpec::gev(base.gamma_hat, *base.loc_hat, base.scale_hat)
            : DistributionSpec::gp(base.gamma_hat, base.scale_hat);

    const std::size_t reps = 16;
    std::vector<double> gammas;
    for (std::size_t i = 0; i < reps; ++i) {
      const Series s = sample(fitted, 100000, 1000 + i);
      const TailFit refit = c.fitter(s.values, 1);
      REQUIRE(refit.converged);
      gammas.push_back(refit.gamma_hat);
    }
    const double se = test::sample_sd(gammas) / std::sqrt(double(reps));
    CHECK_MESSAGE(std::abs(test::mean(gammas) - base.gamma_hat) < 3.0 * se,
                  fit_method_name(base.method));
  }
}

TEST_CASE("tail fit CSV serialization") {
  const Series s = sample(DistributionSpec::gp(0.5, 1.0), 500, 18);
  const TailFit fit = fit_gp_ml(s.values, 500);
  const std::string row = tail_fit_csv_row(fit);
  CHECK(row.find("gp_ml,500,") == 0);
  CHECK(tail_fit_csv_header() ==
        "method,tuning,gamma_hat,loc_hat,scale_hat,converged,n_used");
  // loc field is empty for threshold-side fits
  CHECK(row.find(",,") != std::string::npos);
}
