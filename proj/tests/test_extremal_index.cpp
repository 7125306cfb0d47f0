#include <doctest.h>

#include <cmath>
#include <vector>

#include "evt/blocking.hpp"
#include "evt/distributions.hpp"
#include "evt/errors.hpp"
#include "evt/extremal_index.hpp"
#include "evt/rng.hpp"
#include "test_util.hpp"

using namespace evt;

TEST_CASE("time series simulators") {
  SUBCASE("armax with alpha 0 is i.i.d. unit frechet") {
    const auto model = TimeSeriesModel::armax(0.0);
    const Series s = simulate_timeseries(model, 100000, 21);
    const double d = test::ks_distance(
        s.values, [](double x) { return x <= 0 ? 0.0 : std::exp(-1.0 / x); });
    CHECK(d < 0.01);
  }

  SUBCASE("armax stationary marginal is unit frechet") {
    const auto model = TimeSeriesModel::armax(0.5);
    const Series s = simulate_timeseries(model, 100000, 22);
    const double d = test::ks_distance(
        s.values, [](double x) { return x <= 0 ? 0.0 : std::exp(-1.0 / x); });
    CHECK(d < 0.01);
    CHECK(s.kind == SeriesKind::stationary);
  }

  SUBCASE("ar1 cauchy stationary marginal") {
    const auto model = TimeSeriesModel::ar1_cauchy(0.6);
    const Series s = simulate_timeseries(model, 100000, 23);
    const DistributionSpec marginal = model.marginal;
    const double d =
        test::ks_distance(s.values, [&](double x) { return cdf(marginal, x); });
    CHECK(d < 0.01);
  }

  SUBCASE("moving maxima marginal and truth") {
    const auto model = TimeSeriesModel::moving_maxima({0.5, 0.3, 0.2});
    CHECK(*model.theta_true == doctest::Approx(0.5));
    const Series s = simulate_timeseries(model, 100000, 24);
    const double d = test::ks_distance(
        s.values, [](double x) { return x <= 0 ? 0.0 : std::exp(-1.0 / x); });
    CHECK(d < 0.01);
  }

  SUBCASE("identical seeds give identical paths") {
    const auto model = TimeSeriesModel::armax(0.3);
    CHECK(simulate_timeseries(model, 1000, 7).values ==
          simulate_timeseries(model, 1000, 7).values);
    CHECK(simulate_timeseries(model, 1000, 7).values !=
          simulate_timeseries(model, 1000, 8).values);
  }

  SUBCASE("model validation") {
    CHECK_THROWS_AS(TimeSeriesModel::armax(1.0), invalid_parameter);
    CHECK_THROWS_AS(TimeSeriesModel::ar1_cauchy(-0.1), invalid_parameter);
    CHECK_THROWS_AS(TimeSeriesModel::moving_maxima({}), invalid_parameter);
    CHECK(*TimeSeriesModel::iid(DistributionSpec::normal()).theta_true == 1.0);
  }
}

TEST_CASE("intervals estimator") {
  SUBCASE("equally spaced exceedances give theta 1") {
    // spacing 2: plain variant, ratio exactly 2, clipped to 1
    std::vector<std::size_t> close{10, 12, 14, 16, 18, 20};
    CHECK(theta_intervals_from_times(close, 100, 6).theta_hat == 1.0);
    // spacing 10: the (T-1)(T-2) variant, also clipped
    std::vector<std::size_t> wide{10, 20, 30, 40, 50, 60};
    CHECK(theta_intervals_from_times(wide, 100, 6).theta_hat == 1.0);
  }

  SUBCASE("paired exceedances, hand evaluation of the variant formula") {
    // T = {1,99,1,99,1}: 2*(sum(T-1))^2 / ((N-1) sum (T-1)(T-2))
    //   = 2*196^2 / (5*19012) = 392/485
    std::vector<std::size_t> times{1, 2, 101, 102, 201, 202};
    const ThetaEstimate est = theta_intervals_from_times(times, 250, 6);
    CHECK(est.theta_hat == doctest::Approx(392.0 / 485.0).epsilon(1e-12));
    CHECK(est.theta_raw == est.theta_hat);
  }

  SUBCASE("series plumbing matches the direct evaluation") {
    std::vector<double> series(250, 0.0);
    for (std::size_t t : {0, 1, 100, 101, 200, 201}) series[t] = 10.0;
    Series s;
    s.values = series;
    const ThetaEstimate est = theta_intervals(s, 6);
    CHECK(est.theta_hat == doctest::Approx(392.0 / 485.0).epsilon(1e-12));
  }

  SUBCASE("iid series concentrates near 1") {
    const Series s = sample(DistributionSpec::uniform(), 100000, 25);
    const ThetaEstimate est = theta_intervals(s, 500);
    CHECK(est.theta_hat > 0.9);
    CHECK(est.theta_hat <= 1.0);
  }

  SUBCASE("needs two exceedances") {
    std::vector<std::size_t> one{5};
    CHECK_THROWS_AS(theta_intervals_from_times(one, 10, 1),
                    insufficient_exceedances);
  }
}

TEST_CASE("blocks estimator") {
  SUBCASE("threshold below every block maximum is an error") {
    Series s;
    s.values = {1, 2, 1, 2};
    CHECK_THROWS_AS(theta_blocks(s, 2, 2), threshold_too_low);
  }

  SUBCASE("iid series concentrates near 1") {
    const Series s = sample(DistributionSpec::uniform(), 100000, 26);
    const ThetaEstimate est = theta_blocks(s, 100, 1000);
    CHECK(est.theta_hat > 0.85);
    CHECK(est.theta_hat <= 1.0);
  }

  SUBCASE("armax clustering is detected") {
    const Series s = simulate_timeseries(TimeSeriesModel::armax(0.5), 100000, 27);
    const ThetaEstimate est = theta_blocks(s, 100, 1000);
    CHECK(est.theta_hat > 0.4);
    CHECK(est.theta_hat < 0.6);
  }

  SUBCASE("argument validation") {
    const Series s = sample(DistributionSpec::uniform(), 100, 28);
    CHECK_THROWS_AS(theta_blocks(s, 1, 10), invalid_argument);
    CHECK_THROWS_AS(theta_blocks(s, 10, 100), invalid_argument);
  }
}

TEST_CASE("theta estimators on iid input, replicated") {
  const std::size_t reps = 100;
  std::vector<double> intervals_means, blocks_means;
  for (std::size_t i = 0; i < reps; ++i) {
    const Series s = sample(DistributionSpec::exponential(1.0), 100000, 3000 + i);
    intervals_means.push_back(theta_intervals(s, 500).theta_hat);
    blocks_means.push_back(theta_blocks(s, 100, 1000).theta_hat);
  }
  const double mi = test::mean(intervals_means);
  const double mb = test::mean(blocks_means);
  CHECK(mi >= 0.9);
  CHECK(mi <= 1.0);
  CHECK(mb >= 0.9);
  CHECK(mb <= 1.0);
}

TEST_CASE("larger armax dependence lowers both estimators") {
  const std::size_t reps = 100, n = 20000;
  double prev_intervals = 2.0, prev_blocks = 2.0;
  for (double alpha : {0.2, 0.5, 0.8}) {
    std::vector<double> vi, vb;
    const auto model = TimeSeriesModel::armax(alpha);
    for (std::size_t i = 0; i < reps; ++i) {
      const Series s = simulate_timeseries(model, n, 4000 + i);
      vi.push_back(theta_intervals(s, 400).theta_hat);
      vb.push_back(theta_blocks(s, 50, 1000).theta_hat);
    }
    const double mi = test::mean(vi), mb = test::mean(vb);
    CHECK(mi < prev_intervals);
    CHECK(mb < prev_blocks);
    prev_intervals = mi;
    prev_blocks = mb;
  }
}

TEST_CASE("tilde transform") {
  SUBCASE("theta 1 is the identity") {
    const GevNorming t = tilde_transform(2.0, 5.0, 0.7, 1.0);
    CHECK(t.scale == 2.0);
    CHECK(t.loc == 5.0);
  }

  SUBCASE("hand evaluation") {
    const GevNorming t = tilde_transform(2.0, 5.0, 1.0, 0.5);
    CHECK(t.scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.loc == doctest::Approx(4.0).epsilon(1e-12));
  }

  SUBCASE("round trip to 1e-12, including shapes near zero") {
    SplitMix64 g(29);
    for (int i = 0; i < 500; ++i) {
      const double a = 0.1 + 5.0 * g.next_unit();
      const double b = -10.0 + 20.0 * g.next_unit();
      double gamma = -2.0 + 4.0 * g.next_unit();
      if (i % 5 == 0) gamma = (g.next_unit() - 0.5) * 2e-8;  // straddle the switch
      const double theta = 0.05 + 0.95 * g.next_unit();
      const GevNorming t = tilde_transform(a, b, gamma, theta);
      const GevNorming back = inverse_tilde_transform(t.scale, t.loc, gamma, theta);
      CHECK(back.scale == doctest::Approx(a).epsilon(1e-12));
      CHECK(back.loc == doctest::Approx(b).epsilon(1e-12));
    }
  }

  SUBCASE("branch continuity at the switch") {
    for (double theta : {0.2, 0.5, 0.9}) {
      const GevNorming lim = tilde_transform(2.0, 5.0, 0.999e-8, theta);
      const GevNorming pow_branch = tilde_transform(2.0, 5.0, 1.000001e-8, theta);
      CHECK(std::abs(lim.scale - pow_branch.scale) < 1e-6);
      CHECK(std::abs(lim.loc - pow_branch.loc) < 1e-6);
    }
  }

  SUBCASE("theta outside (0,1] is rejected") {
    CHECK_THROWS_AS(tilde_transform(1.0, 0.0, 0.5, 0.0), invalid_argument);
    CHECK_THROWS_AS(tilde_transform(1.0, 0.0, 0.5, 1.2), invalid_argument);
    CHECK_THROWS_AS(inverse_tilde_transform(1.0, 0.0, 0.5, -0.5), invalid_argument);
  }
}

TEST_CASE("block maxima approach the tilde-normalized GEV") {
  // armax block maxima should standardize with the tilde constants, not the
  // i.i.d. ones. For the unit-frechet marginal V(t) = t, so at block size r
  // the i.i.d. constants are loc = scale = r.
  const std::size_t r = 200, n = 400000;
  const auto model = TimeSeriesModel::armax(0.5);
  const Series s = simulate_timeseries(model, n, 30);
  const BlockMaximaSample bm = disjoint_block_maxima(s, r);

  const double a_r = static_cast<double>(r), b_r = static_cast<double>(r);
  const GevNorming tilde = tilde_transform(a_r, b_r, 1.0, *model.theta_true);

  const double d_tilde = test::ks_distance(bm.maxima, [&](double x) {
    return gev_cdf(x, 1.0, tilde.loc, tilde.scale);
  });
  const double d_iid = test::ks_distance(
      bm.maxima, [&](double x) { return gev_cdf(x, 1.0, b_r, a_r); });
  CHECK(d_tilde < d_iid);
  CHECK(d_tilde < 0.05);
}

TEST_CASE("ar1 cauchy upper-tail clustering") {
  const auto model = TimeSeriesModel::ar1_cauchy(0.6);
  CHECK(*model.theta_true == doctest::Approx(0.4));
  const Series s = simulate_timeseries(model, 100000, 31);
  const ThetaEstimate est = theta_intervals(s, 400);
  CHECK(est.theta_hat > 0.2);
  CHECK(est.theta_hat < 0.6);
}

TEST_CASE("model grammar round trip") {
  const auto models = {TimeSeriesModel::armax(0.5),
                       TimeSeriesModel::ar1_cauchy(0.25),
                       TimeSeriesModel::moving_maxima({0.5, 0.3, 0.2}),
                       TimeSeriesModel::iid(DistributionSpec::frechet(2.0))};
  for (const auto& m : models) {
    const TimeSeriesModel back = parse_model(format_model(m));
    CHECK(back.kind == m.kind);
    CHECK(format_model(back) == format_model(m));
  }
  CHECK_THROWS_AS(parse_model("arma(0.5)"), invalid_argument);
  CHECK_THROWS_AS(parse_model("armax"), invalid_argument);
}

TEST_CASE("theta CSV row") {
  Series s;
  s.values.assign(1000, 0.0);
  SplitMix64 g(32);
  for (auto& v : s.values) v = g.next_unit();
  const ThetaEstimate a = theta_intervals(s, 50);
  CHECK(theta_csv_row(a).find("intervals,,50,") == 0);
  const ThetaEstimate b = theta_blocks(s, 10, 50);
  CHECK(theta_csv_row(b).find("blocks,10,50,") == 0);
  CHECK(theta_csv_header() == "method,r,k,theta_hat,theta_raw,n");
}
