#include <doctest.h>

#include <cmath>
#include <vector>

#include "evt/blocking.hpp"
#include "evt/distributions.hpp"
#include "evt/errors.hpp"
#include "evt/rng.hpp"
#include "test_util.hpp"

using namespace evt;

TEST_CASE("disjoint block maxima") {
  const std::vector<double> s{3, 1, 4, 1, 5, 9, 2, 6};
  const auto bm = disjoint_block_maxima(s, 4);
  CHECK(bm.maxima == std::vector<double>{4, 9});
  CHECK(bm.block_size == 4);
  CHECK(bm.source_length == 8);

  SUBCASE("r = 1 is the identity") {
    CHECK(disjoint_block_maxima(s, 1).maxima == s);
  }
  SUBCASE("the remainder block is discarded") {
    const std::vector<double> t{3, 1, 4, 1, 5};
    CHECK(disjoint_block_maxima(t, 2).maxima == std::vector<double>{3, 4});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(disjoint_block_maxima(s, 9), empty_sample);
    CHECK_THROWS_AS(disjoint_block_maxima(s, 0), invalid_argument);
  }
}

TEST_CASE("sliding block maxima") {
  const std::vector<double> s{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(sliding_block_maxima(s, 4).maxima == std::vector<double>{4, 5, 9, 9, 9});
  CHECK(sliding_block_maxima(s, 1).maxima == s);
  CHECK(sliding_block_maxima(s, 8).maxima == std::vector<double>{9});

  SUBCASE("aligned windows reproduce the disjoint maxima") {
    const auto sl = sliding_block_maxima(s, 4);
    const auto dj = disjoint_block_maxima(s, 4);
    for (std::size_t j = 0; j < dj.maxima.size(); ++j)
      CHECK(sl.maxima[j * 4] == dj.maxima[j]);
  }

  SUBCASE("monotone deque agrees with brute force on random input") {
    SplitMix64 g(31337);
    for (std::size_t n : {100, 1000, 10000}) {
      std::vector<double> x(n);
      for (auto& v : x) v = g.next_unit();
      for (std::size_t r : {2, 7, 50}) {
        const auto fast = sliding_block_maxima(x, r);
        REQUIRE(fast.maxima.size() == n - r + 1);
        for (std::size_t i = 0; i + r <= n; ++i) {
          double m = x[i];
          for (std::size_t j = 1; j < r; ++j) m = std::max(m, x[i + j]);
          REQUIRE(fast.maxima[i] == m);
        }
      }
    }
  }
}

TEST_CASE("threshold excesses") {
  SUBCASE("order statistics by hand") {
    const std::vector<double> s{3, 1, 4, 1, 5};
    const auto ex = threshold_excesses(s, 2);
    CHECK(ex.threshold == 3.0);
    CHECK(ex.excesses == std::vector<double>{1, 2});
    CHECK(ex.exceedance_times == std::vector<std::size_t>{2, 4});
  }

  SUBCASE("degenerate ties") {
    const std::vector<double> s{1, 1, 1, 1};
    const auto ex = threshold_excesses(s, 2);
    CHECK(ex.threshold == 1.0);
    CHECK(ex.excesses == std::vector<double>{0, 0});
    // nothing is strictly above; later tied indices fill the k slots
    CHECK(ex.exceedance_times == std::vector<std::size_t>{2, 3});
  }

  SUBCASE("mean excess matches the fitted-family oracle") {
    // GP exceedances over a threshold t are GP with scale sigma + gamma t,
    // so the mean excess is (sigma + gamma t) / (1 - gamma) for gamma < 1.
    const double gamma = 0.25, sigma = 1.0;
    const Series s = sample(DistributionSpec::gp(gamma, sigma), 100000, 11);
    const auto ex = threshold_excesses(s, 1000);
    const double oracle = (sigma + gamma * ex.threshold) / (1.0 - gamma);
    CHECK(test::mean(ex.excesses) == doctest::Approx(oracle).epsilon(0.10));
  }

  SUBCASE("scale-translation equivariance") {
    SplitMix64 g(5);
    std::vector<double> x(200);
    for (auto& v : x) v = g.next_unit();
    const double c = 2.5, d = -1.25;
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i] + d;

    const auto ex = threshold_excesses(x, 20);
    const auto ey = threshold_excesses(y, 20);
    CHECK(ey.threshold == doctest::Approx(c * ex.threshold + d).epsilon(1e-12));
    for (std::size_t i = 0; i < ex.excesses.size(); ++i)
      CHECK(ey.excesses[i] == doctest::Approx(c * ex.excesses[i]).epsilon(1e-12));
    CHECK(ey.exceedance_times == ex.exceedance_times);
  }

  SUBCASE("errors") {
    const std::vector<double> s{1, 2, 3};
    CHECK_THROWS_AS(threshold_excesses(s, 0), invalid_argument);
    CHECK_THROWS_AS(threshold_excesses(s, 3), invalid_argument);
  }
}

TEST_CASE("every sliding maximum dominates the values in its window") {
  const Series s = sample(DistributionSpec::normal(), 500, 77);
  const auto sl = sliding_block_maxima(s, 25);
  for (std::size_t i = 0; i < sl.maxima.size(); ++i)
    for (std::size_t j = 0; j < 25; ++j) CHECK(sl.maxima[i] >= s.values[i + j]);
}
