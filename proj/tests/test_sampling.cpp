#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pinn/prng.hpp"
#include "pinn/sampling.hpp"
#include "support.hpp"

using namespace pinn::sampling;
using testsupport::bisect_increasing;
using testsupport::simpson;
using testsupport::trapezoid;

TEST_CASE("TruncExpParams rejects degenerate intervals") {
  CHECK_THROWS_AS(TruncExpParams(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TruncExpParams(2.0, 1.0, 0.0), std::invalid_argument);
  CHECK_NOTHROW(TruncExpParams(0.0, 1.0, -5.0));
}

TEST_CASE("density: uniform limit and support") {
  const TruncExpParams uniform(0.0, 1.0, 0.0);
  CHECK(density(uniform, 0.5) == doctest::Approx(1.0));
  const TruncExpParams p(0.0, 1.0, 3.0);
  CHECK(density(p, -0.1) == 0.0);
  CHECK(density(p, 1.1) == 0.0);
}

TEST_CASE("density integrates to one") {
  // 1e4-interval trapezoid puts r=2 at ~3e-9; Simpson handles the stiffer
  // rates within the 1e-8 budget.
  const TruncExpParams p2(0.0, 1.0, 2.0);
  const double trap =
      trapezoid([&](double t) { return density(p2, t); }, 0.0, 1.0, 10000);
  CHECK(trap == doctest::Approx(1.0).epsilon(1e-8));

  for (const double r : {-10.0, -3.0, 0.0, 1e-13, 2.0, 10.0}) {
    const TruncExpParams p(0.0, 1.0, r);
    const double mass =
        simpson([&](double t) { return density(p, t); }, 0.0, 1.0, 10000);
    CHECK_MESSAGE(std::fabs(mass - 1.0) < 1e-8, "r=", r, " mass=", mass);
  }
}

TEST_CASE("quantile: closed form against bisection of the CDF") {
  const TruncExpParams uniform(0.0, 1.0, 0.0);
  CHECK(quantile(uniform, 0.25) == doctest::Approx(0.25));

  for (const double r : {-4.0, 1.0, 2.0, 7.0}) {
    const TruncExpParams p(0.0, 1.0, r);
    CHECK(quantile(p, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quantile(p, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  }

  // Independent oracle: invert the analytic CDF (e^{-ra}-e^{-rt})/(e^{-ra}-e^{-rb}).
  const TruncExpParams p(0.0, 1.0, 2.0);
  auto analytic_cdf = [](double t) {
    return (1.0 - std::exp(-2.0 * t)) / (1.0 - std::exp(-2.0));
  };
  const double inverted = bisect_increasing(analytic_cdf, 0.5, 0.0, 1.0);
  CHECK(inverted == doctest::Approx(0.28310958475848635).epsilon(1e-10));
  CHECK(quantile(p, 0.5) == doctest::Approx(inverted).epsilon(1e-10));

  CHECK_THROWS_AS(quantile(p, -0.01), std::domain_error);
  CHECK_THROWS_AS(quantile(p, 1.01), std::domain_error);
}

TEST_CASE("quantile inverts the CDF at 1e-10 for all rate regimes") {
  for (const double r : {-10.0, -3.0, 0.0, 2.0, 10.0}) {
    const TruncExpParams p(-0.5, 2.0, r);
    pinn::SplitMix64 rng(17);
    for (int k = 0; k < 100; ++k) {
      const double q = rng.next_unit();
      CHECK(cdf(p, quantile(p, q)) == doctest::Approx(q).epsilon(1e-10));
    }
  }
}

TEST_CASE("quantile is continuous in r at the uniform threshold") {
  const double eps = 1e-8;
  const TruncExpParams p(0.0, 1.0, eps);
  for (const double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    CHECK(std::fabs(quantile(p, q) - q) <= 10.0 * eps);
  }
}

TEST_CASE("quantile_grid: midpoints, monotone, mean matches the law") {
  const TruncExpParams uniform(0.0, 1.0, 0.0);
  const auto grid = quantile_grid(uniform, 4);
  REQUIRE(grid.size() == 4);
  CHECK(grid[0] == doctest::Approx(0.125));
  CHECK(grid[1] == doctest::Approx(0.375));
  CHECK(grid[2] == doctest::Approx(0.625));
  CHECK(grid[3] == doctest::Approx(0.875));

  for (const double r : {-6.0, -1.0, 0.5, 3.0, 9.0}) {
    const TruncExpParams p(0.0, 1.0, r);
    const auto g = quantile_grid(p, 57);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g[i] < g[i + 1]);
    CHECK(g.front() > 0.0);
    CHECK(g.back() < 1.0);
  }

  // Grid mean vs the analytic mean computed by quadrature of t density(t).
  const TruncExpParams p(0.0, 1.0, 2.0);
  const double mean =
      simpson([&](double t) { return t * density(p, t); }, 0.0, 1.0, 20000);
  const auto g = quantile_grid(p, 100);
  double grid_mean = 0.0;
  for (double t : g) grid_mean += t;
  grid_mean /= static_cast<double>(g.size());
  CHECK(std::fabs(grid_mean - mean) < 1e-3);

  CHECK_THROWS_AS(quantile_grid(p, 0), std::domain_error);
}

TEST_CASE("density_weights: normalization, monotonicity, ratios") {
  const TruncExpParams uniform(0.0, 1.0, 0.0);
  const double grid5[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto wu = density_weights(uniform, grid5);
  for (double w : wu) CHECK(w == doctest::Approx(0.2).epsilon(1e-14));

  const TruncExpParams p(0.0, 1.0, 10.0);
  const auto grid = quantile_grid(TruncExpParams(0.0, 1.0, 0.0), 20);
  const auto w = density_weights(p, grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sum += w[i];
    if (i > 0) CHECK(w[i] < w[i - 1]);
  }
  CHECK(std::fabs(sum - 1.0) <= 1e-12);

  const double pair[] = {0.0, 0.1};
  const auto wp = density_weights(p, pair);
  CHECK(wp[0] / wp[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

  const double outside[] = {0.5, 1.5};
  CHECK_THROWS_AS(density_weights(p, outside), std::domain_error);
}
