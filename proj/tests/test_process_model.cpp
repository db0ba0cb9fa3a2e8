#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rblab/process_model.hpp"
#include "rblab/rng.hpp"

using namespace rblab;

TEST_CASE("Hurst parameter enforces the open interval") {
  CHECK_NOTHROW(HurstParam(0.51));
  CHECK_NOTHROW(HurstParam(0.99));
  CHECK_THROWS_AS(HurstParam(0.5), std::invalid_argument);
  CHECK_THROWS_AS(HurstParam(1.0), std::invalid_argument);
  CHECK_THROWS_AS(HurstParam(0.3), std::invalid_argument);
  CHECK_THROWS_AS(HurstParam(1.4), std::invalid_argument);
}

TEST_CASE("covariance point values") {
  CHECK(covariance(1.0, 1.0, HurstParam(0.7)) == doctest::Approx(1.0));
  CHECK(covariance(1.0, 1.0, HurstParam(0.55)) == doctest::Approx(1.0));
  CHECK(covariance(0.5, 0.5, HurstParam(0.7)) ==
        doctest::Approx(std::pow(0.5, 1.4)).epsilon(1e-12));
  CHECK(covariance(0.25, 0.75, HurstParam(0.6)) ==
        doctest::Approx(0.231119).epsilon(1e-4));
}

TEST_CASE("covariance symmetry and self-similarity") {
  const HurstParam h(0.63);
  GaussianStream g(7);
  for (int i = 0; i < 200; ++i) {
    const double s = std::abs(g.next()), t = std::abs(g.next());
    const double a = 0.1 + std::abs(g.next());
    CHECK(covariance(s, t, h) == doctest::Approx(covariance(t, s, h)));
    CHECK(covariance(a * s, a * t, h) ==
          doctest::Approx(std::pow(a, 2 * h.value()) * covariance(s, t, h))
              .epsilon(1e-10));
  }
}

TEST_CASE("stationary-increment identity") {
  const HurstParam h(0.8);
  GaussianStream g(11);
  for (int i = 0; i < 200; ++i) {
    const double s = std::abs(g.next()), t = std::abs(g.next());
    const double lhs = covariance(t, t, h) - 2.0 * covariance(s, t, h) +
                       covariance(s, s, h);
    CHECK(lhs ==
          doctest::Approx(std::pow(std::abs(t - s), 2 * h.value()))
              .epsilon(1e-9));
  }
}

TEST_CASE("hermite point values and bounds") {
  CHECK(hermite(0, 7.3) == 1.0);
  CHECK(hermite(1, -2.5) == -2.5);
  CHECK(hermite(2, 3.0) == doctest::Approx(8.0));   // x^2 - 1
  CHECK(hermite(3, 2.0) == doctest::Approx(2.0));   // x^3 - 3x
  CHECK_THROWS_AS(hermite(kHermiteMaxOrder + 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hermite(-1, 0.0), std::invalid_argument);
}

TEST_CASE("hermite recurrence holds to machine precision") {
  GaussianStream g(3);
  for (int i = 0; i < 100; ++i) {
    const double x = 3.0 * g.next();
    for (int j = 1; j < kHermiteMaxOrder; ++j) {
      const double lhs = hermite(j + 1, x);
      const double rhs = x * hermite(j, x) - j * hermite(j - 1, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("hermite Monte Carlo orthogonality") {
  // E[H_i(xi) H_j(xi)] = i! delta_ij for xi ~ N(0,1)
  const int reps = 200000;
  GaussianStream g(42);
  double sum[5][5] = {};
  double sumsq[5][5] = {};
  for (int r = 0; r < reps; ++r) {
    const double x = g.next();
    double hv[5];
    for (int j = 0; j < 5; ++j) hv[j] = hermite(j, x);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double v = hv[i] * hv[j];
        sum[i][j] += v;
        sumsq[i][j] += v * v;
      }
    }
  }
  double factorial = 1.0;
  for (int i = 0; i < 5; ++i) {
    if (i > 0) factorial *= i;
    for (int j = 0; j <= i; ++j) {
      const double mean = sum[i][j] / reps;
      const double var = sumsq[i][j] / reps - mean * mean;
      const double se = std::sqrt(var / reps);
      const double expected = i == j ? factorial : 0.0;
      CHECK(std::abs(mean - expected) < 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("time grid validation and points") {
  CHECK_THROWS_AS(TimeGrid(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
  const TimeGrid grid(2.0, 8);
  const auto pts = grid.points();
  REQUIRE(pts.size() == 9);
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == doctest::Approx(2.0));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i] - pts[i - 1] == doctest::Approx(grid.dt()));
  }
}
