#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rblab/errors.hpp"
#include "rblab/process_model.hpp"
#include "rblab/rng.hpp"
#include "rblab/simulator.hpp"

using namespace rblab;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

// O(N^2) oracle for the partial-sum variance, straight from
// E[H_2(xi_i) H_2(xi_j)] = 2 rho(i-j)^2
double brute_force_partial_sum_variance(int n, double h) {
  const double hp = 0.5 * (h + 1.0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double rho = fgn_correlation(i - j, hp);
      sum += 2.0 * rho * rho;
    }
  }
  return sum * std::pow(static_cast<double>(n), -2.0 * h);
}

}  // namespace

TEST_CASE("fgn correlation closed form") {
  CHECK(fgn_correlation(0, 0.8) == doctest::Approx(1.0));
  CHECK(fgn_correlation(0, 0.95) == doctest::Approx(1.0));
  // independent increments at H' = 1/2 (boundary sanity only)
  CHECK(fgn_correlation(1, 0.5) == doctest::Approx(0.0).epsilon(1e-14));
  // negative lags mirror positive ones
  CHECK(fgn_correlation(-5, 0.85) == doctest::Approx(fgn_correlation(5, 0.85)));
}

TEST_CASE("fgn correlation matches its power-law asymptote") {
  for (double hp : {0.76, 0.85, 0.95}) {
    for (long k : {1000L, 100000L, 1000000L}) {
      const double asymptote =
          hp * (2.0 * hp - 1.0) * std::pow(static_cast<double>(k), 2.0 * hp - 2.0);
      CHECK(fgn_correlation(k, hp) / asymptote ==
            doctest::Approx(1.0).epsilon(2e-3));
    }
  }
}

TEST_CASE("lrd sequence basics") {
  const auto seq = generate_lrd_gaussian(1, HurstParam(0.7), 99);
  REQUIRE(seq.values.size() == 1);  // a single standard normal draw

  const auto a = generate_lrd_gaussian(4096, HurstParam(0.7), 123);
  const auto b = generate_lrd_gaussian(4096, HurstParam(0.7), 123);
  CHECK(a.values == b.values);  // bit-identical per seed
  const auto c = generate_lrd_gaussian(4096, HurstParam(0.7), 124);
  CHECK(a.values != c.values);
}

TEST_CASE("lrd sequence lag correlations match fgn_correlation") {
  // averaged over 200 seeds at N = 2^14, against the exact target at
  // H' = (H+1)/2 = 0.9
  const int n = 1 << 14;
  const int seeds = 200;
  const HurstParam h(0.8);
  const double hp = 0.9;
  const std::vector<int> lags{1, 2, 4, 8, 16};
  std::vector<double> est(lags.size(), 0.0), est_sq(lags.size(), 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto seq = generate_lrd_gaussian(n, h, derive_seed(2024, s));
    for (std::size_t li = 0; li < lags.size(); ++li) {
      const int k = lags[li];
      double acc = 0.0;
      for (int i = 0; i + k < n; ++i) acc += seq.values[i] * seq.values[i + k];
      acc /= (n - k);
      est[li] += acc;
      est_sq[li] += acc * acc;
    }
  }
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double mean = est[li] / seeds;
    const double var = est_sq[li] / seeds - mean * mean;
    const double se = std::sqrt(var / seeds);
    const double target = fgn_correlation(lags[li], hp);
    INFO("lag ", lags[li], " mean ", mean, " target ", target, " se ", se);
    CHECK(std::abs(mean - target) < 4.0 * se);
  }
}

TEST_CASE("circulant embedding rejects an indefinite covariance") {
  // this autocovariance is not embeddable: the circulant spectrum goes
  // negative, which must be a hard error naming the index
  std::vector<double> bad{1.0, 0.9, -0.9, 0.9, -0.9, 0.9};
  GaussianStream g(1);
  CHECK_THROWS_AS(circulant_embedding_sample(bad, 6, g), numerical_error);
  try {
    GaussianStream g2(1);
    circulant_embedding_sample(bad, 6, g2);
  } catch (const numerical_error& e) {
    CHECK(std::string(e.what()).find("index") != std::string::npos);
  }
}

TEST_CASE("exact partial-sum variance") {
  // N = 1: Var(H_2(xi)) = Var(xi^2 - 1) = 2
  CHECK(exact_partial_sum_variance(1, HurstParam(0.7)) == doctest::Approx(2.0));
  CHECK(exact_partial_sum_variance(1, HurstParam(0.6)) == doctest::Approx(2.0));

  // O(N) formula against the O(N^2) double sum
  for (double h : {0.6, 0.75}) {
    const double fast = exact_partial_sum_variance(512, HurstParam(h));
    const double slow = brute_force_partial_sum_variance(512, h);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
  }

  // the N -> infinity normalization limit: relative changes shrink along
  // N = 2^10, 2^12, 2^14 (limit ~ 2.5 at H = 0.7)
  const double v10 = exact_partial_sum_variance(1 << 10, HurstParam(0.7));
  const double v12 = exact_partial_sum_variance(1 << 12, HurstParam(0.7));
  const double v14 = exact_partial_sum_variance(1 << 14, HurstParam(0.7));
  const double change1 = std::abs(v12 - v10) / v10;
  const double change2 = std::abs(v14 - v12) / v12;
  CHECK(change2 < change1);
  CHECK(v14 == doctest::Approx(2.5).epsilon(0.02));
}

TEST_CASE("rosenblatt path starts at zero and is deterministic") {
  SimulationConfig cfg{64, 8, 1.0, HurstParam(0.7), 31};
  const auto p1 = simulate_rosenblatt(cfg);
  const auto p2 = simulate_rosenblatt(cfg);
  CHECK(p1.values[0] == 0.0);
  CHECK(p1.values.size() == 65);
  CHECK(p1.values == p2.values);
}

TEST_CASE("ensemble variance, covariance and skewness of the marginal") {
  const int reps = 4000;
  const int steps = 128;
  const HurstParam h(0.7);
  std::vector<double> x_half(reps), x_one(reps);
  for (int r = 0; r < reps; ++r) {
    SimulationConfig cfg{steps, 8, 1.0, h, derive_seed(555, r)};
    const auto path = simulate_rosenblatt(cfg);
    x_half[r] = path.values[steps / 2];
    x_one[r] = path.values[steps];
  }

  // Var X(1) = 1 exactly under exact-variance normalization
  std::vector<double> sq(reps);
  for (int r = 0; r < reps; ++r) sq[r] = x_one[r] * x_one[r];
  const double var = mean_of(sq);
  double se_var = 0.0;
  for (double v : sq) se_var += (v - var) * (v - var);
  se_var = std::sqrt(se_var / reps / reps);
  INFO("var ", var, " se ", se_var);
  CHECK(std::abs(var - 1.0) < 4.0 * se_var);

  // Cov(X(1/2), X(1)) matches the closed form
  std::vector<double> prod(reps);
  for (int r = 0; r < reps; ++r) prod[r] = x_half[r] * x_one[r];
  const double cov = mean_of(prod);
  double se_cov = 0.0;
  for (double v : prod) se_cov += (v - cov) * (v - cov);
  se_cov = std::sqrt(se_cov / reps / reps);
  const double target = covariance(0.5, 1.0, h);
  INFO("cov ", cov, " target ", target, " se ", se_cov);
  CHECK(std::abs(cov - target) < 4.0 * se_cov);

  // the marginal is positively skewed
  double m3 = 0.0;
  for (double v : x_one) m3 += v * v * v;
  m3 /= reps;
  double se_m3 = 0.0;
  for (double v : x_one) se_m3 += (v * v * v - m3) * (v * v * v - m3);
  se_m3 = std::sqrt(se_m3 / reps / reps);
  INFO("third moment ", m3, " se ", se_m3);
  CHECK(m3 > 2.0 * se_m3);
}

TEST_CASE("self-similarity and increment stationarity at the moment level") {
  const int reps = 4000;
  const int steps = 64;
  const HurstParam h(0.65);
  std::vector<std::vector<double>> paths(reps);
  for (int r = 0; r < reps; ++r) {
    SimulationConfig cfg{steps, 8, 1.0, h, derive_seed(77, r)};
    paths[r] = simulate_rosenblatt(cfg).values;
  }
  auto second_moment = [&](int idx, int base) {
    double m = 0.0, s = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double d = paths[r][idx] - paths[r][base];
      m += d * d;
    }
    m /= reps;
    for (int r = 0; r < reps; ++r) {
      const double d = paths[r][idx] - paths[r][base];
      s += (d * d - m) * (d * d - m);
    }
    return std::pair<double, double>{m, std::sqrt(s / reps / reps)};
  };

  // E X(t)^2 / t^{2H} = 1 within sampling error
  for (int idx : {16, 32, 64}) {
    const auto [m, se] = second_moment(idx, 0);
    const double t = static_cast<double>(idx) / steps;
    const double target = std::pow(t, 2 * h.value());
    INFO("t ", t, " m ", m, " target ", target);
    CHECK(std::abs(m - target) < 4.0 * se);
  }

  // Var(X(t+h) - X(t)) depends on the gap only
  const int gap = 16;
  const auto [m0, se0] = second_moment(gap, 0);
  for (int base : {16, 32, 48}) {
    const auto [m, se] = second_moment(base + gap, base);
    CHECK(std::abs(m - m0) < 4.0 * std::sqrt(se * se + se0 * se0));
  }
}

TEST_CASE("independent pair: disjoint streams, reproducible, uncorrelated") {
  const TimeGrid grid(1.0, 64);
  const auto [a1, a2] =
      simulate_independent_pair(grid, HurstParam(0.7), HurstParam(0.7), 9001, 8);
  const auto [b1, b2] =
      simulate_independent_pair(grid, HurstParam(0.7), HurstParam(0.7), 9001, 8);
  CHECK(a1.values == b1.values);  // same master seed, same pair
  CHECK(a2.values == b2.values);
  CHECK(a1.values != a2.values);  // equal H, still disjoint streams

  // empirical cross-correlation of increments vanishes
  const int reps = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto [p1, p2] = simulate_independent_pair(
        grid, HurstParam(0.6), HurstParam(0.8), derive_seed(13, r), 4);
    const double d1 = p1.values[32] - p1.values[16];
    const double d2 = p2.values[32] - p2.values[16];
    sum += d1 * d2;
    sum_sq += d1 * d2 * d1 * d2;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
  INFO("cross ", mean, " se ", se);
  CHECK(std::abs(mean) < 4.0 * se);
}
