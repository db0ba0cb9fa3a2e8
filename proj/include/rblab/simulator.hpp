#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rblab/process_model.hpp"
#include "rblab/rng.hpp"

namespace rblab {

/// Stationary centered Gaussian sequence with unit variance and long-range
/// dependent correlation; the raw material of the rank-2 partial-sum
/// construction.
struct LrdGaussianSequence {
  std::vector<double> values;
  HurstParam h;
  std::uint64_t seed = 0;
};

enum class Normalization { kExactVariance, kNone };

struct SimulationConfig {
  int n_steps;
  int oversample = 16;  // internal sequence length = oversample * n_steps
  double horizon = 1.0;
  HurstParam h;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::kExactVariance;
};

/// Correlation of standardized fractional Gaussian noise at the given lag:
/// (|k+1|^{2H'} - 2|k|^{2H'} + |k-1|^{2H'}) / 2.
double fgn_correlation(long lag, double hurst_prime);

/// Exact sampler for a stationary Gaussian sequence with prescribed
/// autocovariance (autocov[0] = variance), by circulant embedding. Throws
/// numerical_error naming the offending index if the embedding spectrum has
/// a negative coefficient beyond rounding tolerance; never clips silently.
std::vector<double> circulant_embedding_sample(
    const std::vector<double>& autocov, int n, GaussianStream& gauss);

/// Exact sample of the LRD Gaussian sequence driving the rank-2 construction:
/// fractional Gaussian noise with index H' = (H+1)/2, so that
/// corr(xi_0, xi_k) ~ H'(2H'-1) k^{H-1}. O(N log N), deterministic per seed.
LrdGaussianSequence generate_lrd_gaussian(int n, HurstParam h,
                                          std::uint64_t seed);

/// Var(N^{-H} sum_{j=1..N} H_2(xi_j)), computed exactly in O(N) from
/// E[H_2(xi_i) H_2(xi_j)] = 2 rho(i-j)^2.
double exact_partial_sum_variance(int n, HurstParam h);

/// Rosenblatt sample path by normalized partial sums of H_2 over the
/// oversampled internal sequence. With exact-variance normalization,
/// Var(X(T)) = T^{2H} holds exactly at the discrete level.
ProcessPath simulate_rosenblatt(const SimulationConfig& config);

/// Two independent paths on a common grid, driven by disjoint sub-streams
/// derived from the master seed.
std::pair<ProcessPath, ProcessPath> simulate_independent_pair(
    const TimeGrid& grid, HurstParam h1, HurstParam h2,
    std::uint64_t master_seed, int oversample = 16);

}  // namespace rblab
