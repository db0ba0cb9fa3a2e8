#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rblab/process_model.hpp"

namespace rblab {

struct MollifierScale {
  explicit MollifierScale(double e);
  double epsilon;
};

struct SpaceOffset {
  double y = 0.0;
};

enum class LocalTimeKind { kSelf, kIntersection, kCollision };

const char* kind_name(LocalTimeKind kind);  // "slt" / "ilt" / "clt"

struct LocalTimeEstimate {
  LocalTimeKind kind;
  double value = 0.0;
  double y = 0.0;
  double t = 0.0;
  double epsilon = 0.0;
  int grid_steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t seed2 = 0;  // second path for ilt/clt, 0 otherwise
};

/// Gaussian mollifier f_eps(x) = (2 pi eps)^{-1/2} exp(-x^2 / (2 eps)).
double mollifier(double x, MollifierScale eps);

/// Self-intersection estimate: dt^2 sum over interior pairs 1 <= j < i <= n
/// of f_eps(X_i - X_j - y). The open triangle {0 < r < s < t} keeps one
/// endpoint out, leaving n(n-1)/2 terms.
LocalTimeEstimate slt_estimate(const ProcessPath& path, MollifierScale eps,
                               SpaceOffset y = {});

/// Intersection estimate over the full square with trapezoid end-weights:
/// dt^2 sum_{i,j=0..n} w_i w_j f_eps(X1_i - X2_j - y). Paths must share the
/// grid.
LocalTimeEstimate ilt_estimate(const ProcessPath& path1,
                               const ProcessPath& path2, MollifierScale eps,
                               SpaceOffset y = {});

/// Collision estimate: dt sum_i w_i f_eps(X1_i - X2_i - y), trapezoid.
LocalTimeEstimate clt_estimate(const ProcessPath& path1,
                               const ProcessPath& path2, MollifierScale eps,
                               SpaceOffset y = {});

/// Estimates at every grid horizon s_k on one pass over the pair set;
/// profile[k] is the estimate restricted to [0, s_k].
std::vector<double> slt_profile(const ProcessPath& path, MollifierScale eps,
                                SpaceOffset y = {});
std::vector<double> ilt_profile(const ProcessPath& path1,
                                const ProcessPath& path2, MollifierScale eps,
                                SpaceOffset y = {});
std::vector<double> clt_profile(const ProcessPath& path1,
                                const ProcessPath& path2, MollifierScale eps,
                                SpaceOffset y = {});

namespace detail {

/// Full-horizon values for several (epsilon, y) pairs in one pass over the
/// path; the workhorse behind common-random-number ladders.
std::vector<double> slt_multi(
    const ProcessPath& path,
    const std::vector<std::pair<double, double>>& eps_y);
std::vector<double> ilt_multi(
    const ProcessPath& path1, const ProcessPath& path2,
    const std::vector<std::pair<double, double>>& eps_y);
std::vector<double> clt_multi(
    const ProcessPath& path1, const ProcessPath& path2,
    const std::vector<std::pair<double, double>>& eps_y);

}  // namespace detail

/// Smallest admissible mollifier variance on a grid with the given step:
/// kappa * dt^{2H}, below which the Riemann sum under-resolves the kernel.
double resolution_floor(double dt, double h, double kappa = 4.0);

struct EpsStudyConfig {
  LocalTimeKind kind = LocalTimeKind::kSelf;
  double h1 = 0.7;
  double h2 = 0.7;  // ignored for slt
  int n_steps = 256;
  int oversample = 16;
  double horizon = 1.0;
  double y = 0.0;
  std::vector<double> ladder;  // strictly decreasing epsilons
  int reps = 2;
  std::uint64_t seed = 0;
  double moment_p = 1.0;  // exponent of E|alpha|^p reported per rung
  double kappa = 4.0;     // resolution-floor multiplier
  int workers = 1;
};

struct EpsStudyRow {
  double epsilon = 0.0;
  double mean_value = 0.0;    // E |alpha_eps|^p over replications
  double stderr_value = 0.0;
  double diff_to_next = 0.0;  // E |alpha_eps_k - alpha_eps_{k+1}|; NaN on last
  double stderr_diff = 0.0;   // NaN on last rung
};

/// Cauchy-in-epsilon study with common random paths across rungs: the same
/// replication seed drives every ladder entry, so per-rung differences
/// reflect the mollifier scale only.
std::vector<EpsStudyRow> epsilon_convergence_study(const EpsStudyConfig& cfg);

struct MomentEstimate {
  double p = 1.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  int reps = 0;
};

/// Empirical E|x|^p with jackknife standard error (for the mean this is the
/// classical s / sqrt(n)).
MomentEstimate moment_estimate(std::span<const double> samples, double p);

}  // namespace rblab
