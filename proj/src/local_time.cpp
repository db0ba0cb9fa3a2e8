#include "rblab/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rblab/parallel.hpp"
#include "rblab/rng.hpp"
#include "rblab/simulator.hpp"

namespace rblab {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Kernel {
  double inv_two_eps;
  double norm;
  double y;
  explicit Kernel(double eps, double y_)
      : inv_two_eps(0.5 / eps), norm(1.0 / std::sqrt(2.0 * kPi * eps)), y(y_) {}
  double operator()(double d) const {
    const double u = d - y;
    return norm * std::exp(-u * u * inv_two_eps);
  }
};

std::vector<Kernel> make_kernels(
    const std::vector<std::pair<double, double>>& eps_y) {
  std::vector<Kernel> k;
  k.reserve(eps_y.size());
  for (const auto& [eps, y] : eps_y) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    k.emplace_back(eps, y);
  }
  return k;
}

void require_same_grid(const ProcessPath& a, const ProcessPath& b) {
  if (!(a.grid == b.grid)) {
    throw std::invalid_argument("paths must share the same time grid");
  }
}

}  // namespace

MollifierScale::MollifierScale(double e) : epsilon(e) {
  if (!(e > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

const char* kind_name(LocalTimeKind kind) {
  switch (kind) {
    case LocalTimeKind::kSelf: return "slt";
    case LocalTimeKind::kIntersection: return "ilt";
    case LocalTimeKind::kCollision: return "clt";
  }
  return "?";
}

double mollifier(double x, MollifierScale eps) {
  return std::exp(-x * x / (2.0 * eps.epsilon)) /
         std::sqrt(2.0 * kPi * eps.epsilon);
}

namespace detail {

std::vector<double> slt_multi(
    const ProcessPath& path,
    const std::vector<std::pair<double, double>>& eps_y) {
  const auto kernels = make_kernels(eps_y);
  const int n = path.grid.steps();
  const auto& x = path.values;
  std::vector<double> acc(kernels.size(), 0.0);
  for (int i = 2; i <= n; ++i) {
    const double xi = x[i];
    for (int j = 1; j < i; ++j) {
      const double d = xi - x[j];
      for (std::size_t q = 0; q < kernels.size(); ++q) acc[q] += kernels[q](d);
    }
  }
  const double dt2 = path.grid.dt() * path.grid.dt();
  for (double& v : acc) v *= dt2;
  return acc;
}

std::vector<double> ilt_multi(
    const ProcessPath& path1, const ProcessPath& path2,
    const std::vector<std::pair<double, double>>& eps_y) {
  require_same_grid(path1, path2);
  const auto kernels = make_kernels(eps_y);
  const int n = path1.grid.steps();
  const auto& x1 = path1.values;
  const auto& x2 = path2.values;
  const std::size_t q_count = kernels.size();
  std::vector<double> acc(q_count, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double wi = (i == 0 || i == n) ? 0.5 : 1.0;
    const double xi = x1[i];
    for (int j = 0; j <= n; ++j) {
      const double w = wi * ((j == 0 || j == n) ? 0.5 : 1.0);
      const double d = xi - x2[j];
      for (std::size_t q = 0; q < q_count; ++q) acc[q] += w * kernels[q](d);
    }
  }
  const double dt2 = path1.grid.dt() * path1.grid.dt();
  for (double& v : acc) v *= dt2;
  return acc;
}

std::vector<double> clt_multi(
    const ProcessPath& path1, const ProcessPath& path2,
    const std::vector<std::pair<double, double>>& eps_y) {
  require_same_grid(path1, path2);
  const auto kernels = make_kernels(eps_y);
  const int n = path1.grid.steps();
  std::vector<double> acc(kernels.size(), 0.0);
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double d = path1.values[i] - path2.values[i];
    for (std::size_t q = 0; q < kernels.size(); ++q) acc[q] += w * kernels[q](d);
  }
  const double dt = path1.grid.dt();
  for (double& v : acc) v *= dt;
  return acc;
}

}  // namespace detail

LocalTimeEstimate slt_estimate(const ProcessPath& path, MollifierScale eps,
                               SpaceOffset y) {
  const auto v = detail::slt_multi(path, {{eps.epsilon, y.y}});
  return LocalTimeEstimate{LocalTimeKind::kSelf, v[0],          y.y,
                           path.grid.horizon(),  eps.epsilon,
                           path.grid.steps(),    path.seed,     0};
}

LocalTimeEstimate ilt_estimate(const ProcessPath& path1,
                               const ProcessPath& path2, MollifierScale eps,
                               SpaceOffset y) {
  const auto v = detail::ilt_multi(path1, path2, {{eps.epsilon, y.y}});
  return LocalTimeEstimate{LocalTimeKind::kIntersection, v[0],       y.y,
                           path1.grid.horizon(),         eps.epsilon,
                           path1.grid.steps(),           path1.seed,
                           path2.seed};
}

LocalTimeEstimate clt_estimate(const ProcessPath& path1,
                               const ProcessPath& path2, MollifierScale eps,
                               SpaceOffset y) {
  const auto v = detail::clt_multi(path1, path2, {{eps.epsilon, y.y}});
  return LocalTimeEstimate{LocalTimeKind::kCollision, v[0],       y.y,
                           path1.grid.horizon(),      eps.epsilon,
                           path1.grid.steps(),        path1.seed,
                           path2.seed};
}

std::vector<double> slt_profile(const ProcessPath& path, MollifierScale eps,
                                SpaceOffset y) {
  const Kernel kernel(eps.epsilon, y.y);
  const int n = path.grid.steps();
  const auto& x = path.values;
  const double dt2 = path.grid.dt() * path.grid.dt();
  std::vector<double> profile(n + 1, 0.0);
  double acc = 0.0;
  for (int i = 2; i <= n; ++i) {
    const double xi = x[i];
    for (int j = 1; j < i; ++j) acc += kernel(xi - x[j]);
    profile[i] = acc * dt2;
  }
  return profile;
}

std::vector<double> ilt_profile(const ProcessPath& path1,
                                const ProcessPath& path2, MollifierScale eps,
                                SpaceOffset y) {
  require_same_grid(path1, path2);
  const Kernel kernel(eps.epsilon, y.y);
  const int n = path1.grid.steps();
  const auto& x1 = path1.values;
  const auto& x2 = path2.values;
  const double dt2 = path1.grid.dt() * path1.grid.dt();
  // grow the square frame by frame, keeping row/column sums so the
  // trapezoid end-weight correction stays O(1) per frame
  std::vector<double> row(n + 1, 0.0), col(n + 1, 0.0), profile(n + 1, 0.0);
  double full = kernel(x1[0] - x2[0]);
  row[0] = col[0] = full;
  for (int k = 1; k <= n; ++k) {
    double row_k = 0.0, col_k = 0.0;
    for (int j = 0; j < k; ++j) {
      const double a = kernel(x1[k] - x2[j]);
      row_k += a;
      col[j] += a;
      const double b = kernel(x1[j] - x2[k]);
      col_k += b;
      row[j] += b;
    }
    const double diag = kernel(x1[k] - x2[k]);
    row_k += diag;
    col_k += diag;
    row[k] = row_k;
    col[k] = col_k;
    full += row_k + col_k - diag;
    const double corners = kernel(x1[0] - x2[0]) + kernel(x1[0] - x2[k]) +
                           kernel(x1[k] - x2[0]) + diag;
    profile[k] =
        (full - 0.5 * (row[0] + row_k + col[0] + col_k) + 0.25 * corners) *
        dt2;
  }
  return profile;
}

std::vector<double> clt_profile(const ProcessPath& path1,
                                const ProcessPath& path2, MollifierScale eps,
                                SpaceOffset y) {
  require_same_grid(path1, path2);
  const Kernel kernel(eps.epsilon, y.y);
  const int n = path1.grid.steps();
  const double dt = path1.grid.dt();
  std::vector<double> profile(n + 1, 0.0);
  const double f0 = kernel(path1.values[0] - path2.values[0]);
  double sum = f0;
  for (int k = 1; k <= n; ++k) {
    const double fk = kernel(path1.values[k] - path2.values[k]);
    sum += fk;
    profile[k] = (sum - 0.5 * f0 - 0.5 * fk) * dt;
  }
  return profile;
}

double resolution_floor(double dt, double h, double kappa) {
  return kappa * std::pow(dt, 2.0 * h);
}

std::vector<EpsStudyRow> epsilon_convergence_study(const EpsStudyConfig& cfg) {
  const int rungs = static_cast<int>(cfg.ladder.size());
  if (rungs < 2) throw std::invalid_argument("ladder needs at least 2 rungs");
  for (int k = 0; k + 1 < rungs; ++k) {
    if (!(cfg.ladder[k] > cfg.ladder[k + 1])) {
      throw std::invalid_argument("ladder must be strictly decreasing");
    }
  }
  if (cfg.reps < 2) throw std::invalid_argument("need at least 2 replications");
  const bool pair_kind = cfg.kind != LocalTimeKind::kSelf;
  const double h_min = pair_kind ? std::min(cfg.h1, cfg.h2) : cfg.h1;
  const double dt = cfg.horizon / cfg.n_steps;
  const double floor = resolution_floor(dt, h_min, cfg.kappa);
  if (cfg.ladder.back() < floor) {
    throw std::invalid_argument(
        "epsilon " + std::to_string(cfg.ladder.back()) +
        " is below the resolution floor kappa*dt^{2H} = " +
        std::to_string(floor) + "; refine the grid or raise epsilon");
  }

  std::vector<std::pair<double, double>> eps_y;
  for (double eps : cfg.ladder) eps_y.emplace_back(eps, cfg.y);

  const HurstParam h1(cfg.h1);
  const TimeGrid grid(cfg.horizon, cfg.n_steps);
  std::vector<std::vector<double>> values(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](int r) {
    const std::uint64_t rep_seed =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    if (pair_kind) {
      const auto [p1, p2] = simulate_independent_pair(
          grid, h1, HurstParam(cfg.h2), rep_seed, cfg.oversample);
      values[r] = cfg.kind == LocalTimeKind::kIntersection
                      ? detail::ilt_multi(p1, p2, eps_y)
                      : detail::clt_multi(p1, p2, eps_y);
    } else {
      SimulationConfig sim{cfg.n_steps, cfg.oversample, cfg.horizon, h1,
                           rep_seed};
      values[r] = detail::slt_multi(simulate_rosenblatt(sim), eps_y);
    }
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<EpsStudyRow> rows(rungs);
  std::vector<double> buf(cfg.reps);
  for (int k = 0; k < rungs; ++k) {
    for (int r = 0; r < cfg.reps; ++r) buf[r] = values[r][k];
    const auto value_moment = moment_estimate(buf, cfg.moment_p);
    rows[k].epsilon = cfg.ladder[k];
    rows[k].mean_value = value_moment.mean;
    rows[k].stderr_value = value_moment.stderr_;
    if (k + 1 < rungs) {
      for (int r = 0; r < cfg.reps; ++r) {
        buf[r] = values[r][k] - values[r][k + 1];
      }
      const auto diff_moment = moment_estimate(buf, 1.0);
      rows[k].diff_to_next = diff_moment.mean;
      rows[k].stderr_diff = diff_moment.stderr_;
    } else {
      rows[k].diff_to_next = nan;
      rows[k].stderr_diff = nan;
    }
  }
  return rows;
}

MomentEstimate moment_estimate(std::span<const double> samples, double p) {
  if (samples.size() < 2) {
    throw std::invalid_argument("moment estimate needs at least 2 samples");
  }
  if (!(p >= 0.0)) throw std::invalid_argument("moment order must be >= 0");
  const int n = static_cast<int>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += std::pow(std::abs(x), p);
  mean /= n;
  double ss = 0.0;
  for (double x : samples) {
    const double d = std::pow(std::abs(x), p) - mean;
    ss += d * d;
  }
  return MomentEstimate{p, mean,
                        std::sqrt(ss / (static_cast<double>(n) * (n - 1))),
                        n};
}

}  // namespace rblab
