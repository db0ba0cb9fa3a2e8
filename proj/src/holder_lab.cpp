#include "rblab/holder_lab.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "rblab/errors.hpp"
#include "rblab/parallel.hpp"
#include "rblab/rng.hpp"
#include "rblab/simulator.hpp"

namespace rblab {

namespace {

double harmonic_half(double h1, double h2) { return h1 * h2 / (h1 + h2); }

void validate_common(const HolderConfig& cfg) {
  if (cfg.moment_order < 1 || cfg.moment_order > 3) {
    throw std::invalid_argument("moment order must be 1, 2 or 3");
  }
  if (cfg.reps < 2) throw std::invalid_argument("need at least 2 replications");
  if (cfg.n_steps < 2) throw std::invalid_argument("n_steps too small");
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

void check_floor(const HolderConfig& cfg, double horizon) {
  const bool pair_kind = cfg.kind != LocalTimeKind::kSelf;
  const double h_min = pair_kind ? std::min(cfg.h1, cfg.h2) : cfg.h1;
  const double floor =
      resolution_floor(horizon / cfg.n_steps, h_min, cfg.kappa);
  if (cfg.epsilon < floor) {
    throw std::invalid_argument(
        "epsilon " + std::to_string(cfg.epsilon) +
        " is below the resolution floor kappa*dt^{2H} = " +
        std::to_string(floor));
  }
}

// replication -> local-time values for the prepared (eps, y) list, common
// across ladder entries by construction
std::vector<std::vector<double>> run_replications(
    const HolderConfig& cfg, double horizon,
    const std::vector<std::pair<double, double>>& eps_y) {
  const HurstParam h1(cfg.h1);
  const TimeGrid grid(horizon, cfg.n_steps);
  const bool pair_kind = cfg.kind != LocalTimeKind::kSelf;
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
      SimulationConfig sim{cfg.n_steps, cfg.oversample, horizon, h1, rep_seed};
      values[r] = detail::slt_multi(simulate_rosenblatt(sim), eps_y);
    }
  });
  return values;
}

}  // namespace

ExponentTable theoretical_exponents(LocalTimeKind kind, HurstParam h1,
                                    std::optional<HurstParam> h2) {
  ExponentTable table;
  table.kind = kind;
  table.h1 = h1.value();
  if (kind == LocalTimeKind::kSelf) {
    const double h = h1.value();
    table.h2 = h;
    table.exists = h < 1.0;
    table.space_exponent_sup = std::min(1.0, 1.0 / h - 1.0);
    table.time_exponent_sup = 1.0 - h;
    return table;
  }
  if (!h2.has_value()) {
    throw std::invalid_argument("ilt/clt exponents require both H1 and H2");
  }
  table.h2 = h2->value();
  const double hh = harmonic_half(table.h1, table.h2);
  if (kind == LocalTimeKind::kIntersection) {
    table.exists = hh < 1.0;
    table.space_exponent_sup = std::min(1.0, 0.5 / hh - 0.5);
    table.time_exponent_sup = 1.0 - hh;
  } else {
    table.exists = hh < 0.5;
    table.space_exponent_sup = std::min(1.0, 0.25 / hh - 0.5);
    table.time_exponent_sup = 1.0 - 2.0 * hh;
  }
  return table;
}

ExponentFit fit_exponent(
    const std::vector<std::pair<double, double>>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw std::invalid_argument("fit needs at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [d, m] : points) {
    if (!(d > 0.0) || !(m > 0.0)) {
      throw std::invalid_argument("fit points must be strictly positive");
    }
    sx += std::log(d);
    sy += std::log(m);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [d, m] : points) {
    const double dx = std::log(d) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(m) - my);
  }
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("fit needs at least 2 distinct deltas");
  }
  ExponentFit fit;
  fit.num_points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [d, m] : points) {
    const double r = std::log(m) - (fit.intercept + fit.slope * std::log(d));
    ssr += r * r;
  }
  fit.stderr_slope = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return fit;
}

namespace {

std::vector<StudyRow> moment_rows(
    const std::vector<std::vector<double>>& diffs, int order,
    const std::vector<double>& deltas) {
  std::vector<StudyRow> rows(deltas.size());
  const int reps = static_cast<int>(diffs.size());
  std::vector<double> buf(reps);
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    for (int r = 0; r < reps; ++r) buf[r] = diffs[r][k];
    const auto m = moment_estimate(buf, static_cast<double>(order));
    rows[k] = StudyRow{deltas[k], m.mean, m.stderr_};
  }
  return rows;
}

ExponentFit fit_rows(const std::vector<StudyRow>& rows, int order) {
  std::vector<std::pair<double, double>> points;
  points.reserve(rows.size());
  for (const auto& row : rows) points.emplace_back(row.delta, row.moment);
  auto fit = fit_exponent(points);
  fit.moment_order = order;
  return fit;
}

}  // namespace

HolderResult holder_time_experiment(const HolderConfig& cfg) {
  validate_common(cfg);
  if (!(cfg.t_base > 0.0)) {
    throw std::invalid_argument("t_base must be positive");
  }
  if (cfg.deltas.size() < 3) {
    throw std::invalid_argument("delta ladder needs at least 3 entries");
  }
  const double max_delta =
      *std::max_element(cfg.deltas.begin(), cfg.deltas.end());
  const double horizon = cfg.t_base + max_delta;
  const double dt = horizon / cfg.n_steps;
  check_floor(cfg, horizon);

  // snap base and ladder horizons onto the grid; the snapped values feed
  // the regression
  const int base_index = static_cast<int>(std::llround(cfg.t_base / dt));
  std::vector<int> ladder_index;
  std::set<int> distinct;
  for (double delta : cfg.deltas) {
    if (!(delta > 0.0)) {
      throw std::invalid_argument("time deltas must be positive");
    }
    const int idx =
        static_cast<int>(std::llround((cfg.t_base + delta) / dt));
    if (idx <= base_index || idx > cfg.n_steps) {
      throw std::invalid_argument("delta below grid resolution");
    }
    ladder_index.push_back(idx);
    distinct.insert(idx);
  }
  if (distinct.size() < 3) {
    throw std::invalid_argument("need at least 3 distinct snapped deltas");
  }

  const HurstParam h1(cfg.h1);
  const TimeGrid grid(horizon, cfg.n_steps);
  const bool pair_kind = cfg.kind != LocalTimeKind::kSelf;
  const MollifierScale eps(cfg.epsilon);
  const SpaceOffset y{cfg.y_base};

  auto profile_for = [&](std::uint64_t rep_seed) {
    if (pair_kind) {
      const auto [p1, p2] = simulate_independent_pair(
          grid, h1, HurstParam(cfg.h2), rep_seed, cfg.oversample);
      return cfg.kind == LocalTimeKind::kIntersection
                 ? ilt_profile(p1, p2, eps, y)
                 : clt_profile(p1, p2, eps, y);
    }
    SimulationConfig sim{cfg.n_steps, cfg.oversample, horizon, h1, rep_seed};
    return slt_profile(simulate_rosenblatt(sim), eps, y);
  };

  // common-random-number sanity: same seed twice gives delta = 0 exactly
  if (profile_for(derive_seed(cfg.seed, 0)) !=
      profile_for(derive_seed(cfg.seed, 0))) {
    throw numerical_error("replication is not deterministic per seed");
  }

  std::vector<std::vector<double>> diffs(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](int r) {
    const auto profile =
        profile_for(derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    std::vector<double> d(ladder_index.size());
    for (std::size_t k = 0; k < ladder_index.size(); ++k) {
      d[k] = profile[ladder_index[k]] - profile[base_index];
    }
    diffs[r] = std::move(d);
  });

  std::vector<double> snapped;
  for (int idx : ladder_index) snapped.push_back((idx - base_index) * dt);
  HolderResult result;
  result.rows = moment_rows(diffs, cfg.moment_order, snapped);
  result.fit = fit_rows(result.rows, cfg.moment_order);
  return result;
}

HolderResult holder_space_experiment(const HolderConfig& cfg) {
  validate_common(cfg);
  if (cfg.offsets.size() < 3) {
    throw std::invalid_argument("offset ladder needs at least 3 entries");
  }
  check_floor(cfg, cfg.horizon);
  const double sqrt_eps = std::sqrt(cfg.epsilon);
  std::set<double> distinct;
  std::vector<std::pair<double, double>> eps_y{{cfg.epsilon, cfg.y_base}};
  std::vector<double> scaled;
  for (double offset : cfg.offsets) {
    if (offset == 0.0) {
      throw std::invalid_argument("space offsets must be nonzero");
    }
    distinct.insert(offset);
    scaled.push_back(offset * sqrt_eps);
    eps_y.emplace_back(cfg.epsilon, cfg.y_base + offset * sqrt_eps);
  }
  if (distinct.size() < 3) {
    throw std::invalid_argument("need at least 3 distinct offsets");
  }

  // the zero-offset value must be bit-identical when recomputed: entry 0 of
  // eps_y is evaluated from the same draws as the ladder entries, so the
  // delta = 0 moment is exactly zero by construction; verify determinism of
  // the path generation itself on replication 0
  {
    HolderConfig probe_cfg = cfg;
    probe_cfg.reps = 2;
    probe_cfg.workers = 1;
    const std::vector<std::pair<double, double>> probe_pair{eps_y[0]};
    const auto a = run_replications(probe_cfg, cfg.horizon, probe_pair);
    const auto b = run_replications(probe_cfg, cfg.horizon, probe_pair);
    if (a[0] != b[0]) {
      throw numerical_error("replication is not deterministic per seed");
    }
  }

  const auto values = run_replications(cfg, cfg.horizon, eps_y);
  std::vector<std::vector<double>> diffs(cfg.reps);
  for (int r = 0; r < cfg.reps; ++r) {
    std::vector<double> d(scaled.size());
    for (std::size_t k = 0; k < scaled.size(); ++k) {
      d[k] = values[r][k + 1] - values[r][0];
    }
    diffs[r] = std::move(d);
  }

  std::vector<double> abs_delta;
  for (double s : scaled) abs_delta.push_back(std::abs(s));
  HolderResult result;
  result.rows = moment_rows(diffs, cfg.moment_order, abs_delta);
  result.fit = fit_rows(result.rows, cfg.moment_order);
  double max_offset = 0.0;
  for (double offset : cfg.offsets) {
    max_offset = std::max(max_offset, std::abs(offset));
  }
  result.smoothing_dominated = max_offset < 0.5;
  return result;
}

}  // namespace rblab
