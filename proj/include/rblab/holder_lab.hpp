#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rblab/local_time.hpp"
#include "rblab/process_model.hpp"

namespace rblab {

/// Existence flag and exponent suprema for the chosen local-time kind:
///   slt: exists iff H < 1;  space sup min{1, 1/H - 1};  time sup 1 - H
///   ilt: exists iff H1 H2/(H1+H2) < 1;
///        space sup min{1, (H1+H2)/(2 H1 H2) - 1/2};
///        time sup 1 - H1 H2/(H1+H2)
///   clt: exists iff H1 H2/(H1+H2) < 1/2;
///        space sup min{1, (H1+H2)/(4 H1 H2) - 1/2};
///        time sup 1 - 2 H1 H2/(H1+H2)
struct ExponentTable {
  LocalTimeKind kind;
  double h1 = 0.0;
  double h2 = 0.0;  // equals h1 for slt
  bool exists = false;
  double space_exponent_sup = 0.0;
  double time_exponent_sup = 0.0;
};

ExponentTable theoretical_exponents(LocalTimeKind kind, HurstParam h1,
                                    std::optional<HurstParam> h2 = {});

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int num_points = 0;
  int moment_order = 0;
};

/// Ordinary least squares of log(moment) against log(delta); needs at least
/// 3 points, all strictly positive.
ExponentFit fit_exponent(
    const std::vector<std::pair<double, double>>& points);

struct HolderConfig {
  LocalTimeKind kind = LocalTimeKind::kSelf;
  double h1 = 0.6;
  double h2 = 0.6;        // ignored for slt
  int moment_order = 2;   // n in E|diff|^n; 1..3 supported
  double epsilon = 0.01;
  int n_steps = 1024;
  int oversample = 16;
  int reps = 2;
  std::uint64_t seed = 0;
  double kappa = 4.0;
  int workers = 1;

  // time experiment
  double t_base = 0.5;
  std::vector<double> deltas;  // horizon offsets, snapped to the grid

  // space experiment
  double horizon = 1.0;          // grid horizon (time experiment derives its
                                 // own from t_base + max delta)
  double y_base = 0.0;
  std::vector<double> offsets;   // ladder in units of sqrt(epsilon)
};

struct StudyRow {
  double delta = 0.0;   // actual separation used (snapped / scaled)
  double moment = 0.0;  // E |alpha(.+delta) - alpha(.)|^n
  double stderr_ = 0.0;
};

struct HolderResult {
  ExponentFit fit;
  std::vector<StudyRow> rows;
  bool smoothing_dominated = false;  // space ladder below sqrt(eps)/2
};

/// Moment scaling in the horizon: on common random paths, the n-th absolute
/// moment of alpha_{t_base+delta} - alpha_{t_base} per ladder entry, with a
/// log-log slope fit.
HolderResult holder_time_experiment(const HolderConfig& cfg);

/// Moment scaling in the space offset y, ladder expressed in units of
/// sqrt(epsilon); common random paths across ladder entries.
HolderResult holder_space_experiment(const HolderConfig& cfg);

}  // namespace rblab
