#pragma once

#include <cstdint>
#include <vector>

namespace rblab {

/// Hurst parameter of the Rosenblatt process, restricted to the open
/// interval (1/2, 1). Both endpoints are structurally excluded.
class HurstParam {
 public:
  explicit HurstParam(double h);
  double value() const { return h_; }

 private:
  double h_;
};

struct HurstPair {
  HurstParam h1;
  HurstParam h2;
};

/// Uniform grid 0 = s_0 < s_1 < ... < s_n = T.
class TimeGrid {
 public:
  TimeGrid(double horizon, int n_steps);

  double horizon() const { return horizon_; }
  int steps() const { return n_steps_; }
  double dt() const { return horizon_ / n_steps_; }
  double point(int i) const { return horizon_ * i / n_steps_; }
  std::vector<double> points() const;

  bool operator==(const TimeGrid& other) const {
    return horizon_ == other.horizon_ && n_steps_ == other.n_steps_;
  }

 private:
  double horizon_;
  int n_steps_;
};

/// A sampled trajectory; values[i] is the process at grid.point(i),
/// values[0] == 0.
struct ProcessPath {
  TimeGrid grid;
  std::vector<double> values;
  HurstParam h;
  std::uint64_t seed = 0;
};

/// Covariance of the Rosenblatt process (unit variance at t = 1):
/// (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double covariance(double s, double t, HurstParam h);

inline constexpr int kHermiteMaxOrder = 20;

/// Probabilists' Hermite polynomial H_j(x), H_0 = 1, H_1 = x, computed by
/// the three-term recurrence. Orders above kHermiteMaxOrder are rejected.
double hermite(int order, double x);

}  // namespace rblab
