#include "rblab/process_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rblab {

HurstParam::HurstParam(double h) : h_(h) {
  if (!(h > 0.5) || !(h < 1.0)) {
    throw std::invalid_argument(
        "Hurst parameter must lie in the open interval (0.5, 1), got " +
        std::to_string(h));
  }
}

TimeGrid::TimeGrid(double horizon, int n_steps)
    : horizon_(horizon), n_steps_(n_steps) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("time horizon must be positive");
  }
  if (n_steps < 1) {
    throw std::invalid_argument("n_steps must be at least 1");
  }
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> p(n_steps_ + 1);
  for (int i = 0; i <= n_steps_; ++i) p[i] = point(i);
  return p;
}

double covariance(double s, double t, HurstParam h) {
  if (s < 0.0 || t < 0.0) {
    throw std::invalid_argument("covariance requires s, t >= 0");
  }
  const double two_h = 2.0 * h.value();
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) -
                std::pow(std::abs(t - s), two_h));
}

double hermite(int order, double x) {
  if (order < 0) throw std::invalid_argument("hermite order must be >= 0");
  if (order > kHermiteMaxOrder) {
    throw std::invalid_argument("hermite order above supported maximum " +
                                std::to_string(kHermiteMaxOrder));
  }
  if (order == 0) return 1.0;
  double prev = 1.0;  // H_0
  double cur = x;     // H_1
  for (int j = 1; j < order; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace rblab
