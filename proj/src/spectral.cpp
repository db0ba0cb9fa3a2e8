#include "rblab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "rblab/errors.hpp"
#include "rblab/parallel.hpp"
#include "rblab/rng.hpp"

namespace rblab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI(0.0, 1.0);

// switch-over to series expansions near the removable singularities
constexpr double kSeriesThreshold = 1e-6;

}  // namespace

IntervalCoefficients::IntervalCoefficients(std::vector<double> breakpoints,
                                           std::vector<double> coefficients)
    : breakpoints_(std::move(breakpoints)),
      coefficients_(std::move(coefficients)) {
  if (coefficients_.empty() ||
      breakpoints_.size() != coefficients_.size() + 1) {
    throw std::invalid_argument(
        "interval coefficients need m+1 breakpoints for m coefficients");
  }
  if (breakpoints_.front() < 0.0) {
    throw std::invalid_argument("breakpoints must start at >= 0");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw std::invalid_argument("breakpoints must be strictly increasing");
    }
  }
  bool any = false;
  for (double u : coefficients_) any = any || u != 0.0;
  if (!any) throw std::invalid_argument("coefficients must not all be zero");
}

IntervalCoefficients IntervalCoefficients::single_interval(double t,
                                                           double u) {
  return IntervalCoefficients({0.0, t}, {u});
}

double IntervalCoefficients::total_mass() const {
  double s = 0.0;
  for (int i = 0; i < pieces(); ++i) {
    s += coefficients_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
  }
  return s;
}

double IntervalCoefficients::max_weighted_length(HurstParam h) const {
  double m = 0.0;
  for (int i = 0; i < pieces(); ++i) {
    m = std::max(m, std::abs(coefficients_[i]) *
                        std::pow(breakpoints_[i + 1] - breakpoints_[i],
                                 h.value()));
  }
  return m;
}

std::complex<double> kernel_Ht(double x, double y, double t) {
  const double z = x + y;
  const std::complex<double> w = kI * (t * z);
  if (std::abs(z) < kSeriesThreshold) {
    // t * (e^w - 1)/w = t * sum_k w^k / (k+1)!
    std::complex<double> sum = 1.0;
    std::complex<double> term = 1.0;
    double fact = 1.0;
    for (int k = 1; k <= 3; ++k) {
      term *= w;
      fact *= k + 1;
      sum += term / fact;
    }
    return t * sum;
  }
  return (std::exp(w) - 1.0) / (kI * z);
}

std::complex<double> fourier_step(const IntervalCoefficients& coeffs,
                                  double z) {
  const auto& l = coeffs.breakpoints();
  const auto& u = coeffs.coefficients();
  std::complex<double> sum = 0.0;
  if (std::abs(z) < kSeriesThreshold) {
    // per piece, integral_a^b e^{-i x z} dx expanded in powers of z
    const std::complex<double> miz = -kI * z;
    for (int i = 0; i < coeffs.pieces(); ++i) {
      const double a = l[i], b = l[i + 1];
      std::complex<double> piece = 0.0;
      std::complex<double> term = 1.0;
      double fact = 1.0;
      double pa = a, pb = b;
      piece += (b - a);
      for (int k = 1; k <= 3; ++k) {
        term *= miz;
        fact *= k;
        pa *= a;
        pb *= b;
        piece += term * (pb - pa) / ((k + 1) * fact);
      }
      sum += u[i] * piece;
    }
    return sum;
  }
  for (int i = 0; i < coeffs.pieces(); ++i) {
    sum += u[i] * (std::exp(-kI * (l[i + 1] * z)) - std::exp(-kI * (l[i] * z)));
  }
  return sum / (-kI * z);
}

Eigen::MatrixXcd build_operator_matrix(const std::vector<double>& points,
                                       const std::vector<double>& weights,
                                       const IntervalCoefficients& coeffs,
                                       HurstParam h) {
  const int n = static_cast<int>(points.size());
  if (weights.size() != points.size()) {
    throw std::invalid_argument("points/weights size mismatch");
  }
  for (int k = 0; k < n; ++k) {
    if (points[k] == 0.0) {
      throw std::invalid_argument("frequency grid must exclude 0");
    }
  }
  const double half_h = 0.5 * h.value();
  std::vector<double> singular_weight(n);
  for (int k = 0; k < n; ++k) {
    singular_weight[k] =
        std::sqrt(weights[k]) * std::pow(std::abs(points[k]), -half_h);
  }
  Eigen::MatrixXcd m(n, n);
  const double inv_2pi = 1.0 / (2.0 * kPi);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      const std::complex<double> v = singular_weight[a] * singular_weight[b] *
                                     inv_2pi *
                                     fourier_step(coeffs, points[a] - points[b]);
      m(a, b) = v;
      m(b, a) = std::conj(v);
    }
  }
  // conjugate symmetry of fourier_step makes this exact up to rounding; a
  // violation indicates a quadrature bug
  double max_abs = 0.0, max_dev = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      max_abs = std::max(max_abs, std::abs(m(a, b)));
      max_dev = std::max(max_dev, std::abs(m(a, b) - std::conj(m(b, a))));
    }
  }
  if (max_dev > 1e-12 * std::max(max_abs, 1e-300)) {
    throw numerical_error("discretized operator not Hermitian: relative "
                          "deviation " +
                          std::to_string(max_dev / max_abs));
  }
  return m;
}

OperatorDiscretization discretize_operator(const IntervalCoefficients& coeffs,
                                           HurstParam h,
                                           const QuadratureSpec& quad) {
  if (quad.nodes < 16) throw std::invalid_argument("need at least 16 nodes");
  if (quad.nodes % 2 != 0) {
    throw std::invalid_argument("node count must be even");
  }
  if (!(quad.cutoff > 0.0)) {
    throw std::invalid_argument("frequency cutoff must be positive");
  }
  if (!(quad.grading >= 1.0)) {
    throw std::invalid_argument("grading exponent must be >= 1");
  }
  const int half = quad.nodes / 2;
  std::vector<double> x(quad.nodes), w(quad.nodes);
  // midpoint rule under the map u -> cutoff * u^grading; midpoints avoid
  // both the singularity at 0 and the boundary
  for (int k = 1; k <= half; ++k) {
    const double u = (k - 0.5) / half;
    const double node = quad.cutoff * std::pow(u, quad.grading);
    const double weight =
        quad.cutoff * quad.grading * std::pow(u, quad.grading - 1.0) / half;
    x[half + k - 1] = node;
    w[half + k - 1] = weight;
    x[half - k] = -node;
    w[half - k] = weight;
  }
  Eigen::MatrixXcd m = build_operator_matrix(x, w, coeffs, h);
  return OperatorDiscretization{h, quad, std::move(x), std::move(w),
                                std::move(m)};
}

namespace {

// eigenvalues sorted by descending modulus, unscaled
std::vector<double> raw_eigenvalues(const Eigen::MatrixXcd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("Hermitian eigensolver failed");
  }
  std::vector<double> lam(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + matrix.rows());
  std::sort(lam.begin(), lam.end(), [](double a, double b) {
    return std::abs(a) > std::abs(b);
  });
  return lam;
}

std::mutex calibration_mutex;

}  // namespace

double calibration_scale(HurstParam h, const QuadratureSpec& quad,
                         int truncation) {
  using Key = std::tuple<double, int, double, double, int>;
  static auto* cache = new std::map<Key, double>();
  const Key key{h.value(), quad.nodes, quad.cutoff, quad.grading, truncation};
  {
    std::lock_guard<std::mutex> lock(calibration_mutex);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
  }
  const auto reference = IntervalCoefficients::single_interval(1.0);
  const auto disc = discretize_operator(reference, h, quad);
  auto lam = raw_eigenvalues(disc.matrix);
  const int j_max = std::min<int>(truncation, static_cast<int>(lam.size()));
  double sum_sq = 0.0;
  for (int j = 0; j < j_max; ++j) sum_sq += lam[j] * lam[j];
  if (!(sum_sq > 0.0)) {
    throw numerical_error("calibration spectrum degenerate");
  }
  const double scale = std::sqrt(0.5 / sum_sq);
  std::lock_guard<std::mutex> lock(calibration_mutex);
  return cache->emplace(key, scale).first->second;
}

EigenSpectrum eigen_spectrum(const OperatorDiscretization& disc,
                             int truncation) {
  const int n = static_cast<int>(disc.matrix.rows());
  if (truncation < 1 || truncation > n) {
    throw std::invalid_argument(
        "truncation must be in [1, nodes], got " + std::to_string(truncation));
  }
  auto lam = raw_eigenvalues(disc.matrix);
  lam.resize(truncation);
  const double scale = calibration_scale(disc.h, disc.quad, truncation);
  double sum_sq = 0.0;
  for (double& v : lam) {
    v *= scale;
    sum_sq += v * v;
  }
  return EigenSpectrum{std::move(lam), truncation, scale, sum_sq, disc.h};
}

std::complex<double> char_function(const EigenSpectrum& spec, double p) {
  std::complex<double> product = 1.0;
  for (double lambda : spec.eigenvalues) {
    const double pl = p * lambda;
    product *= std::exp(-kI * pl) /
               std::sqrt(std::complex<double>(1.0, -2.0 * pl));
  }
  return product;
}

std::vector<double> sample_second_chaos(const EigenSpectrum& spec,
                                        std::uint64_t seed, int reps,
                                        int workers) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  std::vector<double> draws(reps);
  parallel_for(reps, workers, [&](int r) {
    GaussianStream gauss(derive_seed(seed, static_cast<std::uint64_t>(r)));
    double sum = 0.0;
    for (double lambda : spec.eigenvalues) {
      const double y = gauss.next();
      sum += lambda * (y * y - 1.0);
    }
    draws[r] = sum;
  });
  return draws;
}

namespace {

// log Chernoff bound on P(X > x) (side = +1) or P(X < -x) (side = -1),
// optimized over theta on a fixed grid inside the domain of the mgf
double log_tail_bound(const EigenSpectrum& spec, double x, int side) {
  double lambda_extreme = 0.0;
  for (double l : spec.eigenvalues) {
    if (side > 0) lambda_extreme = std::max(lambda_extreme, l);
    else lambda_extreme = std::max(lambda_extreme, -l);
  }
  // one-sided spectrum: the law is bounded on this side once all signs
  // oppose it; treat as zero tail
  if (lambda_extreme <= 0.0) return -INFINITY;
  const double theta_max = 1.0 / (2.0 * lambda_extreme);
  double best = INFINITY;
  for (int i = 1; i < 64; ++i) {
    const double theta = theta_max * i / 64.0;
    // log E e^{side * theta X} - theta x
    double log_mgf = 0.0;
    bool ok = true;
    for (double l : spec.eigenvalues) {
      const double a = 2.0 * side * theta * l;
      if (a >= 1.0) { ok = false; break; }
      log_mgf += -0.5 * std::log1p(-a) - side * theta * l;
    }
    if (!ok) continue;
    best = std::min(best, log_mgf - theta * x);
  }
  return best;
}

}  // namespace

double chaos_tail_bound(const EigenSpectrum& spec, double x) {
  return std::exp(log_tail_bound(spec, x, +1)) +
         std::exp(log_tail_bound(spec, x, -1));
}

DensityResult marginal_density(const EigenSpectrum& spec,
                               const std::vector<double>& x_grid) {
  const int n = static_cast<int>(x_grid.size());
  if (n < 3) throw std::invalid_argument("density grid too small");
  const double lo = x_grid.front(), hi = x_grid.back();
  if (std::abs(lo + hi) > 1e-9 * (hi - lo)) {
    throw std::invalid_argument("density grid must be symmetric about 0");
  }
  const double step = (hi - lo) / (n - 1);
  for (int i = 1; i < n; ++i) {
    if (std::abs(x_grid[i] - x_grid[i - 1] - step) > 1e-9 * step) {
      throw std::invalid_argument("density grid must be uniform");
    }
  }
  const double tail = chaos_tail_bound(spec, hi);
  if (!(tail < 1e-4)) {
    throw std::invalid_argument(
        "density grid too narrow: estimated tail mass " +
        std::to_string(tail) + " exceeds 1e-4");
  }

  // cutoff where the integrand modulus drops below 1e-10
  double cutoff = 1.0;
  while (std::abs(char_function(spec, cutoff)) > 1e-10 && cutoff < 1e7) {
    cutoff *= 2.0;
  }
  // resolve the e^{-ipx} oscillation at the widest x and keep the aliasing
  // period well outside the grid
  const double freq_step = std::min(kPi / (4.0 * hi), cutoff / 512.0);
  const int n_freq = static_cast<int>(std::ceil(cutoff / freq_step)) + 1;

  std::vector<std::complex<double>> phi(n_freq);
  for (int k = 0; k < n_freq; ++k) phi[k] = char_function(spec, k * freq_step);

  std::vector<double> density(n);
  for (int i = 0; i < n; ++i) {
    const double x = x_grid[i];
    // (1/pi) Re integral_0^P phi(p) e^{-ipx} dp, trapezoid
    double sum = 0.5 * phi[0].real();
    for (int k = 1; k + 1 < n_freq; ++k) {
      const double px = k * freq_step * x;
      sum += phi[k].real() * std::cos(px) + phi[k].imag() * std::sin(px);
    }
    const double px = (n_freq - 1) * freq_step * x;
    sum += 0.5 * (phi[n_freq - 1].real() * std::cos(px) +
                  phi[n_freq - 1].imag() * std::sin(px));
    density[i] = sum * freq_step / kPi;
  }
  double min_density = 0.0;
  for (double d : density) min_density = std::min(min_density, d);
  if (min_density < -1e-3) {
    throw numerical_error("density inversion produced dip " +
                          std::to_string(min_density) +
                          "; inversion parameters inadequate");
  }
  return DensityResult{x_grid, std::move(density),
                       (n_freq - 1) * freq_step, freq_step};
}

LowerBoundReport verify_lower_bound(const EigenSpectrum& spec,
                                    const IntervalCoefficients& coeffs,
                                    HurstParam h) {
  LowerBoundReport report;
  report.max_weighted_term = coeffs.max_weighted_length(h);
  const int j_max = std::max(1, spec.truncation / 2);
  std::vector<double> sigma;
  sigma.reserve(spec.eigenvalues.size());
  for (double l : spec.eigenvalues) {
    sigma.push_back(std::abs(l));
    if (l < 0.0) ++report.negative_eigenvalues;
  }
  std::sort(sigma.rbegin(), sigma.rend());
  report.ratios.resize(j_max);
  double fitted = INFINITY;
  for (int j = 1; j <= j_max; ++j) {
    const double rhs = report.max_weighted_term *
                       std::pow(static_cast<double>(j), -h.value());
    report.ratios[j - 1] = sigma[j - 1] / rhs;
    fitted = std::min(fitted, report.ratios[j - 1]);
  }
  report.fitted_constant = fitted;
  double window_min = INFINITY, window_max = 0.0;
  for (int j = 10; j <= j_max; ++j) {
    const double r = sigma[j - 1] * std::pow(static_cast<double>(j), h.value()) /
                     report.max_weighted_term;
    window_min = std::min(window_min, r);
    window_max = std::max(window_max, r);
  }
  if (j_max < 10) {
    window_min = 0.0;
    window_max = 0.0;
  }
  report.window_min_ratio = window_min;
  report.window_max_ratio = window_max;
  report.pass = report.fitted_constant > 0.0;
  return report;
}

}  // namespace rblab
