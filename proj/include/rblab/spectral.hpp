#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

#include "rblab/process_model.hpp"

namespace rblab {

/// Step function g(x) = sum_i u_i 1_{[l_i, l_{i+1}]}(x): m+1 strictly
/// increasing breakpoints l_1 < ... < l_{m+1} with l_1 >= 0, and m
/// coefficients, not all zero.
class IntervalCoefficients {
 public:
  IntervalCoefficients(std::vector<double> breakpoints,
                       std::vector<double> coefficients);

  static IntervalCoefficients single_interval(double t, double u = 1.0);

  int pieces() const { return static_cast<int>(coefficients_.size()); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& coefficients() const { return coefficients_; }

  /// integral of g = sum u_i (l_{i+1} - l_i); the z -> 0 limit of the
  /// Fourier transform
  double total_mass() const;

  /// max_i |u_i| |l_{i+1} - l_i|^H, the scale entering the eigenvalue
  /// lower bound
  double max_weighted_length(HurstParam h) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> coefficients_;
};

/// Quadrature knobs for the frequency-domain discretization: a symmetric
/// graded grid x = +/- cutoff * u^grading on (0, cutoff], 0 excluded.
struct QuadratureSpec {
  int nodes = 2000;       // total (even); half on each side of 0
  double cutoff = 400.0;  // Omega
  double grading = 3.0;   // gamma > 1, denser near the singularity at 0
};

/// Nystrom discretization of the second-chaos operator in frequency
/// variables: M[k][j] = sqrt(w_k w_j) |x_k|^{-H/2} ghat(x_k - x_j)
/// |x_j|^{-H/2} / (2 pi), Hermitian by conjugate symmetry of ghat.
struct OperatorDiscretization {
  HurstParam h;
  QuadratureSpec quad;
  std::vector<double> freq_points;  // ascending, symmetric about 0, no 0
  std::vector<double> weights;
  Eigen::MatrixXcd matrix;
};

/// Truncated eigenvalue sequence of the discretized operator, sorted by
/// descending |lambda| and multiplied by the per-H calibration constant.
struct EigenSpectrum {
  std::vector<double> eigenvalues;
  int truncation = 0;
  double calibration = 1.0;  // multiplicative scale applied
  double sum_sq = 0.0;       // sum of calibrated lambda_j^2, j <= truncation
  HurstParam h;
};

/// Hilbert-Schmidt kernel (e^{i t (x+y)} - 1) / (i (x+y)); series expansion
/// near x + y = 0 with limit t.
std::complex<double> kernel_Ht(double x, double y, double t);

/// Fourier transform of the step function,
/// ghat(z) = sum_i u_i (e^{-i l_{i+1} z} - e^{-i l_i z}) / (-i z);
/// series expansion near z = 0 with limit total_mass().
std::complex<double> fourier_step(const IntervalCoefficients& coeffs,
                                  double z);

/// Assemble the Hermitian Nystrom matrix on the given nodes/weights.
/// Exposed separately so alternative grids (or permuted ones) can be fed
/// through the same kernel.
Eigen::MatrixXcd build_operator_matrix(const std::vector<double>& points,
                                       const std::vector<double>& weights,
                                       const IntervalCoefficients& coeffs,
                                       HurstParam h);

OperatorDiscretization discretize_operator(const IntervalCoefficients& coeffs,
                                           HurstParam h,
                                           const QuadratureSpec& quad = {});

/// Calibration constant for (h, quad, truncation): the single scale fixed by
/// requiring the single-interval spectrum at t = 1 to satisfy
/// sum lambda_j^2 = 1/2 (from E X_1^2 = 1 and Var = 2 sum lambda^2). Cached.
double calibration_scale(HurstParam h, const QuadratureSpec& quad,
                         int truncation);

/// The truncation largest-|lambda| eigenvalues, calibrated.
EigenSpectrum eigen_spectrum(const OperatorDiscretization& disc,
                             int truncation);

/// E e^{i p X} = prod_j e^{-i p lambda_j} (1 - 2 i p lambda_j)^{-1/2} over
/// the truncated spectrum.
std::complex<double> char_function(const EigenSpectrum& spec, double p);

/// Independent draws of sum_j lambda_j (Y_j^2 - 1); replication r uses the
/// sub-stream derive_seed(seed, r), so results do not depend on workers.
std::vector<double> sample_second_chaos(const EigenSpectrum& spec,
                                        std::uint64_t seed, int reps,
                                        int workers = 1);

/// Chernoff bound on the two-sided tail mass P(|X| > x) of the truncated
/// second-chaos law; used to size density grids.
double chaos_tail_bound(const EigenSpectrum& spec, double x);

struct DensityResult {
  std::vector<double> x;
  std::vector<double> density;
  double freq_cutoff = 0.0;  // inversion integral truncated where
  double freq_step = 0.0;    // trapezoid spacing used
};

/// Density of the second-chaos law by trapezoid Fourier inversion of
/// char_function. The grid must be symmetric, uniform and wide enough that
/// the Chernoff-estimated tail mass outside it is below 1e-4.
DensityResult marginal_density(const EigenSpectrum& spec,
                               const std::vector<double>& x_grid);

struct LowerBoundReport {
  double fitted_constant = 0.0;   // largest c with sigma_j >= c * rhs_j
  double max_weighted_term = 0.0; // max_i |u_i| |dl_i|^H
  double window_min_ratio = 0.0;  // min of sigma_j j^H / max_weighted_term
  double window_max_ratio = 0.0;  // ... over j in [10, J/2]
  int negative_eigenvalues = 0;   // sign census of the truncated spectrum
  bool pass = false;              // fitted_constant > 0
  std::vector<double> ratios;     // sigma_j / rhs_j for j = 1 .. J/2
};

/// Check the decay bound sigma_j >= c * max_i{|u_i| |dl_i|^H} * j^{-H} on
/// singular values sigma_j = |lambda|_(j) sorted descending, j <= J/2.
LowerBoundReport verify_lower_bound(const EigenSpectrum& spec,
                                    const IntervalCoefficients& coeffs,
                                    HurstParam h);

}  // namespace rblab
