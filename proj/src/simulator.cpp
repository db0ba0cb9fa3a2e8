#include "rblab/simulator.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "rblab/errors.hpp"
#include "rblab/fft.hpp"

namespace rblab {

double fgn_correlation(long lag, double hurst_prime) {
  const double k = std::abs(static_cast<double>(lag));
  const double e = 2.0 * hurst_prime;
  return 0.5 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) +
                std::pow(std::abs(k - 1.0), e));
}

namespace {

// Precomputed circulant spectral amplitudes for one (n, autocov). Building
// this is the O(N log N) part; sampling from it costs one FFT plus the
// Gaussian draws, so ensembles over seeds share an instance via the cache
// below.
class CirculantSampler {
 public:
  CirculantSampler(const std::vector<double>& autocov, int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("sequence length must be >= 1");
    if (static_cast<int>(autocov.size()) < n) {
      throw std::invalid_argument("autocovariance shorter than sequence");
    }
    if (n == 1) return;  // single marginal draw, no embedding needed
    m_ = 2 * (n - 1);
    std::vector<std::complex<double>> c(m_);
    for (int k = 0; k < n; ++k) c[k] = autocov[k];
    for (int k = n; k < m_; ++k) c[k] = autocov[m_ - k];
    fft_forward(c);
    amplitude_.resize(m_);
    double max_eig = 0.0;
    for (int k = 0; k < m_; ++k) max_eig = std::max(max_eig, c[k].real());
    const double tol = 1e-9 * std::max(max_eig, 1.0);
    for (int k = 0; k < m_; ++k) {
      double eig = c[k].real();
      if (eig < -tol) {
        throw numerical_error(
            "circulant embedding: negative spectral coefficient " +
            std::to_string(eig) + " at index " + std::to_string(k));
      }
      amplitude_[k] = std::sqrt(std::max(eig, 0.0));
    }
  }

  std::vector<double> sample(GaussianStream& gauss) const {
    if (n_ == 1) return {gauss.next()};
    std::vector<std::complex<double>> v(m_);
    v[0] = amplitude_[0] * gauss.next();
    v[m_ / 2] = amplitude_[m_ / 2] * gauss.next();
    const double half = std::sqrt(0.5);
    for (int k = 1; k < m_ / 2; ++k) {
      const double a = gauss.next();
      const double b = gauss.next();
      v[k] = amplitude_[k] * half * std::complex<double>(a, b);
      v[m_ - k] = std::conj(v[k]);
    }
    fft_forward(v);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = v[i].real() * scale;
    return x;
  }

 private:
  int n_;
  int m_ = 0;
  std::vector<double> amplitude_;
};

std::mutex cache_mutex;

std::shared_ptr<const CirculantSampler> fgn_sampler(int n, double hp) {
  static auto* cache =
      new std::map<std::pair<int, double>,
                   std::shared_ptr<const CirculantSampler>>();
  const auto key = std::make_pair(n, hp);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
  }
  std::vector<double> autocov(n);
  for (int k = 0; k < n; ++k) autocov[k] = fgn_correlation(k, hp);
  auto sampler = std::make_shared<const CirculantSampler>(autocov, n);
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache->emplace(key, std::move(sampler)).first->second;
}

double partial_sum_variance_cached(int n, double h) {
  static auto* cache = new std::map<std::pair<int, double>, double>();
  const auto key = std::make_pair(n, h);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
  }
  const double hp = 0.5 * (h + 1.0);
  // sum over lags of (N - |k|) * 2 rho(k)^2, scaled by N^{-2H}
  double sum = n * 2.0;  // lag 0: rho = 1, Var(H_2) = 2
  for (int k = 1; k < n; ++k) {
    const double rho = fgn_correlation(k, hp);
    sum += 2.0 * (n - k) * 2.0 * rho * rho;
  }
  const double v = sum * std::pow(static_cast<double>(n), -2.0 * h);
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache->emplace(key, v).first->second;
}

}  // namespace

std::vector<double> circulant_embedding_sample(
    const std::vector<double>& autocov, int n, GaussianStream& gauss) {
  CirculantSampler sampler(autocov, n);
  return sampler.sample(gauss);
}

LrdGaussianSequence generate_lrd_gaussian(int n, HurstParam h,
                                          std::uint64_t seed) {
  const double hp = 0.5 * (h.value() + 1.0);
  auto sampler = fgn_sampler(n, hp);
  GaussianStream gauss(seed);
  return LrdGaussianSequence{sampler->sample(gauss), h, seed};
}

double exact_partial_sum_variance(int n, HurstParam h) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return partial_sum_variance_cached(n, h.value());
}

ProcessPath simulate_rosenblatt(const SimulationConfig& config) {
  if (config.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (config.oversample < 1) {
    throw std::invalid_argument("oversample must be >= 1");
  }
  const TimeGrid grid(config.horizon, config.n_steps);
  const int n_fine = config.n_steps * config.oversample;
  const double h = config.h.value();

  auto xi = generate_lrd_gaussian(n_fine, config.h, config.seed);

  double prefactor = std::pow(config.horizon, h) /
                     std::pow(static_cast<double>(n_fine), h);
  if (config.normalization == Normalization::kExactVariance) {
    prefactor /= std::sqrt(partial_sum_variance_cached(n_fine, h));
  }

  std::vector<double> values(config.n_steps + 1, 0.0);
  double acc = 0.0;
  for (int i = 1; i <= config.n_steps; ++i) {
    const int hi = i * config.oversample;
    for (int j = (i - 1) * config.oversample; j < hi; ++j) {
      const double x = xi.values[j];
      acc += x * x - 1.0;  // H_2(xi_j)
    }
    values[i] = prefactor * acc;
  }
  return ProcessPath{grid, std::move(values), config.h, config.seed};
}

std::pair<ProcessPath, ProcessPath> simulate_independent_pair(
    const TimeGrid& grid, HurstParam h1, HurstParam h2,
    std::uint64_t master_seed, int oversample) {
  SimulationConfig c1{grid.steps(), oversample, grid.horizon(), h1,
                      derive_seed(master_seed, 1)};
  SimulationConfig c2{grid.steps(), oversample, grid.horizon(), h2,
                      derive_seed(master_seed, 2)};
  return {simulate_rosenblatt(c1), simulate_rosenblatt(c2)};
}

}  // namespace rblab
