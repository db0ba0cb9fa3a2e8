#include "rblab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace rblab {

namespace {

// FFTW planning is not thread-safe; execution via fftw_execute_dft on
// distinct arrays is. Plans are created once per size with FFTW_UNALIGNED
// so they apply to any buffer.
std::mutex plan_mutex;
std::unordered_map<std::size_t, fftw_plan>& plan_cache() {
  static auto* cache = new std::unordered_map<std::size_t, fftw_plan>();
  return *cache;
}

fftw_plan plan_for(std::size_t n) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> scratch(n);
  fftw_plan p = fftw_plan_dft_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch.data()),
      reinterpret_cast<fftw_complex*>(scratch.data()), FFTW_FORWARD,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw std::runtime_error("FFTW plan creation failed");
  cache.emplace(n, p);
  return p;
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) {
  if (data.empty()) return;
  fftw_plan p = plan_for(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);
}

}  // namespace rblab
