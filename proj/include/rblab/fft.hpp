#pragma once

#include <complex>
#include <vector>

namespace rblab {

// In-place unnormalized complex DFT, forward sign convention
// X_k = sum_j x_j e^{-2 pi i jk / n}. Thread-safe; plans are cached per size.
void fft_forward(std::vector<std::complex<double>>& data);

}  // namespace rblab
