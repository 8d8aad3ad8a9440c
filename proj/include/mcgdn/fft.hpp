#pragma once

#include <complex>
#include <span>
#include <vector>

namespace mcgdn::fft {

// Thin wrappers over FFTW. Plans are cached per (size, direction) behind a
// mutex; execution copies through plan-owned buffers so any span works.

/// Unnormalized forward DFT: X[k] = sum_n x[n] e^{-2 pi i k n / L}.
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x);

/// Inverse DFT including the 1/L factor.
std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> spectrum);

/// Forward DFT of a real sequence, bins 0..L/2.
std::vector<std::complex<double>> forward_real(std::span<const double> x);

}  // namespace mcgdn::fft
