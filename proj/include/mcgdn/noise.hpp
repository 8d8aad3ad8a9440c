#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcgdn/signal.hpp"

namespace mcgdn {

struct NoiseSpec {
  double psd_white = 1e-18;  // V^2/Hz, one-sided
  double beta = 0.5;         // exponent applied to the spectral amplitude
  double f_knee = 250.0;     // Hz
  double noise_gain = 1.0;   // scale applied before adding to the ECG
  std::uint64_t seed = 0;

  void validate() const;
};

/// i.i.d. N(0, psd_white * fs / 2) samples, flat one-sided PSD at psd_white.
SampledSignal gaussian_white(std::size_t length, double sample_rate, double psd_white,
                             std::uint64_t seed);

/// 1 at f == 0, (f_knee / f)^beta on (0, f_knee], 1 above the knee.
double transfer_gain(double f, double beta, double f_knee);

/// Gain for every DFT bin of an L-point transform: bin k <-> k fs / L for
/// k <= L/2, mirrored above.
std::vector<double> bin_gains(std::size_t length, double sample_rate, double beta, double f_knee);

/// Multiplies the DFT of `white` by the transfer gain, forces Hermitian
/// symmetry and returns the inverse transform. Throws if the inverse carries
/// an imaginary residue above 1e-12 of the input RMS.
SampledSignal shape_noise(const SampledSignal &white, const NoiseSpec &spec);

/// Expected variance of shape_noise(gaussian_white(...)) before noise_gain,
/// from Parseval: sigma^2 * mean_k gain_k^2.
double expected_shaped_variance(std::size_t length, double sample_rate, const NoiseSpec &spec);

/// Seed of realization `realization` for the ECG cycle `cycle_id`.
std::uint64_t realization_seed(std::uint64_t base_seed, std::string_view cycle_id,
                               std::uint64_t realization);

McgCycle synthesize_mcg(const EcgCycle &ecg, const NoiseSpec &spec);

/// Emits `realizations` MCG cycles per ECG cycle, cycle-major order.
std::vector<McgCycle> generate_dataset(std::span<const EcgCycle> ecgs, const NoiseSpec &spec,
                                       std::size_t realizations);

/// noise_gain that makes the shaped-noise RMS equal `rms_ratio` times the
/// pooled RMS of the ECG cycles. Deterministic: uses the expected noise
/// variance rather than a sampled one.
double calibrate_noise_gain(std::span<const EcgCycle> ecgs, const NoiseSpec &spec,
                            double rms_ratio);

}  // namespace mcgdn
