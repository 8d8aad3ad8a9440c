#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcgdn/signal.hpp"

namespace mcgdn {

struct PsdParams {
  std::size_t segment_length = 512;
  double overlap = 0.5;  // fraction of segment_length shared by neighbours
};

/// One-sided power spectral density on DC..Nyquist.
struct PsdEstimate {
  std::vector<double> frequencies;  // Hz
  std::vector<double> density;      // unit^2 / Hz
  double sample_rate = 0.0;
  std::size_t segment_length = 0;
  std::string window = "hann";
  double overlap = 0.0;
  std::size_t segments_averaged = 0;

  double bin_width() const { return sample_rate / static_cast<double>(segment_length); }
};

/// Welch estimate: periodic Hann window, per-segment mean removal, averaged
/// periodograms scaled by 1 / (fs * sum w^2) and doubled on every bin above
/// DC, Nyquist included, so each bin estimates the one-sided density and
/// sum(density) * df approximates the signal variance. Throws SignalTooShort
/// unless length >= segment_length >= 8.
PsdEstimate psd_estimate(const SampledSignal &signal, const PsdParams &params = {});

/// output[i] - truth[i + label_offset] over the whole output. Throws
/// LengthMismatch if the truth does not cover exactly the output's span.
SampledSignal residual_noise(const SampledSignal &output, const EcgCycle &truth, std::size_t label_offset);

struct OutputTruthPair {
  const SampledSignal *output;
  const EcgCycle *truth;
};

/// Bin-wise mean of the residual PSDs, accumulated in input order.
PsdEstimate averaged_noise_psd(std::span<const OutputTruthPair> pairs, std::size_t label_offset,
                               const PsdParams &params = {});

/// Bin-wise mean of already computed estimates on a shared grid.
PsdEstimate average_psds(std::span<const PsdEstimate> estimates);

struct NoiseRatioCurve {
  std::vector<double> normalized_frequency;  // f / fs
  std::vector<std::optional<double>> ratio;  // empty where the denominator is 0
};

/// pred / ma per bin. Throws GridMismatch unless the grids are identical.
NoiseRatioCurve noise_ratio(const PsdEstimate &pred_psd, const PsdEstimate &ma_psd);

/// Mean of the defined ratio bins with lo <= f/fs <= hi. Throws EmptyBand.
double band_mean(const NoiseRatioCurve &curve, double lo, double hi);

/// Least-squares slope of log(density) over log(f) for f in [f_lo, f_hi].
/// Throws InsufficientBins (< 4 bins) or NonpositiveDensity.
double loglog_slope(const PsdEstimate &psd, double f_lo, double f_hi);

/// CSV with header "f_norm,psd".
void write_psd_csv(const std::filesystem::path &path, const PsdEstimate &psd);
/// CSV with header "f_norm,ratio"; undefined bins are written as empty fields.
void write_ratio_csv(const std::filesystem::path &path, const NoiseRatioCurve &curve);

}  // namespace mcgdn
