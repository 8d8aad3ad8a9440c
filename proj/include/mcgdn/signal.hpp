#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mcgdn {

enum class AmplitudeUnit { Normalized, Volts };

/// Uniformly sampled real time series. The constructor enforces the
/// invariants: at least one sample, every sample finite, rate > 0.
class SampledSignal {
public:
  SampledSignal(std::vector<double> samples, double sample_rate,
                AmplitudeUnit unit = AmplitudeUnit::Normalized);

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  double sample_rate() const noexcept { return sample_rate_; }
  AmplitudeUnit unit() const noexcept { return unit_; }

  friend bool operator==(const SampledSignal &, const SampledSignal &) = default;

private:
  std::vector<double> samples_;
  double sample_rate_;
  AmplitudeUnit unit_;
};

struct EcgCycle {
  SampledSignal signal;
  std::string source_id;
};

struct McgCycle {
  SampledSignal signal;
  std::string ecg_ref;
  std::uint64_t realization = 0;
  std::uint64_t noise_seed = 0;

  friend bool operator==(const McgCycle &, const McgCycle &) = default;
};

inline constexpr std::size_t kDefaultCycleLength = 3008;
inline constexpr double kDefaultSampleRate = 2000.0;
inline constexpr double kSourceSampleRate = 125.0;

/// Removes the maximal run of exact trailing zeros. Throws AllZeroSignal when
/// nothing would remain.
std::vector<double> strip_padding(std::span<const double> raw);

/// Linear interpolation on the normalized index axis: output sample j sits at
/// input position j * (n - 1) / (target_len - 1), so both ends are kept.
SampledSignal resample(const SampledSignal &signal, std::size_t target_len, double target_rate);

/// Trailing-window mean: out[i] = mean(x[i .. i + window - 1]), length
/// L - window + 1. Output index i is aligned with input index i + window - 1.
SampledSignal moving_average(const SampledSignal &signal, std::size_t window);

/// strip_padding followed by resample to a fixed length and rate.
EcgCycle precondition_cycle(std::span<const double> raw, double source_rate, std::string source_id,
                            std::size_t cycle_length = kDefaultCycleLength,
                            double target_rate = kDefaultSampleRate);

double rms(std::span<const double> x);

}  // namespace mcgdn
