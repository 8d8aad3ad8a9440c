#include "mcgdn/signal.hpp"

#include <cmath>

#include "mcgdn/error.hpp"

namespace mcgdn {

SampledSignal::SampledSignal(std::vector<double> samples, double sample_rate, AmplitudeUnit unit)
    : samples_(std::move(samples)), sample_rate_(sample_rate), unit_(unit) {
  if (samples_.empty()) fail(ErrorKind::BadLength, "signal must hold at least one sample");
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    fail(ErrorKind::InvalidArgument, "sample rate must be positive and finite");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      fail(ErrorKind::InvalidArgument, "non-finite sample at index " + std::to_string(i));
    }
  }
}

std::vector<double> strip_padding(std::span<const double> raw) {
  if (raw.empty()) fail(ErrorKind::BadLength, "strip_padding: empty input");
  std::size_t end = raw.size();
  while (end > 0 && raw[end - 1] == 0.0) --end;
  if (end == 0) fail(ErrorKind::AllZeroSignal, "every sample is zero");
  return {raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(end)};
}

SampledSignal resample(const SampledSignal &signal, std::size_t target_len, double target_rate) {
  const std::size_t n = signal.size();
  if (n < 2 || target_len < 2) {
    fail(ErrorKind::BadLength, "resample needs >= 2 input and output samples (got " +
                                   std::to_string(n) + " -> " + std::to_string(target_len) + ")");
  }
  auto in = signal.samples();
  if (target_len == n) {
    return SampledSignal({in.begin(), in.end()}, target_rate, signal.unit());
  }
  std::vector<double> out(target_len);
  const double span = static_cast<double>(n - 1);
  const double denom = static_cast<double>(target_len - 1);
  for (std::size_t j = 0; j < target_len; ++j) {
    double pos = static_cast<double>(j) * span / denom;
    auto left = static_cast<std::size_t>(pos);
    if (left >= n - 1) {
      out[j] = in[n - 1];
      continue;
    }
    double frac = pos - static_cast<double>(left);
    out[j] = (1.0 - frac) * in[left] + frac * in[left + 1];
  }
  return SampledSignal(std::move(out), target_rate, signal.unit());
}

SampledSignal moving_average(const SampledSignal &signal, std::size_t window) {
  if (window == 0) fail(ErrorKind::InvalidArgument, "moving_average window must be >= 1");
  const std::size_t n = signal.size();
  if (window > n) {
    fail(ErrorKind::WindowTooLarge,
         "window " + std::to_string(window) + " exceeds signal length " + std::to_string(n));
  }
  auto x = signal.samples();
  std::vector<double> out(n - window + 1);
  // Running sum with Neumaier compensation so long signals stay within a few
  // ulps of the direct window sum.
  double sum = 0.0;
  double comp = 0.0;
  auto add = [&](double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  };
  for (std::size_t i = 0; i < window; ++i) add(x[i]);
  const double inv = 1.0 / static_cast<double>(window);
  out[0] = (sum + comp) * inv;
  for (std::size_t i = 1; i < out.size(); ++i) {
    add(x[i + window - 1]);
    add(-x[i - 1]);
    out[i] = (sum + comp) * inv;
  }
  return SampledSignal(std::move(out), signal.sample_rate(), signal.unit());
}

EcgCycle precondition_cycle(std::span<const double> raw, double source_rate, std::string source_id,
                            std::size_t cycle_length, double target_rate) {
  SampledSignal stripped(strip_padding(raw), source_rate);
  return EcgCycle{resample(stripped, cycle_length, target_rate), std::move(source_id)};
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace mcgdn
