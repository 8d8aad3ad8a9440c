#include "mcgdn/noise.hpp"

#include <cmath>
#include <complex>

#include "mcgdn/error.hpp"
#include "mcgdn/fft.hpp"
#include "mcgdn/rng.hpp"

namespace mcgdn {

void NoiseSpec::validate() const {
  if (!(psd_white >= 0.0) || !(f_knee > 0.0) || !(beta >= 0.0) || !(noise_gain >= 0.0)) {
    fail(ErrorKind::InvalidArgument,
         "noise spec requires psd_white >= 0, f_knee > 0, beta >= 0, noise_gain >= 0");
  }
}

SampledSignal gaussian_white(std::size_t length, double sample_rate, double psd_white,
                             std::uint64_t seed) {
  if (length == 0) fail(ErrorKind::BadLength, "gaussian_white: length must be >= 1");
  if (!(psd_white >= 0.0)) fail(ErrorKind::InvalidArgument, "psd_white must be >= 0");
  if (!(sample_rate > 0.0)) fail(ErrorKind::InvalidArgument, "sample rate must be > 0");
  std::vector<double> out(length, 0.0);
  if (psd_white > 0.0) {
    const double sigma = std::sqrt(psd_white * sample_rate / 2.0);
    Rng rng(seed);
    for (double &v : out) v = sigma * rng.normal();
  }
  return SampledSignal(std::move(out), sample_rate, AmplitudeUnit::Volts);
}

double transfer_gain(double f, double beta, double f_knee) {
  if (!(f >= 0.0)) fail(ErrorKind::InvalidArgument, "transfer_gain: f must be >= 0");
  if (f == 0.0 || f > f_knee) return 1.0;
  return std::pow(f_knee / f, beta);
}

std::vector<double> bin_gains(std::size_t length, double sample_rate, double beta, double f_knee) {
  std::vector<double> gains(length, 1.0);
  const double df = sample_rate / static_cast<double>(length);
  for (std::size_t k = 1; k <= length / 2; ++k) {
    double g = transfer_gain(static_cast<double>(k) * df, beta, f_knee);
    gains[k] = g;
    gains[length - k] = g;
  }
  return gains;
}

SampledSignal shape_noise(const SampledSignal &white, const NoiseSpec &spec) {
  spec.validate();
  const std::size_t n = white.size();
  if (n < 2) fail(ErrorKind::BadLength, "shape_noise needs >= 2 samples");

  std::vector<std::complex<double>> x(white.samples().begin(), white.samples().end());
  auto spectrum = fft::forward(x);
  const auto gains = bin_gains(n, white.sample_rate(), spec.beta, spec.f_knee);

  spectrum[0] = {spectrum[0].real(), 0.0};
  for (std::size_t k = 1; k < n - k; ++k) {
    std::complex<double> v = spectrum[k] * gains[k];
    spectrum[k] = v;
    spectrum[n - k] = std::conj(v);
  }
  if (n % 2 == 0) {
    spectrum[n / 2] = {spectrum[n / 2].real() * gains[n / 2], 0.0};
  }

  auto time = fft::inverse(spectrum);
  std::vector<double> out(n);
  double max_imag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = time[i].real();
    max_imag = std::max(max_imag, std::abs(time[i].imag()));
  }
  const double scale = rms(white.samples());
  if (max_imag > 1e-12 * std::max(scale, 1e-300)) {
    fail(ErrorKind::InvalidArgument, "shape_noise: inverse transform is not real");
  }
  return SampledSignal(std::move(out), white.sample_rate(), white.unit());
}

double expected_shaped_variance(std::size_t length, double sample_rate, const NoiseSpec &spec) {
  const auto gains = bin_gains(length, sample_rate, spec.beta, spec.f_knee);
  double acc = 0.0;
  for (double g : gains) acc += g * g;
  const double sigma2 = spec.psd_white * sample_rate / 2.0;
  return sigma2 * acc / static_cast<double>(length);
}

std::uint64_t realization_seed(std::uint64_t base_seed, std::string_view cycle_id,
                               std::uint64_t realization) {
  return derive_seed(base_seed, cycle_id, realization);
}

McgCycle synthesize_mcg(const EcgCycle &ecg, const NoiseSpec &spec) {
  spec.validate();
  const auto &sig = ecg.signal;
  std::vector<double> samples(sig.samples().begin(), sig.samples().end());
  if (spec.noise_gain != 0.0) {
    auto white = gaussian_white(sig.size(), sig.sample_rate(), spec.psd_white, spec.seed);
    auto shaped = shape_noise(white, spec);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += spec.noise_gain * shaped[i];
  }
  return McgCycle{SampledSignal(std::move(samples), sig.sample_rate(), sig.unit()), ecg.source_id,
                  0, spec.seed};
}

std::vector<McgCycle> generate_dataset(std::span<const EcgCycle> ecgs, const NoiseSpec &spec,
                                       std::size_t realizations) {
  if (realizations == 0) fail(ErrorKind::InvalidArgument, "realizations must be >= 1");
  std::vector<McgCycle> out;
  out.reserve(ecgs.size() * realizations);
  for (const auto &ecg : ecgs) {
    for (std::size_t r = 0; r < realizations; ++r) {
      NoiseSpec per_cycle = spec;
      per_cycle.seed = realization_seed(spec.seed, ecg.source_id, r);
      McgCycle mcg = synthesize_mcg(ecg, per_cycle);
      mcg.realization = r;
      out.push_back(std::move(mcg));
    }
  }
  return out;
}

double calibrate_noise_gain(std::span<const EcgCycle> ecgs, const NoiseSpec &spec,
                            double rms_ratio) {
  if (ecgs.empty()) fail(ErrorKind::InvalidArgument, "calibrate_noise_gain: no cycles");
  double power = 0.0;
  std::size_t count = 0;
  for (const auto &e : ecgs) {
    for (double v : e.signal.samples()) power += v * v;
    count += e.signal.size();
  }
  const double ecg_rms = std::sqrt(power / static_cast<double>(count));
  const auto &first = ecgs.front().signal;
  const double noise_var = expected_shaped_variance(first.size(), first.sample_rate(), spec);
  if (!(noise_var > 0.0)) return 0.0;
  return rms_ratio * ecg_rms / std::sqrt(noise_var);
}

}  // namespace mcgdn
