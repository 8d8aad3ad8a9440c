#include "mcgdn/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "mcgdn/error.hpp"
#include "mcgdn/fft.hpp"

namespace mcgdn {

PsdEstimate psd_estimate(const SampledSignal &signal, const PsdParams &params) {
  const std::size_t seg = params.segment_length;
  if (seg < 8 || signal.size() < seg) {
    fail(ErrorKind::SignalTooShort, "PSD needs length >= segment_length >= 8 (length " +
                                        std::to_string(signal.size()) + ", segment " + std::to_string(seg) + ")");
  }
  if (!(params.overlap >= 0.0 && params.overlap < 1.0)) {
    fail(ErrorKind::InvalidArgument, "overlap must lie in [0, 1)");
  }
  const auto hop = std::max<std::size_t>(
      1, seg - static_cast<std::size_t>(std::llround(params.overlap * static_cast<double>(seg))));

  std::vector<double> window(seg);
  double window_power = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg));
    window_power += window[i] * window[i];
  }

  const std::size_t bins = seg / 2 + 1;
  const double fs = signal.sample_rate();
  PsdEstimate est;
  est.sample_rate = fs;
  est.segment_length = seg;
  est.overlap = params.overlap;
  est.frequencies.resize(bins);
  est.density.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) est.frequencies[k] = static_cast<double>(k) * fs / static_cast<double>(seg);

  auto x = signal.samples();
  std::vector<double> buf(seg);
  std::size_t count = 0;
  for (std::size_t start = 0; start + seg <= x.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < seg; ++i) mean += x[start + i];
    mean /= static_cast<double>(seg);
    for (std::size_t i = 0; i < seg; ++i) buf[i] = (x[start + i] - mean) * window[i];
    auto spectrum = fft::forward_real(buf);
    for (std::size_t k = 0; k < bins; ++k) est.density[k] += std::norm(spectrum[k]);
    ++count;
  }
  const double scale = 1.0 / (fs * window_power * static_cast<double>(count));
  for (std::size_t k = 0; k < bins; ++k) {
    est.density[k] *= scale * (k == 0 ? 1.0 : 2.0);
  }
  est.segments_averaged = count;
  return est;
}

SampledSignal residual_noise(const SampledSignal &output, const EcgCycle &truth, std::size_t label_offset) {
  const std::size_t n = output.size();
  const std::size_t truth_len = truth.signal.size();
  if (label_offset > truth_len || truth_len - label_offset < n) {
    fail(ErrorKind::LengthMismatch, "output of " + std::to_string(n) + " samples at offset " +
                                        std::to_string(label_offset) + " overruns truth of " +
                                        std::to_string(truth_len));
  }
  auto out = output.samples();
  auto ref = truth.signal.samples();
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = out[i] - ref[i + label_offset];
  return SampledSignal(std::move(residual), output.sample_rate(), output.unit());
}

PsdEstimate average_psds(std::span<const PsdEstimate> estimates) {
  if (estimates.empty()) fail(ErrorKind::InvalidArgument, "nothing to average");
  PsdEstimate mean = estimates.front();
  for (std::size_t e = 1; e < estimates.size(); ++e) {
    if (estimates[e].frequencies != mean.frequencies) fail(ErrorKind::GridMismatch, "PSD grids differ");
    for (std::size_t k = 0; k < mean.density.size(); ++k) mean.density[k] += estimates[e].density[k];
    mean.segments_averaged += estimates[e].segments_averaged;
  }
  const double inv = 1.0 / static_cast<double>(estimates.size());
  for (double &d : mean.density) d *= inv;
  return mean;
}

PsdEstimate averaged_noise_psd(std::span<const OutputTruthPair> pairs, std::size_t label_offset,
                               const PsdParams &params) {
  if (pairs.empty()) fail(ErrorKind::InvalidArgument, "averaged_noise_psd: no pairs");
  std::vector<PsdEstimate> estimates;
  estimates.reserve(pairs.size());
  const std::size_t len = pairs.front().output->size();
  for (const auto &p : pairs) {
    if (p.output->size() != len) fail(ErrorKind::LengthMismatch, "outputs differ in length");
    estimates.push_back(psd_estimate(residual_noise(*p.output, *p.truth, label_offset), params));
  }
  return average_psds(estimates);
}

NoiseRatioCurve noise_ratio(const PsdEstimate &pred_psd, const PsdEstimate &ma_psd) {
  if (pred_psd.frequencies != ma_psd.frequencies || pred_psd.sample_rate != ma_psd.sample_rate) {
    fail(ErrorKind::GridMismatch, "prediction and moving-average PSDs use different grids");
  }
  NoiseRatioCurve curve;
  const std::size_t bins = pred_psd.frequencies.size();
  curve.normalized_frequency.resize(bins);
  curve.ratio.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    curve.normalized_frequency[k] = static_cast<double>(k) / static_cast<double>(pred_psd.segment_length);
    if (ma_psd.density[k] > 0.0) curve.ratio[k] = pred_psd.density[k] / ma_psd.density[k];
  }
  return curve;
}

double band_mean(const NoiseRatioCurve &curve, double lo, double hi) {
  if (!(lo < hi)) fail(ErrorKind::InvalidArgument, "band_mean requires lo < hi");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < curve.ratio.size(); ++k) {
    const double f = curve.normalized_frequency[k];
    if (f >= lo && f <= hi && curve.ratio[k]) {
      sum += *curve.ratio[k];
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::EmptyBand, "no defined bins in the band");
  return sum / static_cast<double>(count);
}

double loglog_slope(const PsdEstimate &psd, double f_lo, double f_hi) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    const double f = psd.frequencies[k];
    if (f < f_lo || f > f_hi) continue;
    if (!(f > 0.0) || !(psd.density[k] > 0.0)) {
      fail(ErrorKind::NonpositiveDensity, "log-log fit needs positive frequency and density");
    }
    pts.emplace_back(std::log(f), std::log(psd.density[k]));
  }
  if (pts.size() < 4) fail(ErrorKind::InsufficientBins, "log-log fit needs >= 4 bins in range");
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (auto [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

namespace {
std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_psd_csv(const std::filesystem::path &path, const PsdEstimate &psd) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "f_norm,psd\n";
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    out << g17(static_cast<double>(k) / static_cast<double>(psd.segment_length)) << ',' << g17(psd.density[k])
        << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

void write_ratio_csv(const std::filesystem::path &path, const NoiseRatioCurve &curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "f_norm,ratio\n";
  for (std::size_t k = 0; k < curve.ratio.size(); ++k) {
    out << g17(curve.normalized_frequency[k]) << ',';
    if (curve.ratio[k]) out << g17(*curve.ratio[k]);
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace mcgdn
