#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "mcgdn/rng.hpp"
#include "mcgdn/spectral.hpp"
#include "test_helpers.hpp"

using namespace mcgdn;

namespace {

SampledSignal sine(std::size_t n, double fs, double f, double amp) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  return SampledSignal(std::move(v), fs);
}

SampledSignal white(std::size_t n, double fs, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double &s : v) s = sigma * rng.normal();
  return SampledSignal(std::move(v), fs);
}

PsdEstimate flat_psd(std::size_t seg, double fs, double level) {
  PsdEstimate p;
  p.sample_rate = fs;
  p.segment_length = seg;
  p.overlap = 0.5;
  p.segments_averaged = 1;
  for (std::size_t k = 0; k <= seg / 2; ++k) {
    p.frequencies.push_back(static_cast<double>(k) * fs / static_cast<double>(seg));
    p.density.push_back(level);
  }
  return p;
}

std::string first_line(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("grid and metadata") {
    auto p = psd_estimate(white(3008, 2000.0, 1.0, 1));
    CHECK(p.frequencies.size() == 257);
    CHECK(p.frequencies.front() == 0.0);
    CHECK(p.frequencies.back() == 1000.0);
    CHECK(p.bin_width() == doctest::Approx(3.90625));
    CHECK(p.window == "hann");
    CHECK(p.segments_averaged == 10);
  }

  TEST_CASE("sine power integrates to a^2 / 2") {
    const double fs = 2000.0;
    const double f = 125.0;  // on a bin centre for 512-sample segments
    auto p = psd_estimate(sine(8192, fs, f, 1.0));
    double total = 0.0;
    for (double d : p.density) total += d * p.bin_width();
    CHECK(total == doctest::Approx(0.5).epsilon(0.01));
    std::size_t peak = 0;
    for (std::size_t k = 1; k < p.density.size(); ++k) {
      if (p.density[k] > p.density[peak]) peak = k;
    }
    CHECK(p.frequencies[peak] == doctest::Approx(f));
  }

  TEST_CASE("white noise level and Parseval") {
    const double fs = 2000.0;
    const double sigma = 0.3;
    auto sig = white(1 << 18, fs, sigma, 7);
    auto p = psd_estimate(sig);
    const double level = sigma * sigma * 2.0 / fs;
    double mean = 0.0;
    for (std::size_t k = 1; k < p.density.size(); ++k) mean += p.density[k];
    mean /= static_cast<double>(p.density.size() - 1);
    CHECK(mean == doctest::Approx(level).epsilon(0.02));
    CHECK(p.density.back() == doctest::Approx(level).epsilon(0.15));
    double total = 0.0;
    for (double d : p.density) total += d * p.bin_width();
    double var = 0.0;
    for (double v : sig.samples()) var += v * v;
    var /= static_cast<double>(sig.size());
    CHECK(total == doctest::Approx(var).epsilon(0.02));
  }

  TEST_CASE("constant offsets do not leak into the estimate") {
    auto base = white(4096, 2000.0, 1.0, 3);
    std::vector<double> shifted(base.samples().begin(), base.samples().end());
    for (double &v : shifted) v += 5.0;
    auto p1 = psd_estimate(base);
    auto p2 = psd_estimate(SampledSignal(shifted, 2000.0));
    for (std::size_t k = 0; k < p1.density.size(); ++k) CHECK(p2.density[k] == doctest::Approx(p1.density[k]).epsilon(1e-9));
  }

  TEST_CASE("too short signals are rejected") {
    CHECK_THROWS_KIND(psd_estimate(white(511, 2000.0, 1.0, 1)), ErrorKind::SignalTooShort);
    CHECK_THROWS_KIND(psd_estimate(white(100, 2000.0, 1.0, 1), PsdParams{4, 0.5}), ErrorKind::SignalTooShort);
  }

  TEST_CASE("residual_noise") {
    EcgCycle truth{SampledSignal({0.0, 1.0, 2.0, 3.0, 4.0}, 2000.0), "ecg"};
    auto r = residual_noise(SampledSignal({1.5, 2.5, 3.0}, 2000.0), truth, 1);
    CHECK(r.size() == 3);
    CHECK(r[0] == 0.5);
    CHECK(r[1] == 0.5);
    CHECK(r[2] == 0.0);
    auto same = residual_noise(SampledSignal({0.0, 1.0, 2.0, 3.0, 4.0}, 2000.0), truth, 0);
    for (double v : same.samples()) CHECK(v == 0.0);
    CHECK_THROWS_KIND(residual_noise(SampledSignal({1.0, 2.0, 3.0}, 2000.0), truth, 3), ErrorKind::LengthMismatch);
  }

  TEST_CASE("averaging over cycles") {
    EcgCycle zero{SampledSignal(std::vector<double>(2000, 0.0), 2000.0), "z"};
    auto a = white(2000, 2000.0, 1.0, 1);
    auto b = white(2000, 2000.0, 2.0, 2);
    PsdParams params{256, 0.5};
    std::vector<OutputTruthPair> one = {{&a, &zero}};
    std::vector<OutputTruthPair> dup = {{&a, &zero}, {&a, &zero}};
    auto p1 = averaged_noise_psd(one, 0, params);
    auto p2 = averaged_noise_psd(dup, 0, params);
    for (std::size_t k = 0; k < p1.density.size(); ++k) CHECK(p2.density[k] == doctest::Approx(p1.density[k]).epsilon(1e-14));

    std::vector<OutputTruthPair> ab = {{&a, &zero}, {&b, &zero}};
    std::vector<OutputTruthPair> ba = {{&b, &zero}, {&a, &zero}};
    auto pab = averaged_noise_psd(ab, 0, params);
    auto pba = averaged_noise_psd(ba, 0, params);
    auto pa = psd_estimate(a, params);
    auto pb = psd_estimate(b, params);
    for (std::size_t k = 0; k < pab.density.size(); ++k) {
      CHECK(pab.density[k] == doctest::Approx(pba.density[k]).epsilon(1e-13));
      CHECK(pab.density[k] == doctest::Approx(0.5 * (pa.density[k] + pb.density[k])).epsilon(1e-13));
    }

    std::vector<PsdEstimate> mismatched = {psd_estimate(a, params), psd_estimate(a, PsdParams{512, 0.5})};
    CHECK_THROWS_KIND(average_psds(mismatched), ErrorKind::GridMismatch);
  }

  TEST_CASE("noise_ratio and band_mean") {
    auto num = flat_psd(512, 2000.0, 2.0);
    auto den = flat_psd(512, 2000.0, 4.0);
    auto curve = noise_ratio(num, den);
    CHECK(curve.ratio.size() == 257);
    for (const auto &r : curve.ratio) CHECK(*r == 0.5);
    CHECK(curve.normalized_frequency[256] == 0.5);
    CHECK(band_mean(curve, 0.02, 0.05) == 0.5);

    // Bins 11..25 have k / 512 in [0.02, 0.05]; set a ramp and average by hand.
    for (std::size_t k = 0; k < den.density.size(); ++k) num.density[k] = static_cast<double>(k);
    den.density[12] = 0.0;
    auto ramp = noise_ratio(num, den);
    CHECK(!ramp.ratio[12].has_value());
    double sum = 0.0;
    int count = 0;
    for (std::size_t k = 11; k <= 25; ++k) {
      if (k == 12) continue;
      sum += static_cast<double>(k) / 4.0;
      ++count;
    }
    CHECK(band_mean(ramp, 0.02, 0.05) == doctest::Approx(sum / count).epsilon(1e-14));
    CHECK_THROWS_KIND(band_mean(ramp, 0.0235, 0.0236), ErrorKind::EmptyBand);
    CHECK_THROWS_KIND(noise_ratio(num, flat_psd(256, 2000.0, 1.0)), ErrorKind::GridMismatch);
    CHECK_THROWS_KIND(noise_ratio(num, flat_psd(512, 1000.0, 1.0)), ErrorKind::GridMismatch);
  }

  TEST_CASE("loglog_slope") {
    auto p = flat_psd(1024, 2000.0, 1.0);
    for (std::size_t k = 1; k < p.density.size(); ++k) p.density[k] = 3.0 / p.frequencies[k];
    CHECK(loglog_slope(p, 2.5, 25.0) == doctest::Approx(-1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < p.density.size(); ++k) p.density[k] = 0.5;
    CHECK(std::abs(loglog_slope(p, 2.5, 25.0)) < 1e-12);
    CHECK_THROWS_KIND(loglog_slope(p, 2.5, 5.0), ErrorKind::InsufficientBins);
    p.density[5] = 0.0;
    CHECK_THROWS_KIND(loglog_slope(p, 2.5, 25.0), ErrorKind::NonpositiveDensity);
  }

  TEST_CASE("CSV output") {
    auto dir = std::filesystem::temp_directory_path() / "mcgdn_spectral_tests";
    std::filesystem::create_directories(dir);
    auto p = flat_psd(16, 2000.0, 1.0);
    write_psd_csv(dir / "psd.csv", p);
    CHECK(first_line(dir / "psd.csv") == "f_norm,psd");
    auto den = p;
    den.density[3] = 0.0;
    write_ratio_csv(dir / "ratio.csv", noise_ratio(p, den));
    std::ifstream in(dir / "ratio.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0] == "f_norm,ratio");
    CHECK(lines[4].back() == ',');
  }
}
