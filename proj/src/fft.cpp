#include "mcgdn/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace mcgdn::fft {
namespace {

enum class Kind { Forward, Backward, RealForward };

struct Plan {
  fftw_plan plan = nullptr;
  double *in = nullptr;
  fftw_complex *out = nullptr;
  std::size_t size = 0;

  Plan(Kind kind, std::size_t n) : size(n) {
    bool real = kind == Kind::RealForward;
    in = static_cast<double *>(fftw_malloc(sizeof(double) * (real ? n : 2 * n)));
    out = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * (real ? n / 2 + 1 : n)));
    int len = static_cast<int>(n);
    if (real) {
      plan = fftw_plan_dft_r2c_1d(len, in, out, FFTW_ESTIMATE);
    } else {
      plan = fftw_plan_dft_1d(len, reinterpret_cast<fftw_complex *>(in), out,
                              kind == Kind::Forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }
  ~Plan() {
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  Plan(const Plan &) = delete;
  Plan &operator=(const Plan &) = delete;
};

// FFTW planning is not thread-safe and neither is executing one plan from two
// threads with its own buffers, so the lock covers execution as well.
std::mutex &fft_mutex() {
  static std::mutex m;
  return m;
}

Plan &plan_for(Kind kind, std::size_t n) {
  static std::map<std::tuple<int, std::size_t>, std::unique_ptr<Plan>> cache;
  auto key = std::make_tuple(static_cast<int>(kind), n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<Plan>(kind, n)).first;
  }
  return *it->second;
}

std::vector<std::complex<double>> run_complex(Kind kind, std::span<const std::complex<double>> x) {
  std::lock_guard lock(fft_mutex());
  Plan &p = plan_for(kind, x.size());
  std::copy(x.begin(), x.end(), reinterpret_cast<std::complex<double> *>(p.in));
  fftw_execute(p.plan);
  auto *out = reinterpret_cast<std::complex<double> *>(p.out);
  return {out, out + x.size()};
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
  if (x.empty()) return {};
  return run_complex(Kind::Forward, x);
}

std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> spectrum) {
  if (spectrum.empty()) return {};
  auto out = run_complex(Kind::Backward, spectrum);
  double scale = 1.0 / static_cast<double>(spectrum.size());
  for (auto &v : out) v *= scale;
  return out;
}

std::vector<std::complex<double>> forward_real(std::span<const double> x) {
  if (x.empty()) return {};
  std::lock_guard lock(fft_mutex());
  Plan &p = plan_for(Kind::RealForward, x.size());
  std::copy(x.begin(), x.end(), p.in);
  fftw_execute(p.plan);
  auto *out = reinterpret_cast<std::complex<double> *>(p.out);
  return {out, out + x.size() / 2 + 1};
}

}  // namespace mcgdn::fft
