#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace mcgdn {

// Identifier written into run metadata so a run can be replayed by any
// implementation of the same generator and transforms.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64; uniform=(u>>11)*2^-53; normal=box-muller(pair-cached); bounded=rejection";

/// Seedable 64-bit generator. std::mt19937_64 is bit-exact by the standard;
/// the floating-point transforms are defined here rather than taken from
/// <random> distributions, whose output is implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal();
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t bounded(std::uint64_t bound);

private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

/// Stable seed derivation: base ^ mix(hash(tag), index).
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index);

}  // namespace mcgdn
