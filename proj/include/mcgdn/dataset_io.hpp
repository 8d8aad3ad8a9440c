#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mcgdn/signal.hpp"

namespace mcgdn {

/// One stored cycle. For ECG cycles `id` is the source id and realization and
/// seed are zero; for MCG cycles `id` is the source ECG id.
struct CycleRecord {
  std::string id;
  std::uint64_t realization = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;

  friend bool operator==(const CycleRecord &, const CycleRecord &) = default;
};

struct CycleContainer {
  double sample_rate = kDefaultSampleRate;
  AmplitudeUnit unit = AmplitudeUnit::Normalized;
  std::size_t length = 0;
  std::vector<CycleRecord> records;
};

// Binary layout, all little-endian:
//   "MCG1" | u32 version=1 | u8 unit | u64 records | u64 length | f64 rate
//   per record: u32 id bytes | id | u64 realization | u64 seed | f64[length]
inline constexpr std::uint32_t kContainerVersion = 1;

void write_container(const std::filesystem::path &path, const CycleContainer &container);
CycleContainer read_container(const std::filesystem::path &path);

/// Text form, one row per cycle: id,realization,seed,v0,v1,... with the rate
/// and unit in a leading "# rate=<r> unit=<u>" line. Values use 17
/// significant digits so doubles round-trip.
void write_container_csv(const std::filesystem::path &path, const CycleContainer &container);
CycleContainer read_container_csv(const std::filesystem::path &path);

CycleContainer to_container(std::span<const EcgCycle> cycles);
CycleContainer to_container(std::span<const McgCycle> cycles);
std::vector<EcgCycle> ecg_cycles(const CycleContainer &container);
std::vector<McgCycle> mcg_cycles(const CycleContainer &container);

}  // namespace mcgdn
