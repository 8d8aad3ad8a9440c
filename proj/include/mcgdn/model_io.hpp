#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "mcgdn/model.hpp"

namespace mcgdn {

// Model file, all little-endian:
//   "MCGM" | u32 version | u64 window | u64 kernel | u64 filters | u64 hidden
//   | u8 conv_bias | u64 parameter count | f64 parameters
// Parameters follow the for_each_tensor order, matrices row-major.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const DenoiserModel &model, const std::filesystem::path &path);

/// Throws BadMagic, UnsupportedVersion, TruncatedFile, or ArchMismatch (an
/// inconsistent architecture block, a parameter count that disagrees with
/// it, or a mismatch with `expected`).
DenoiserModel load_model(const std::filesystem::path &path,
                         const std::optional<Architecture> &expected = std::nullopt);

}  // namespace mcgdn
