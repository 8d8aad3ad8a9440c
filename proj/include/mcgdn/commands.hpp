#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mcgdn/config.hpp"
#include "mcgdn/error.hpp"

namespace mcgdn::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMalformedInput = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDivergence = 4;
inline constexpr int kExitGridMismatch = 5;

int exit_code_for(ErrorKind kind);

// File names inside a dataset / output directory.
inline constexpr const char *kManifestFile = "manifest.json";
inline constexpr const char *kEcgBinary = "ecg.bin";
inline constexpr const char *kMcgBinary = "mcg.bin";
inline constexpr const char *kEcgCsv = "ecg.csv";
inline constexpr const char *kMcgCsv = "mcg.csv";
inline constexpr const char *kModelFile = "model.mcgm";
inline constexpr const char *kHistoryFile = "history.csv";
inline constexpr const char *kEffectiveConfig = "effective_config.txt";

/// Reads data.ecg_csv, preconditions, synthesizes MCG cycles and writes the
/// dataset plus manifest into `out`.
void cmd_synth(const RunConfig &config, const std::filesystem::path &out);

/// Trains on the Train split of data.dataset_dir, selecting on Validation.
void cmd_train(const RunConfig &config, const std::filesystem::path &out);

/// Denoises one cycle (denoise.input CSV row, or record denoise.cycle of the
/// dataset) with model.path and writes denoised.csv.
void cmd_denoise(const RunConfig &config, const std::filesystem::path &out);

/// Residual-noise PSDs of the model and the moving average on the Test split.
/// eval.mode=self substitutes the moving average for the model.
void cmd_eval(const RunConfig &config, const std::filesystem::path &out);

/// Full command line, argv[0] included. Never throws; returns the exit code.
int run(int argc, const char *const *argv);
int run(const std::vector<std::string> &args);

}  // namespace mcgdn::cli
