#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mcgdn/signal.hpp"

namespace mcgdn {

/// Which ECG sample a segment is labelled with. Causal takes the segment's
/// last sample; Centered takes sample (N - 1) / 2.
enum class LabelAlignment { Causal, Centered };

struct WindowParams {
  std::size_t length = 50;  // N
  std::size_t stride = 1;   // delta
  LabelAlignment alignment = LabelAlignment::Causal;
};

std::size_t label_offset(std::size_t window_length, LabelAlignment alignment);

/// floor((L - N) / delta) + 1, after validating L >= N and delta >= 1.
std::size_t segment_count(std::size_t cycle_length, std::size_t window_length, std::size_t stride);

struct SegmentExample {
  std::span<const double> segment;
  double label = 0.0;
  std::size_t cycle = 0;  // index into SegmentDataset::cycle_ids()
  std::size_t offset = 0;
};

/// Labelled segments over one or more MCG cycles. Segment spans point into
/// cycle storage shared between copies, so a dataset is cheap to copy and
/// shuffle, and a segment never spans two cycles.
class SegmentDataset {
public:
  explicit SegmentDataset(WindowParams params = {});

  /// Segments one (MCG, ECG) pair and appends its examples. Throws
  /// LengthMismatch or SegmentTooLong.
  void add_cycle(const McgCycle &mcg, const EcgCycle &ecg);

  const WindowParams &params() const noexcept { return params_; }
  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  const SegmentExample &operator[](std::size_t i) const { return examples_[i]; }
  std::span<const SegmentExample> examples() const noexcept { return examples_; }
  const std::string &cycle_id(std::size_t cycle) const { return storage_->ids[cycle]; }
  std::size_t cycle_count() const noexcept { return storage_->ids.size(); }

  /// Same cycles, examples reordered by `order` (a permutation of indices).
  SegmentDataset reordered(std::span<const std::size_t> order) const;

private:
  struct Storage {
    std::vector<std::shared_ptr<const std::vector<double>>> cycles;
    std::vector<std::string> ids;
  };

  WindowParams params_;
  std::shared_ptr<Storage> storage_;
  std::vector<SegmentExample> examples_;
};

/// Identity of an MCG cycle in a dataset: "<ecg_ref>#<realization>".
std::string mcg_cycle_id(const McgCycle &mcg);

SegmentDataset segment_cycle(const McgCycle &mcg, const EcgCycle &ecg, const WindowParams &params);

/// Segments every MCG cycle against the ECG cycle named by its ecg_ref.
SegmentDataset segment_cycles(std::span<const McgCycle> mcgs, std::span<const EcgCycle> ecgs,
                              const WindowParams &params);

/// Fisher-Yates permutation of [0, n) driven by Rng(seed).
std::vector<std::size_t> shuffle_permutation(std::size_t n, std::uint64_t seed);

SegmentDataset shuffle(const SegmentDataset &dataset, std::uint64_t seed);

struct Segment {
  std::size_t offset = 0;
  std::span<const double> samples;
};

/// Unlabelled segments in ascending offset order; spans point into `mcg`.
std::vector<Segment> sequential_iter(const McgCycle &mcg, std::size_t window_length, std::size_t stride);

enum class Split { Train, Validation, Test };

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
};

/// Assigns each distinct ECG id to a split. Ids are ordered by a seeded hash,
/// then the first round(train * n) go to Train, the next round(validation * n)
/// to Validation and the rest to Test.
std::map<std::string, Split> split_by_cycle(std::span<const std::string> ecg_ids,
                                            const SplitFractions &fractions, std::uint64_t seed);

}  // namespace mcgdn
