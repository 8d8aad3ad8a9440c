#include "mcgdn/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mcgdn/error.hpp"
#include "mcgdn/rng.hpp"

namespace mcgdn {

std::size_t label_offset(std::size_t window_length, LabelAlignment alignment) {
  if (window_length == 0) fail(ErrorKind::InvalidArgument, "window length must be >= 1");
  return alignment == LabelAlignment::Causal ? window_length - 1 : (window_length - 1) / 2;
}

std::size_t segment_count(std::size_t cycle_length, std::size_t window_length, std::size_t stride) {
  if (window_length == 0) fail(ErrorKind::InvalidArgument, "window length must be >= 1");
  if (stride == 0) fail(ErrorKind::InvalidArgument, "stride must be >= 1");
  if (window_length > cycle_length) {
    fail(ErrorKind::SegmentTooLong, "segment length " + std::to_string(window_length) +
                                        " exceeds cycle length " + std::to_string(cycle_length));
  }
  return (cycle_length - window_length) / stride + 1;
}

SegmentDataset::SegmentDataset(WindowParams params)
    : params_(params), storage_(std::make_shared<Storage>()) {}

void SegmentDataset::add_cycle(const McgCycle &mcg, const EcgCycle &ecg) {
  const std::size_t n = mcg.signal.size();
  if (ecg.signal.size() != n) {
    fail(ErrorKind::LengthMismatch, "MCG cycle has " + std::to_string(n) + " samples, ECG has " +
                                        std::to_string(ecg.signal.size()));
  }
  const std::size_t count = segment_count(n, params_.length, params_.stride);
  const std::size_t lab = label_offset(params_.length, params_.alignment);

  // Copy-on-write: other datasets may share this storage.
  if (storage_.use_count() > 1) storage_ = std::make_shared<Storage>(*storage_);
  auto data = std::make_shared<const std::vector<double>>(mcg.signal.samples().begin(),
                                                          mcg.signal.samples().end());
  const std::size_t cycle = storage_->ids.size();
  storage_->cycles.push_back(data);
  storage_->ids.push_back(mcg_cycle_id(mcg));

  auto truth = ecg.signal.samples();
  examples_.reserve(examples_.size() + count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t offset = k * params_.stride;
    examples_.push_back({std::span<const double>(data->data() + offset, params_.length),
                         truth[offset + lab], cycle, offset});
  }
}

SegmentDataset SegmentDataset::reordered(std::span<const std::size_t> order) const {
  if (order.size() != examples_.size()) fail(ErrorKind::LengthMismatch, "permutation size mismatch");
  SegmentDataset out(params_);
  out.storage_ = storage_;
  out.examples_.reserve(order.size());
  for (std::size_t i : order) out.examples_.push_back(examples_.at(i));
  return out;
}

std::string mcg_cycle_id(const McgCycle &mcg) {
  return mcg.ecg_ref + "#" + std::to_string(mcg.realization);
}

SegmentDataset segment_cycle(const McgCycle &mcg, const EcgCycle &ecg, const WindowParams &params) {
  SegmentDataset ds(params);
  ds.add_cycle(mcg, ecg);
  return ds;
}

SegmentDataset segment_cycles(std::span<const McgCycle> mcgs, std::span<const EcgCycle> ecgs,
                              const WindowParams &params) {
  std::map<std::string, const EcgCycle *> by_id;
  for (const auto &e : ecgs) by_id[e.source_id] = &e;
  SegmentDataset ds(params);
  for (const auto &m : mcgs) {
    auto it = by_id.find(m.ecg_ref);
    if (it == by_id.end()) fail(ErrorKind::InvalidArgument, "no ECG cycle named '" + m.ecg_ref + "'");
    ds.add_cycle(m, *it->second);
  }
  return ds;
}

std::vector<std::size_t> shuffle_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.bounded(i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

SegmentDataset shuffle(const SegmentDataset &dataset, std::uint64_t seed) {
  auto order = shuffle_permutation(dataset.size(), seed);
  return dataset.reordered(order);
}

std::vector<Segment> sequential_iter(const McgCycle &mcg, std::size_t window_length, std::size_t stride) {
  auto samples = mcg.signal.samples();
  const std::size_t count = segment_count(samples.size(), window_length, stride);
  std::vector<Segment> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back({k * stride, samples.subspan(k * stride, window_length)});
  }
  return out;
}

std::map<std::string, Split> split_by_cycle(std::span<const std::string> ecg_ids,
                                            const SplitFractions &fractions, std::uint64_t seed) {
  if (fractions.train < 0.0 || fractions.validation < 0.0 || fractions.train + fractions.validation > 1.0) {
    fail(ErrorKind::InvalidArgument, "split fractions must be >= 0 and sum to <= 1");
  }
  std::set<std::string> unique(ecg_ids.begin(), ecg_ids.end());
  std::vector<std::pair<std::uint64_t, std::string>> keyed;
  for (const auto &id : unique) keyed.emplace_back(splitmix64(derive_seed(seed, id, 0)), id);
  std::sort(keyed.begin(), keyed.end());

  const auto n = static_cast<double>(keyed.size());
  const auto n_train = static_cast<std::size_t>(std::llround(fractions.train * n));
  const auto n_val = std::min(keyed.size() - std::min(n_train, keyed.size()),
                              static_cast<std::size_t>(std::llround(fractions.validation * n)));
  std::map<std::string, Split> out;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    Split s = i < n_train ? Split::Train : (i < n_train + n_val ? Split::Validation : Split::Test);
    out[keyed[i].second] = s;
  }
  return out;
}

}  // namespace mcgdn
