#include <doctest.h>

#include <algorithm>
#include <tuple>

#include "mcgdn/rng.hpp"
#include "mcgdn/windowing.hpp"
#include "test_helpers.hpp"

using namespace mcgdn;

namespace {
std::pair<McgCycle, EcgCycle> pair_of(std::size_t n, const std::string &id, std::uint64_t seed = 1) {
  Rng rng(seed);
  std::vector<double> mcg(n), ecg(n);
  for (std::size_t i = 0; i < n; ++i) {
    ecg[i] = static_cast<double>(i);
    mcg[i] = static_cast<double>(i) + rng.uniform(-0.1, 0.1);
  }
  return {McgCycle{SampledSignal(mcg, 2000.0), id, 0, seed}, EcgCycle{SampledSignal(ecg, 2000.0), id}};
}

using Key = std::tuple<std::string, std::size_t, double>;
std::vector<Key> sorted_keys(const SegmentDataset &ds) {
  std::vector<Key> keys;
  for (const auto &e : ds.examples()) keys.emplace_back(ds.cycle_id(e.cycle), e.offset, e.label);
  std::sort(keys.begin(), keys.end());
  return keys;
}
}  // namespace

TEST_SUITE("windowing") {
  TEST_CASE("segment_cycle counts and labels") {
    auto [mcg, ecg] = pair_of(50, "a");
    auto one = segment_cycle(mcg, ecg, {50, 1});
    REQUIRE(one.size() == 1);
    CHECK(one[0].label == ecg.signal[49]);
    CHECK(one[0].offset == 0);

    auto [m2, e2] = pair_of(3008, "b");
    CHECK(segment_cycle(m2, e2, {50, 1}).size() == 2959);
    CHECK(segment_count(3008, 50, 1) == 2959);

    auto [m3, e3] = pair_of(10, "c");
    auto strided = segment_cycle(m3, e3, {4, 3});
    REQUIRE(strided.size() == 3);
    CHECK(strided[0].offset == 0);
    CHECK(strided[1].offset == 3);
    CHECK(strided[2].offset == 6);
    CHECK(strided[2].label == e3.signal[9]);
    for (const auto &ex : strided.examples()) {
      CHECK(ex.segment.size() == 4);
      CHECK(ex.segment[0] == m3.signal[ex.offset]);
      CHECK(ex.offset + 4 <= 10);
    }
  }

  TEST_CASE("centered alignment labels the middle sample") {
    auto [mcg, ecg] = pair_of(20, "a");
    auto ds = segment_cycle(mcg, ecg, {5, 1, LabelAlignment::Centered});
    for (const auto &ex : ds.examples()) CHECK(ex.label == ecg.signal[ex.offset + 2]);
  }

  TEST_CASE("segment_cycle errors") {
    auto [mcg, ecg] = pair_of(10, "a");
    auto [m_long, e_long] = pair_of(11, "b");
    CHECK_THROWS_KIND(segment_cycle(mcg, e_long, {4, 1}), ErrorKind::LengthMismatch);
    CHECK_THROWS_KIND(segment_cycle(mcg, ecg, {11, 1}), ErrorKind::SegmentTooLong);
  }

  TEST_CASE("labels in offset order reproduce the ECG tail") {
    auto [mcg, ecg] = pair_of(300, "a");
    auto ds = segment_cycle(mcg, ecg, {50, 1});
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(ds[i].label == ecg.signal[i + 49]);
  }

  TEST_CASE("segments never mix cycles") {
    auto [m1, e1] = pair_of(100, "a", 1);
    auto [m2, e2] = pair_of(100, "b", 2);
    std::vector<McgCycle> mcgs{m1, m2};
    std::vector<EcgCycle> ecgs{e1, e2};
    auto ds = segment_cycles(mcgs, ecgs, {20, 7});
    CHECK(ds.size() == 2 * segment_count(100, 20, 7));
    for (const auto &ex : ds.examples()) {
      const auto &src = ex.cycle == 0 ? m1 : m2;
      for (std::size_t k = 0; k < ex.segment.size(); ++k) CHECK(ex.segment[k] == src.signal[ex.offset + k]);
    }
  }

  TEST_CASE("shuffle") {
    SegmentDataset empty;
    CHECK(shuffle(empty, 3).empty());

    auto [mcg, ecg] = pair_of(500, "a");
    auto ds = segment_cycle(mcg, ecg, {50, 1});
    auto s1 = shuffle(ds, 99);
    auto s2 = shuffle(ds, 99);
    REQUIRE(s1.size() == ds.size());
    bool moved = false;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(s1[i].offset == s2[i].offset);
      moved |= s1[i].offset != ds[i].offset;
    }
    CHECK(moved);
    CHECK(sorted_keys(s1) == sorted_keys(ds));
  }

  TEST_CASE("shuffle permutation is a bijection") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = rng.bounded(400);
      auto perm = shuffle_permutation(n, rng.next_u64());
      std::vector<std::size_t> inverse(n);
      for (std::size_t i = 0; i < n; ++i) inverse[perm[i]] = i;
      for (std::size_t i = 0; i < n; ++i) CHECK(perm[inverse[i]] == i);
      auto sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
    }
  }

  TEST_CASE("sequential_iter matches segment_cycle") {
    auto [mcg, ecg] = pair_of(3008, "a");
    auto labelled = segment_cycle(mcg, ecg, {50, 3});
    auto plain = sequential_iter(mcg, 50, 3);
    REQUIRE(plain.size() == labelled.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
      CHECK(plain[i].offset == labelled[i].offset);
      CHECK(std::equal(plain[i].samples.begin(), plain[i].samples.end(), labelled[i].segment.begin()));
      if (i > 0) CHECK(plain[i].offset == plain[i - 1].offset + 3);
    }
    auto [m50, e50] = pair_of(50, "b");
    auto single = sequential_iter(m50, 50, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].offset == 0);
  }

  TEST_CASE("split_by_cycle") {
    std::vector<std::string> ids;
    for (int i = 0; i < 20; ++i) ids.push_back("ecg-" + std::to_string(i));
    auto split = split_by_cycle(ids, {}, 7);
    int counts[3] = {0, 0, 0};
    for (const auto &[id, s] : split) counts[static_cast<int>(s)]++;
    CHECK(counts[0] == 16);
    CHECK(counts[1] == 2);
    CHECK(counts[2] == 2);
    CHECK(split_by_cycle(ids, {}, 7) == split);
    CHECK_FALSE(split_by_cycle(ids, {}, 8) == split);
  }
}
