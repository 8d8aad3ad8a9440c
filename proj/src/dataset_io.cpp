#include "mcgdn/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcgdn/binary_io.hpp"
#include "mcgdn/error.hpp"

namespace mcgdn {
namespace {

constexpr char kMagic[4] = {'M', 'C', 'G', '1'};

std::string_view unit_name(AmplitudeUnit u) { return u == AmplitudeUnit::Volts ? "volts" : "normalized"; }

AmplitudeUnit parse_unit(std::string_view s) {
  if (s == "volts") return AmplitudeUnit::Volts;
  if (s == "normalized") return AmplitudeUnit::Normalized;
  fail(ErrorKind::MalformedInput, "unknown amplitude unit '" + std::string(s) + "'");
}

void check_lengths(const CycleContainer &c) {
  for (const auto &r : c.records) {
    if (r.samples.size() != c.length) {
      fail(ErrorKind::LengthMismatch, "record '" + r.id + "' has " + std::to_string(r.samples.size()) +
                                          " samples, container length is " + std::to_string(c.length));
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_container(const std::filesystem::path &path, const CycleContainer &container) {
  check_lengths(container);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out.write(kMagic, 4);
  binary::write_uint<std::uint32_t>(out, kContainerVersion);
  binary::write_uint<std::uint8_t>(out, container.unit == AmplitudeUnit::Volts ? 1 : 0);
  binary::write_uint<std::uint64_t>(out, container.records.size());
  binary::write_uint<std::uint64_t>(out, container.length);
  binary::write_f64(out, container.sample_rate);
  for (const auto &r : container.records) {
    binary::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(r.id.size()));
    out.write(r.id.data(), static_cast<std::streamsize>(r.id.size()));
    binary::write_uint<std::uint64_t>(out, r.realization);
    binary::write_uint<std::uint64_t>(out, r.seed);
    for (double v : r.samples) binary::write_f64(out, v);
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

CycleContainer read_container(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  char magic[4] = {};
  if (!in.read(magic, 4)) fail(ErrorKind::TruncatedFile, "missing magic in " + path.string());
  if (std::memcmp(magic, kMagic, 4) != 0) fail(ErrorKind::BadMagic, path.string() + " is not an MCG1 container");
  auto version = binary::read_uint<std::uint32_t>(in, "version");
  if (version != kContainerVersion) {
    fail(ErrorKind::UnsupportedVersion, "container version " + std::to_string(version));
  }
  CycleContainer c;
  c.unit = binary::read_uint<std::uint8_t>(in, "unit") == 1 ? AmplitudeUnit::Volts : AmplitudeUnit::Normalized;
  auto count = binary::read_uint<std::uint64_t>(in, "record count");
  c.length = binary::read_uint<std::uint64_t>(in, "length");
  c.sample_rate = binary::read_f64(in, "sample rate");
  for (std::uint64_t i = 0; i < count; ++i) {
    CycleRecord r;
    auto id_len = binary::read_uint<std::uint32_t>(in, "id length");
    r.id.resize(id_len);
    if (!in.read(r.id.data(), id_len)) fail(ErrorKind::TruncatedFile, "truncated record id");
    r.realization = binary::read_uint<std::uint64_t>(in, "realization");
    r.seed = binary::read_uint<std::uint64_t>(in, "seed");
    r.samples.resize(c.length);
    for (auto &v : r.samples) v = binary::read_f64(in, "samples");
    c.records.push_back(std::move(r));
  }
  return c;
}

void write_container_csv(const std::filesystem::path &path, const CycleContainer &container) {
  check_lengths(container);
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "# rate=" << format_double(container.sample_rate) << " unit=" << unit_name(container.unit) << '\n';
  for (const auto &r : container.records) {
    out << r.id << ',' << r.realization << ',' << r.seed;
    for (double v : r.samples) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

CycleContainer read_container_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  CycleContainer c;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# rate=", 0) != 0) {
    fail(ErrorKind::MalformedInput, path.string() + ": missing '# rate=' header");
  }
  {
    std::istringstream header(line.substr(7));
    std::string rate, unit;
    header >> rate >> unit;
    c.sample_rate = std::stod(rate);
    if (unit.rfind("unit=", 0) != 0) fail(ErrorKind::MalformedInput, "missing unit in header");
    c.unit = parse_unit(unit.substr(5));
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 4) fail(ErrorKind::MalformedInput, "row " + std::to_string(row) + ": too few fields");
    CycleRecord r;
    r.id = std::string(fields[0]);
    auto parse_u64 = [&](std::string_view f) {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size()) {
        fail(ErrorKind::MalformedInput, "row " + std::to_string(row) + ": bad integer field");
      }
      return v;
    };
    r.realization = parse_u64(fields[1]);
    r.seed = parse_u64(fields[2]);
    for (std::size_t i = 3; i < fields.size(); ++i) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
      if (ec != std::errc() || p != fields[i].data() + fields[i].size()) {
        fail(ErrorKind::MalformedInput, "row " + std::to_string(row) + ": bad sample field");
      }
      r.samples.push_back(v);
    }
    if (c.records.empty()) c.length = r.samples.size();
    c.records.push_back(std::move(r));
  }
  check_lengths(c);
  return c;
}

CycleContainer to_container(std::span<const EcgCycle> cycles) {
  CycleContainer c;
  if (!cycles.empty()) {
    c.sample_rate = cycles.front().signal.sample_rate();
    c.unit = cycles.front().signal.unit();
    c.length = cycles.front().signal.size();
  }
  for (const auto &e : cycles) {
    auto s = e.signal.samples();
    c.records.push_back({e.source_id, 0, 0, {s.begin(), s.end()}});
  }
  return c;
}

CycleContainer to_container(std::span<const McgCycle> cycles) {
  CycleContainer c;
  if (!cycles.empty()) {
    c.sample_rate = cycles.front().signal.sample_rate();
    c.unit = cycles.front().signal.unit();
    c.length = cycles.front().signal.size();
  }
  for (const auto &m : cycles) {
    auto s = m.signal.samples();
    c.records.push_back({m.ecg_ref, m.realization, m.noise_seed, {s.begin(), s.end()}});
  }
  return c;
}

std::vector<EcgCycle> ecg_cycles(const CycleContainer &container) {
  std::vector<EcgCycle> out;
  out.reserve(container.records.size());
  for (const auto &r : container.records) {
    out.push_back({SampledSignal(r.samples, container.sample_rate, container.unit), r.id});
  }
  return out;
}

std::vector<McgCycle> mcg_cycles(const CycleContainer &container) {
  std::vector<McgCycle> out;
  out.reserve(container.records.size());
  for (const auto &r : container.records) {
    out.push_back({SampledSignal(r.samples, container.sample_rate, container.unit), r.id, r.realization, r.seed});
  }
  return out;
}

}  // namespace mcgdn
