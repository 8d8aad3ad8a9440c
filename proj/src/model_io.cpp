#include "mcgdn/model_io.hpp"

#include <cstring>
#include <fstream>

#include "mcgdn/binary_io.hpp"
#include "mcgdn/error.hpp"

namespace mcgdn {
namespace {
constexpr char kMagic[4] = {'M', 'C', 'G', 'M'};
}

void save_model(const DenoiserModel &model, const std::filesystem::path &path) {
  check_shapes(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out.write(kMagic, 4);
  binary::write_uint<std::uint32_t>(out, kModelFormatVersion);
  const auto &a = model.arch;
  binary::write_uint<std::uint64_t>(out, a.window);
  binary::write_uint<std::uint64_t>(out, a.kernel);
  binary::write_uint<std::uint64_t>(out, a.filters);
  binary::write_uint<std::uint64_t>(out, a.hidden);
  binary::write_uint<std::uint8_t>(out, a.conv_bias ? 1 : 0);
  binary::write_uint<std::uint64_t>(out, model.parameter_count());
  for_each_tensor(model, [&out](std::string_view, std::span<const double> t) {
    for (double v : t) binary::write_f64(out, v);
  });
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

DenoiserModel load_model(const std::filesystem::path &path, const std::optional<Architecture> &expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  char magic[4] = {};
  if (!in.read(magic, 4)) fail(ErrorKind::TruncatedFile, "missing magic in " + path.string());
  if (std::memcmp(magic, kMagic, 4) != 0) fail(ErrorKind::BadMagic, path.string() + " is not an MCGM model file");
  const auto version = binary::read_uint<std::uint32_t>(in, "version");
  if (version != kModelFormatVersion) {
    fail(ErrorKind::UnsupportedVersion, "model format version " + std::to_string(version));
  }
  Architecture arch;
  arch.window = binary::read_uint<std::uint64_t>(in, "window");
  arch.kernel = binary::read_uint<std::uint64_t>(in, "kernel");
  arch.filters = binary::read_uint<std::uint64_t>(in, "filters");
  arch.hidden = binary::read_uint<std::uint64_t>(in, "hidden");
  arch.conv_bias = binary::read_uint<std::uint8_t>(in, "conv_bias") != 0;
  arch.validate();
  if (expected && !(*expected == arch)) fail(ErrorKind::ArchMismatch, "model architecture differs from the expected one");

  DenoiserModel model = DenoiserModel::zeros(arch);
  const auto count = binary::read_uint<std::uint64_t>(in, "parameter count");
  if (count != model.parameter_count()) {
    fail(ErrorKind::ArchMismatch, "parameter count " + std::to_string(count) + " does not match architecture (" +
                                      std::to_string(model.parameter_count()) + ")");
  }
  for_each_tensor(model, [&in](std::string_view, std::span<double> t) {
    for (double &v : t) v = binary::read_f64(in, "parameters");
  });
  if (in.peek() != std::char_traits<char>::eof()) {
    fail(ErrorKind::ArchMismatch, "trailing bytes after the parameter block");
  }
  return model;
}

}  // namespace mcgdn
