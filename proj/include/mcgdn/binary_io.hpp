#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "mcgdn/error.hpp"

// Little-endian primitives shared by the dataset and model containers.
namespace mcgdn::binary {

template <typename UInt>
void write_uint(std::ostream &out, UInt v) {
  char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(UInt));
}

inline void write_f64(std::ostream &out, double v) { write_uint(out, std::bit_cast<std::uint64_t>(v)); }

template <typename UInt>
UInt read_uint(std::istream &in, const char *what) {
  unsigned char bytes[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char *>(bytes), sizeof(UInt))) {
    fail(ErrorKind::TruncatedFile, std::string("truncated while reading ") + what);
  }
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

inline double read_f64(std::istream &in, const char *what) {
  return std::bit_cast<double>(read_uint<std::uint64_t>(in, what));
}

}  // namespace mcgdn::binary
