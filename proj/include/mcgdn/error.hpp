#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcgdn {

enum class ErrorKind {
  InvalidArgument,
  AllZeroSignal,
  BadLength,
  WindowTooLarge,
  LengthMismatch,
  SegmentTooLong,
  DimensionMismatch,
  NonFiniteActivation,
  EmptyBatch,
  ShapeMismatch,
  DivergenceDetected,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  ArchMismatch,
  SignalTooShort,
  GridMismatch,
  EmptyBand,
  InsufficientBins,
  NonpositiveDensity,
  MalformedInput,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so
// callers (the CLI in particular) can map it onto an exit code.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &what);

}  // namespace mcgdn
