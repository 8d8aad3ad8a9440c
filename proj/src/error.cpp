#include "mcgdn/error.hpp"

namespace mcgdn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::AllZeroSignal: return "AllZeroSignal";
    case ErrorKind::BadLength: return "BadLength";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SegmentTooLong: return "SegmentTooLong";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteActivation: return "NonFiniteActivation";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::ArchMismatch: return "ArchMismatch";
    case ErrorKind::SignalTooShort: return "SignalTooShort";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::EmptyBand: return "EmptyBand";
    case ErrorKind::InsufficientBins: return "InsufficientBins";
    case ErrorKind::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

}  // namespace mcgdn
