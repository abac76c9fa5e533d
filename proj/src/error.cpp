#include "cdkf/error.hpp"

namespace cdkf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::SingularTriangular: return "SingularTriangular";
    case ErrorKind::HyperbolicBreakdown: return "HyperbolicBreakdown";
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::DegenerateScaling: return "DegenerateScaling";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace cdkf
