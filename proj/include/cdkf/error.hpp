#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdkf {

enum class ErrorKind {
  NotPositiveDefinite,
  SingularTriangular,
  HyperbolicBreakdown,
  InvalidDimension,
  DegenerateScaling,
  DimensionMismatch,
  LengthMismatch,
  StepSizeUnderflow,
  NonFiniteState,
  DegenerateGeometry,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type. Numerical breakdowns
// (NotPositiveDefinite, HyperbolicBreakdown, NonFiniteState, ...) are caught
// by the filter driver and turned into failed runs.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cdkf
