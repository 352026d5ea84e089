#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaugetrace {

enum class ErrorKind {
  DimensionMismatch,
  NotSkew,
  SingularInput,
  OutOfDomain,
  StencilOutOfRange,
  IntegrationDiverged,
  NonOrthogonalGauge,
  WeightOutOfRange,
  UnsupportedField,
  InadmissibleBeta,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception; `kind()` lets callers branch on the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace gaugetrace
