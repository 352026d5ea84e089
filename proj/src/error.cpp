#include "gaugetrace/error.hpp"

namespace gaugetrace {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotSkew: return "NotSkew";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::StencilOutOfRange: return "StencilOutOfRange";
    case ErrorKind::IntegrationDiverged: return "IntegrationDiverged";
    case ErrorKind::NonOrthogonalGauge: return "NonOrthogonalGauge";
    case ErrorKind::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorKind::UnsupportedField: return "UnsupportedField";
    case ErrorKind::InadmissibleBeta: return "InadmissibleBeta";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace gaugetrace
