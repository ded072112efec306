#include "relgrow/error.hpp"

namespace relgrow {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingField: return "MissingField";
    case Errc::BadTimestamp: return "BadTimestamp";
    case Errc::Io: return "IoError";
    case Errc::Schema: return "SchemaError";
    case Errc::NegativeCount: return "NegativeCount";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::Domain: return "DomainError";
    case Errc::Overflow: return "Overflow";
    case Errc::TooFewEvents: return "TooFewEvents";
    case Errc::NoFiniteMle: return "NoFiniteMle";
    case Errc::TooFewBins: return "TooFewBins";
    case Errc::FitDiverged: return "FitDiverged";
    case Errc::AllZeroCounts: return "AllZeroCounts";
    case Errc::UndefinedTmax: return "UndefinedTmax";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::Empty: return "Empty";
    case Errc::ZeroActual: return "ZeroActual";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::InsufficientDof: return "InsufficientDof";
    case Errc::MissingCriticalValue: return "MissingCriticalValue";
    case Errc::InsufficientCells: return "InsufficientCells";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace relgrow
