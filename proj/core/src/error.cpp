#include "grasswalk/error.hpp"

namespace grasswalk {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OddEntry: return "OddEntry";
    case ErrorCode::NotDecreasing: return "NotDecreasing";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::InvalidNodeCount: return "InvalidNodeCount";
    case ErrorCode::GridUnderResolved: return "GridUnderResolved";
    case ErrorCode::NumericBreakdown: return "NumericBreakdown";
    case ErrorCode::RankNotOne: return "RankNotOne";
    case ErrorCode::UnsupportedAlgebra: return "UnsupportedAlgebra";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SingularMinor: return "SingularMinor";
    case ErrorCode::SeriesRange: return "SeriesRange";
    case ErrorCode::NotInChamber: return "NotInChamber";
    case ErrorCode::NonIntegerP: return "NonIntegerP";
    case ErrorCode::InadmissibleRow: return "InadmissibleRow";
    case ErrorCode::DegreeCapExceeded: return "DegreeCapExceeded";
    case ErrorCode::BesselUncertain: return "BesselUncertain";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace grasswalk
