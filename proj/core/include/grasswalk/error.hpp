#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grasswalk {

enum class ErrorCode {
  OddEntry,
  NotDecreasing,
  NegativeEntry,
  RankMismatch,
  InvalidNodeCount,
  GridUnderResolved,
  NumericBreakdown,
  RankNotOne,
  UnsupportedAlgebra,
  NotConverged,
  SingularMinor,
  SeriesRange,
  NotInChamber,
  NonIntegerP,
  InadmissibleRow,
  DegreeCapExceeded,
  BesselUncertain,
  InvalidArgument,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every module reports failures through this exception; `code()` is the
/// machine-readable tag that the CLI echoes in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace grasswalk
