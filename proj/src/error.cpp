#include "gm/error.hpp"

namespace gm {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::BadArgument: return "BadArgument";
    case Errc::BadDelta: return "BadDelta";
    case Errc::BadCount: return "BadCount";
    case Errc::BadEpsilon: return "BadEpsilon";
    case Errc::ParamConflict: return "ParamConflict";
    case Errc::MissingGammaInverse: return "MissingGammaInverse";
    case Errc::TargetTooSmall: return "TargetTooSmall";
    case Errc::OrderTooSmall: return "OrderTooSmall";
    case Errc::EdgeAbsent: return "EdgeAbsent";
    case Errc::EdgePresent: return "EdgePresent";
    case Errc::BadVertex: return "BadVertex";
    case Errc::BadDimension: return "BadDimension";
    case Errc::FeatureDimMismatch: return "FeatureDimMismatch";
    case Errc::MissingFile: return "MissingFile";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::InconsistentIndicator: return "InconsistentIndicator";
    case Errc::InvalidGraphLabels: return "InvalidGraphLabels";
    case Errc::OrderMismatch: return "OrderMismatch";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::ForestShapeMismatch: return "ForestShapeMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::Infeasible: return "Infeasible";
    case Errc::Unbounded: return "Unbounded";
    case Errc::EmptyCollection: return "EmptyCollection";
    case Errc::ForestTooLarge: return "ForestTooLarge";
    case Errc::TooLargeForExact: return "TooLargeForExact";
    case Errc::TooLarge: return "TooLarge";
    case Errc::IterationLimit: return "IterationLimit";
    case Errc::CellOverflow: return "CellOverflow";
  }
  return "UnknownError";
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::BadArgument:
    case Errc::BadDelta:
    case Errc::BadCount:
    case Errc::BadEpsilon:
    case Errc::ParamConflict:
    case Errc::MissingGammaInverse:
    case Errc::TargetTooSmall:
    case Errc::OrderTooSmall:
      return 2;
    case Errc::EdgeAbsent:
    case Errc::EdgePresent:
    case Errc::BadVertex:
    case Errc::BadDimension:
    case Errc::FeatureDimMismatch:
    case Errc::MissingFile:
    case Errc::MalformedLine:
    case Errc::InconsistentIndicator:
    case Errc::InvalidGraphLabels:
    case Errc::OrderMismatch:
    case Errc::DimMismatch:
    case Errc::ForestShapeMismatch:
    case Errc::NonFinite:
    case Errc::Infeasible:
    case Errc::Unbounded:
    case Errc::EmptyCollection:
      return 3;
    case Errc::ForestTooLarge:
    case Errc::TooLargeForExact:
    case Errc::TooLarge:
    case Errc::IterationLimit:
    case Errc::CellOverflow:
      return 4;
  }
  return 1;
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace gm
