#pragma once

#include <stdexcept>
#include <string>

namespace gm {

// Every failure the library can raise, grouped by how the CLI reports it:
// configuration errors exit with 2, data errors with 3, resource limits with 4.
enum class Errc {
  // configuration / parameter errors
  BadArgument,
  BadDelta,
  BadCount,
  BadEpsilon,
  ParamConflict,
  MissingGammaInverse,
  TargetTooSmall,
  OrderTooSmall,
  // data errors
  EdgeAbsent,
  EdgePresent,
  BadVertex,
  BadDimension,
  FeatureDimMismatch,
  MissingFile,
  MalformedLine,
  InconsistentIndicator,
  InvalidGraphLabels,
  OrderMismatch,
  DimMismatch,
  ForestShapeMismatch,
  NonFinite,
  Infeasible,
  Unbounded,
  EmptyCollection,
  // resource limits
  ForestTooLarge,
  TooLargeForExact,
  TooLarge,
  IterationLimit,
  CellOverflow,
};

const char* errc_name(Errc code);

// CLI process exit code for a failure class: 2 config, 3 data, 4 resource.
int exit_code(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace gm
