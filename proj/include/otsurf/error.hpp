#pragma once

#include <stdexcept>
#include <string>

namespace otsurf {

enum class ErrorCode {
  PointOffBoundary,
  NonUniqueNormal,
  OutsideChartDomain,
  NotSameSide,
  NotC1,
  InsufficientSamples,
  RadiusTooSmall,
  NonPositiveDensity,
  OriginNotInterior,
  NormalProductNonNegative,
  Unbalanced,
  SizeExceeded,
  NotConverged,
  SectionCrossesSide,
  HypothesisFailed,
  DegenerateSubdifferential,
  NoAdmissibleSlope,
  DimensionTooLow,
  PlanNotMapLike,
  ConfigInvalid,
  IoError,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace otsurf
