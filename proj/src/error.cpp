#include "otsurf/error.hpp"

namespace otsurf {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::PointOffBoundary: return "PointOffBoundary";
    case ErrorCode::NonUniqueNormal: return "NonUniqueNormal";
    case ErrorCode::OutsideChartDomain: return "OutsideChartDomain";
    case ErrorCode::NotSameSide: return "NotSameSide";
    case ErrorCode::NotC1: return "NotC1";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::RadiusTooSmall: return "RadiusTooSmall";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::NormalProductNonNegative: return "NormalProductNonNegative";
    case ErrorCode::Unbalanced: return "Unbalanced";
    case ErrorCode::SizeExceeded: return "SizeExceeded";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SectionCrossesSide: return "SectionCrossesSide";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::DegenerateSubdifferential: return "DegenerateSubdifferential";
    case ErrorCode::NoAdmissibleSlope: return "NoAdmissibleSlope";
    case ErrorCode::DimensionTooLow: return "DimensionTooLow";
    case ErrorCode::PlanNotMapLike: return "PlanNotMapLike";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace otsurf
