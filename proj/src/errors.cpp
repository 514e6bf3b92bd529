#include "scatterlax/types.hpp"

namespace scatterlax {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingleScatterer: return "SingleScatterer";
    case ErrorCode::CapacitanceUnavailable: return "CapacitanceUnavailable";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::OpenSurface: return "OpenSurface";
    case ErrorCode::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::NonSphereScatterer: return "NonSphereScatterer";
    case ErrorCode::SystemTooLarge: return "SystemTooLarge";
    case ErrorCode::ResonanceRisk: return "ResonanceRisk";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::RankDeficientAmbiguity: return "RankDeficientAmbiguity";
    case ErrorCode::IllConditionedH: return "IllConditionedH";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::TooManyScatterers: return "TooManyScatterers";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadFormat: return "BadFormat";
  }
  return "UnknownError";
}

}  // namespace scatterlax
