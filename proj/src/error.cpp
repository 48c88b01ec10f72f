#include "flatbundle/error.hpp"

namespace flatbundle {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::MalformedGluing: return "MalformedGluing";
    case ErrorCode::GenusTooSmall: return "GenusTooSmall";
    case ErrorCode::NonSimplePolygon: return "NonSimplePolygon";
    case ErrorCode::CutoffTooLarge: return "CutoffTooLarge";
    case ErrorCode::BallExceeded: return "BallExceeded";
    case ErrorCode::ZeroHolonomy: return "ZeroHolonomy";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::NotAnAutomorphism: return "NotAnAutomorphism";
    case ErrorCode::BadDeterminant: return "BadDeterminant";
    case ErrorCode::ElementaryGroup: return "ElementaryGroup";
    case ErrorCode::DirectionInsideHullNotParabolic: return "DirectionInsideHullNotParabolic";
    case ErrorCode::PointNotInDecomposition: return "PointNotInDecomposition";
    case ErrorCode::MissingHoroRegion: return "MissingHoroRegion";
    case ErrorCode::NotReducible: return "NotReducible";
    case ErrorCode::UnknownCatalogId: return "UnknownCatalogId";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvariantFailed: return "InvariantFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace flatbundle
