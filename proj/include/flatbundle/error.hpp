#pragma once

#include <stdexcept>
#include <string>

namespace flatbundle {

// Numeric values are part of the C ABI (see flatbundle.h); append only.
enum class ErrorCode : int {
  Ok = 0,
  MalformedGluing = 1,
  GenusTooSmall = 2,
  NonSimplePolygon = 3,
  CutoffTooLarge = 4,
  BallExceeded = 5,
  ZeroHolonomy = 6,
  EmptyRegion = 7,
  DegenerateTriangle = 8,
  NotAnAutomorphism = 9,
  BadDeterminant = 10,
  ElementaryGroup = 11,
  DirectionInsideHullNotParabolic = 12,
  PointNotInDecomposition = 13,
  MissingHoroRegion = 14,
  NotReducible = 15,
  UnknownCatalogId = 16,
  InvalidConfig = 17,
  MissingInput = 18,
  ParseError = 19,
  IoError = 20,
  InvariantFailed = 21,
  Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace flatbundle
