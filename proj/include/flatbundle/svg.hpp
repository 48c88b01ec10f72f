#pragma once

#include <string>

#include "flatbundle/bundle.hpp"
#include "flatbundle/dichotomy.hpp"
#include "flatbundle/veech.hpp"

namespace flatbundle {

// All renderers draw on a fixed 1000x1000 canvas and format coordinates with fixed precision.
std::string render_horoballs(const ConvexRegion& hull, const HoroFamily& family);
std::string render_cylinders(const TranslationSurface& s, const CylinderDecomposition& c);
std::string render_ideal_fan(const Fan& f, const ConvexRegion& hull);
std::string render_path(const PreferredPath& p, const ConvexRegion& hull, const HoroFamily& family);

}  // namespace flatbundle
