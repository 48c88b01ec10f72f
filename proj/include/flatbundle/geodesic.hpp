#pragma once

#include <string>
#include <vector>

#include "flatbundle/surface.hpp"

namespace flatbundle {

// A cone point of the universal cover: the vertex at corner `k` of the triangle reached
// from triangle 0 by crossing `sleeve`.
struct Lift {
  std::vector<Crossing> sleeve;
  int k = 0;
};

struct GeodesicOptions {
  double radius = 80.0;             // largest geodesic length realized
  std::size_t maxCrossings = 20000;  // largest combined sleeve
};

struct FlatGeodesic {
  // Oriented along the geodesic: holonomy points from the previous junction to the next.
  std::vector<SaddleConnection> pieces;
  std::vector<Vec2> points;     // developed junctions, points[0] = origin
  std::vector<int> vertices;    // vertex class at each junction
  // Angles on the two sides at each interior junction.
  std::vector<std::array<double, 2>> junctionAngles;
  double totalLength = 0.0;
};

int lift_triangle(const TranslationSurface& s, const Lift& l);
int lift_vertex(const TranslationSurface& s, const Lift& l);
std::vector<Crossing> reverse_crossings(const TranslationSurface& s, const std::vector<Crossing>& c);
void reduce_crossings(const TranslationSurface& s, std::vector<Crossing>& c);

// Lift of the vertex at corner `c` seen from triangle 0 through the shortest dual path.
Lift lift_of_corner(const TranslationSurface& s, Corner c);
// Endpoint of a saddle connection (oriented by `holonomy`) started at lift `from`.
Lift follow(const TranslationSurface& s, const Lift& from, const SaddleConnection& sc);
// Same, for a saddle traversed backwards (from its end to its start).
Lift follow_reversed(const TranslationSurface& s, const Lift& from, const SaddleConnection& sc);
// Planar position of a lift in the development of triangle 0.
Vec2 lift_position(const TranslationSurface& s, const Lift& l);

FlatGeodesic flat_geodesic(const TranslationSurface& s, const Lift& a, const Lift& b,
                           const GeodesicOptions& opt = {});
// Junction lifts of a geodesic started at `a` (front = a, back = endpoint).
std::vector<Lift> geodesic_lifts(const TranslationSurface& s, const Lift& a, const FlatGeodesic& g);
// Canonical key of a lift: its geodesic from the base lift.
std::string lift_key(const TranslationSurface& s, const Lift& l, const GeodesicOptions& opt = {});

}  // namespace flatbundle
