#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "flatbundle/error.hpp"
#include "flatbundle/vec2.hpp"

namespace flatbundle {

// Polygons are listed counterclockwise; gluing {p, e, p2, e2} identifies edge e of
// polygon p (from vertex e to e+1) with edge e2 of polygon p2 by a translation.
struct SurfaceDefinition {
  std::string name;
  std::vector<std::vector<Vec2>> polygons;
  std::vector<std::array<int, 4>> gluings;
};

struct Corner {
  int tri = -1;
  int k = 0;
  bool operator==(const Corner&) const = default;
};

// Leaving triangle `tri` through its edge `edge`.
struct Crossing {
  int tri = -1;
  int edge = 0;
  bool operator==(const Crossing&) const = default;
};

struct Triangle {
  std::array<Vec2, 3> p{};
  std::array<int, 3> nbr{};
  std::array<int, 3> nbrEdge{};
  // Added to neighbor coordinates to place the neighbor in this frame.
  std::array<Vec2, 3> shift{};
  std::array<int, 3> vertex{};
  std::array<double, 3> angle{};
  // Cone coordinate of the direction of edge k, measured at corner k.
  std::array<double, 3> coneStart{};
  int polygon = -1;
  std::array<int, 3> polygonEdge{-1, -1, -1};

  Vec2 edge(int k) const { return p[(k + 1) % 3] - p[k]; }
};

struct ConePoint {
  int id = 0;
  double angle = 0.0;
  // Absolute planar angle of cone coordinate 0.
  double baseAngle = 0.0;
  // Corners in counterclockwise order, starting at cone coordinate 0.
  std::vector<Corner> cycle;
};

struct Direction {
  double theta = 0.0;  // in [0, pi)

  static Direction of(Vec2 v);
  static Direction from_angle(double a);
  Vec2 unit() const { return {std::cos(theta), std::sin(theta)}; }
};

// Angular distance between directions in RP^1.
double direction_gap(Direction a, Direction b);
inline bool same_direction(Direction a, Direction b, double tol = 1e-10) { return direction_gap(a, b) <= tol; }

struct SaddleConnection {
  Vec2 holonomy;
  int start = 0;
  int end = 0;
  double length = 0.0;
  Direction direction;
  Corner startCorner;
  std::vector<Crossing> crossings;
  Corner endCorner;
  double startCone = 0.0;  // outgoing cone coordinate at start
  double endCone = 0.0;    // cone coordinate at end pointing back along the connection
};

struct RaySegment {
  int tri;
  Vec2 offset;  // developed = triangle coordinates + offset
  double tIn;
  double tOut;
};

struct RayResult {
  bool hitVertex = false;
  double distance = 0.0;
  Corner endCorner;        // valid when hitVertex
  std::vector<Crossing> crossings;
  int lastTri = -1;
  Vec2 lastOffset;
  bool stopped = false;    // visitor requested stop
};

// Return true to stop the walk.
using RayVisitor = std::function<bool(const RaySegment&)>;

struct EnumerateOptions {
  double maxLength = 1.0;
  std::size_t workBudget = 20'000'000;
};

class TranslationSurface {
 public:
  static TranslationSurface load(const SurfaceDefinition& def);

  const std::string& name() const { return name_; }
  const SurfaceDefinition& definition() const { return def_; }
  const std::vector<Triangle>& triangles() const { return tris_; }
  const Triangle& tri(int t) const { return tris_[static_cast<std::size_t>(t)]; }
  const std::vector<ConePoint>& cone_points() const { return cones_; }
  double area() const { return area_; }
  int genus() const { return genus_; }
  double shortest_edge() const { return shortestEdge_; }
  // Signed residual of the angle-defect identity.
  double gauss_bonnet_residual() const;

  Corner next_ccw(Corner c) const;
  Corner next_cw(Corner c) const;
  Vec2 position(Corner c) const { return tri(c.tri).p[c.k]; }

  // Cone coordinate in [0, coneAngle) of the planar direction u taken inside corner c.
  double cone_coordinate(Corner c, Vec2 u) const;
  // Corner whose sector [start, start + angle) contains the cone coordinate.
  Corner corner_at(int vertex, double cone) const;
  // Planar direction of a cone coordinate at a vertex.
  Vec2 direction_at(int vertex, double cone) const;
  // Cone coordinates at a vertex whose planar direction is the given angle.
  std::vector<double> prongs(int vertex, double planarAngle) const;

  RayResult trace_from_corner(Corner c, Vec2 dir, double maxLen, const RayVisitor& visit = {}) const;
  RayResult trace_from_point(int t, Vec2 pos, Vec2 dir, double maxLen, const RayVisitor& visit = {}) const;
  // Trace a saddle connection leaving `vertex` at cone coordinate `cone` with the given holonomy.
  // Returns false if the straight segment hits a vertex early or misses the endpoint.
  bool trace_saddle(int vertex, double cone, Vec2 holonomy, SaddleConnection* out) const;

  std::vector<SaddleConnection> enumerate_saddle_connections(const EnumerateOptions& opt) const;

 private:
  RayResult walk(int t, int entryEdge, Vec2 off, Vec2 origin, Vec2 dir, double maxLen,
                 const RayVisitor& visit, RayResult res) const;
  SaddleConnection make_saddle(Corner start, Vec2 hol, std::vector<Crossing> crossings, Corner end) const;

  std::string name_;
  SurfaceDefinition def_;
  std::vector<Triangle> tris_;
  std::vector<ConePoint> cones_;
  double area_ = 0.0;
  int genus_ = 0;
  double shortestEdge_ = 0.0;
};

Vec2 develop(const TranslationSurface& s, Corner start, const std::vector<Crossing>& crossings, Corner end);
bool saddle_less(const SaddleConnection& a, const SaddleConnection& b);

}  // namespace flatbundle
