#pragma once

#include <array>
#include <complex>
#include <vector>

#include "flatbundle/surface.hpp"
#include "flatbundle/vec2.hpp"

namespace flatbundle {

using Cx = std::complex<double>;

struct DiskPoint {
  Cx z{0.0, 0.0};
};

// Point of the unit circle, angle in [0, 2pi).
struct BoundaryPoint {
  double angle = 0.0;
  Cx z() const { return std::polar(1.0, angle); }
};

// Direction theta corresponds to the boundary angle -2 theta (horizontal is angle 0).
BoundaryPoint boundary_of(Direction d);
Direction direction_of(BoundaryPoint b);
double boundary_gap(BoundaryPoint a, BoundaryPoint b);

Cx disk_to_upper(Cx z);
Cx upper_to_disk(Cx w);

// Curvature -1 metric on the disk.
double hyp_distance(DiskPoint p, DiskPoint q);
// Metric in which the diagonal flow diag(e^t, e^-t) has unit speed; half of hyp_distance.
double teichmuller_distance(DiskPoint p, DiskPoint q);

// Upper-triangular positive-diagonal representative A_X with A_X^{-1}(i) = X.
Mat2 section(DiskPoint X);
DiskPoint point_of_section(const Mat2& A);
double saddle_length_at(DiskPoint X, Vec2 hol);

struct CMat {
  Cx a, b, c, d;
  Cx operator()(Cx z) const { return (a * z + b) / (c * z + d); }
  CMat operator*(const CMat& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  CMat inverse() const { return {d, -b, -c, a}; }
};

// Disk form (SU(1,1) up to scale) of an SL2(R) element acting on the upper half-plane.
CMat disk_form(const Mat2& m);
DiskPoint act(const Mat2& m, DiskPoint p);
BoundaryPoint act(const Mat2& m, BoundaryPoint b);

enum class IsometryKind { Elliptic, Parabolic, Hyperbolic, Identity };
// Trace tolerance is scaled by max(1, |m|^2), capped at 1e-3, so long words are classified stably.
IsometryKind classify(const Mat2& m, double tol = 1e-9);
// Fixed points on the boundary: one for parabolic, {attracting, repelling} for hyperbolic.
std::vector<BoundaryPoint> boundary_fixed_points(const Mat2& m);

// Oriented geodesic between ideal points; the half-plane on its left is "inside".
struct Geodesic {
  BoundaryPoint a, b;
};

// Sides in cyclic order; no sides means the whole disk.
struct ConvexRegion {
  std::vector<Geodesic> sides;
  bool contains(DiskPoint p, double tol = 1e-12) const;
};

struct IdealTriangle {
  std::array<BoundaryPoint, 3> v;
};

// Orientation-preserving map of the disk onto the upper half-plane sending u1 to 0 and u2 to infinity.
struct HalfPlaneFrame {
  Cx u1, u2, rot;
  static HalfPlaneFrame make(Cx u1, Cx u2);
  Cx to(Cx z) const { return (z - u1) / (z - u2) * rot; }
  Cx from(Cx w) const {
    const Cx v = w / rot;
    return (v * u2 - u1) / (v - 1.0);
  }
};

double distance_to_geodesic(DiskPoint p, const Geodesic& g);
DiskPoint perpendicular_foot(DiskPoint p, const Geodesic& g);
bool geodesics_cross(const Geodesic& g, const Geodesic& h, DiskPoint* at = nullptr);
// Point at hyperbolic distance t from p toward q.
DiskPoint geodesic_point(DiskPoint p, DiskPoint q, double t);
// Point on the geodesic a->b at signed distance s from its point nearest the origin.
DiskPoint point_on_geodesic(const Geodesic& g, double s);

DiskPoint project_to_region(DiskPoint p, const ConvexRegion& R);
// Closest point of R to an ideal point, in the horocyclic sense.
DiskPoint project_ideal_to_region(BoundaryPoint b, const ConvexRegion& R);

DiskPoint ideal_incenter(const IdealTriangle& T);

struct Horoball {
  BoundaryPoint base;
  double radius = 0.0;  // Euclidean radius in the disk

  Cx center() const { return std::polar(1.0 - radius, base.angle); }
  // Point of the horocycle on the diameter through the base point.
  DiskPoint apex() const { return {std::polar(1.0 - 2.0 * radius, base.angle)}; }
  bool contains(DiskPoint p, double tol = 0.0) const;
  Horoball image(const Mat2& m) const;
};

// Sublevel set {X : |A_X v| <= level} for a holonomy v of length `shortest` in direction d.
Horoball horoball_for_level(Direction d, double shortest, double level);
double horoball_level(const Horoball& b, double shortest);

double horoball_distance(const Horoball& b, DiskPoint p);
double horoball_distance(const Horoball& b, const Geodesic& g);
double horoball_distance(const Horoball& b, const Horoball& c);
// Length of the part of the geodesic segment [p, q] inside the horoball.
double horoball_chord(const Horoball& b, DiskPoint p, DiskPoint q);

}  // namespace flatbundle
