#pragma once

#include <map>
#include <string>
#include <vector>

#include "flatbundle/disk.hpp"
#include "flatbundle/surface.hpp"

namespace flatbundle {

struct AffineAutomorphism {
  Mat2 derivative;
  std::vector<int> coneMap;  // vertex id -> image vertex id
  // Polygon-edge class -> image class, or -1 when the image edge is not an edge of the polygons.
  std::vector<int> edgeMap;
  int candidate = 0;         // index of the accepted placement among all candidates
  int candidateCount = 0;
};

// Candidate placements are tried in order; hint >= 0 forces one.
AffineAutomorphism verify_affine(const TranslationSurface& s, const Mat2& m, int hint = -1);

// Letters: 2i is generator i, 2i+1 its inverse.
struct Word {
  std::vector<int> letters;
  Mat2 m = Mat2::identity();
  std::string str() const;
};

// Reduced words of length 1..depth in left-greedy order.
std::vector<Word> reduced_words(const std::vector<Mat2>& gens, int depth);

struct ParabolicPoint {
  BoundaryPoint at;
  Word witness;
};

struct VeechGroupData {
  const TranslationSurface* surface = nullptr;
  std::vector<AffineAutomorphism> generators;
  int wordDepth = 0;
  std::vector<BoundaryPoint> limitSample;
  ConvexRegion hull;
  // Declared lattice: the exact hull is the whole disk and horoballs ignore the sampled boundary.
  bool lattice = false;
  std::vector<ParabolicPoint> parabolicFixedPoints;
  // Largest angular gap between a generator image of a sample point and the sample.
  double sampleDrift = 0.0;

  std::vector<Mat2> derivatives() const;
};

VeechGroupData build_group(const TranslationSurface& s, const std::vector<Mat2>& gens,
                           const std::vector<int>& hints, int depth, bool lattice = false);
// Region used for horoball and projection constraints.
ConvexRegion effective_hull(const VeechGroupData& g);

// Fixed points of all hyperbolic and parabolic words up to depth, sorted by angle.
std::vector<BoundaryPoint> sample_limit_set(const VeechGroupData& g, int depth);
ConvexRegion build_hull(const std::vector<BoundaryPoint>& sample);
std::vector<ParabolicPoint> find_parabolic_fixed_points(const VeechGroupData& g, int depth);

// Limit-set cover by generator isometric circles; empty when the circles are not disjoint.
struct PingPong {
  bool valid = false;
  std::vector<std::pair<double, double>> arcs;  // (start angle, ccw width)
  bool certifies_outside(BoundaryPoint b) const;
};
PingPong ping_pong_cover(const std::vector<Mat2>& gens, int level);

enum class HoroKind { Ball, Point };

struct HoroRegion {
  HoroKind kind = HoroKind::Point;
  Direction direction;
  Vec2 shortestHolonomy;
  Horoball ball;             // Ball only
  double lengthLevel = 0.0;  // Ball only
  DiskPoint anchor;          // the point itself, or the boundary point of the ball nearest the hull basepoint
  std::string witness;       // parabolic word (Ball) or "outside"
};

struct HoroballOptions {
  int certificateLevel = 8;
  int samples = 16;
  double directionTol = 1e-8;
};

struct HoroFamily {
  std::vector<HoroRegion> regions;  // sorted by direction
  DiskPoint basepoint;
  double minBallSeparation = 0.0;
  int oneThirdViolations = 0;
  int hullDistanceViolations = 0;
  double equivarianceResidual = 0.0;

  const HoroRegion* find(Direction d, double tol = 1e-8) const;
  std::size_t ball_count() const;
};

HoroFamily build_horoball_family(const VeechGroupData& g, const std::vector<SaddleConnection>& saddles,
                                 const HoroballOptions& opt = {});

}  // namespace flatbundle
