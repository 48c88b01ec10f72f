#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "flatbundle/bundle.hpp"

namespace flatbundle {

// A point of a sampled path in the collapsed model.
struct PathSample {
  DiskPoint base;
  Cx upper;          // base in the upper half-plane
  Mat2 frame;        // A_base
  Vec2 dev;          // developed fiber position
  int region = -1;   // Ball region the sample collapses into, or -1
  int spine = -1;    // tree vertex when collapsed
};

struct SampleOptions {
  double step = 0.05;
  bool collapse = true;
};

std::vector<PathSample> sample_path(const BundleModel& m, const PreferredPath& p, const SampleOptions& opt = {});
// Approximate collapsed distance between two samples.
double sample_distance(const BundleModel& m, const PathSample& a, const PathSample& b);
// Largest distance from a sample of one side to the union of the other two.
double sides_slimness(const BundleModel& m, const std::vector<std::vector<PathSample>>& sides);

double triangle_slimness(const BundleModel& m, const FiberPoint& x, const FiberPoint& y, const FiberPoint& z,
                         const SampleOptions& opt = {});

// Slimness of a Euclidean triangle drawn in the fiber over X (collapse is the identity there).
double euclidean_slimness(DiskPoint X, const std::array<Vec2, 3>& corners, double step = 0.05);

struct FanLemmaResult {
  double delta = 0.0;         // slimness of the fan's triangle
  double furtherDelta = 0.0;  // top sides against the bottom side
  bool applies = false;       // the base lies on the geodesic joining the top sides' regions
  bool furthermoreHolds = false;
};

FanLemmaResult fan_lemma_check(const BundleModel& m, const Fan& f, DiskPoint base, const SampleOptions& opt = {});

// Smallest delta with (x.y)_w >= min((x.z)_w, (y.z)_w) - delta over all quadruples.
double gromov_four_point(int n, const std::function<double(int, int)>& dist);

struct SweepOptions {
  int triangles = 200;
  std::uint64_t seed = 1;
  int liftSteps = 2;
  double baseRadius = 1.5;
  SampleOptions sample;
};

struct SlimnessReport {
  int samples = 0;
  int skipped = 0;              // triangles rejected for missing horo regions
  double deltaMax = 0.0;
  double secondHalfMax = 0.0;
  double halfStepDeltaMax = 0.0;
  double q50 = 0.0, q90 = 0.0, q99 = 0.0;
  std::vector<double> perTriangle;
  std::vector<double> perTriangleHalfStep;
};

SlimnessReport slimness_sweep(const BundleModel& m, const SweepOptions& opt);

}  // namespace flatbundle
