#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flatbundle/dichotomy.hpp"
#include "flatbundle/disk.hpp"
#include "flatbundle/geodesic.hpp"
#include "flatbundle/veech.hpp"

namespace flatbundle {

// Point of the bundle: a base point of the disk and a cone-point lift in the universal cover.
struct FiberPoint {
  DiskPoint base;
  Lift fiber;
};

// Everything path construction reads; owned elsewhere.
struct BundleModel {
  const TranslationSurface* surface = nullptr;
  const VeechGroupData* group = nullptr;
  const HoroFamily* family = nullptr;
  std::vector<SaddleConnection> pool;                 // enumerated saddles the family was built from
  std::vector<std::optional<BassSerreGraph>> graphs;  // per family region, Balls only
  std::vector<std::vector<double>> spineDistance;      // per region, row-major tree vertex distances
  // Horizontal jumps: nearest anchors per region with collapsed lengths.
  std::vector<std::vector<std::pair<int, double>>> jumps;
  GeodesicOptions geodesic;
};

// Fills the dual graphs of every Ball direction and the jump lists.
void finalize_model(BundleModel& m, double maxTrace, int neighbors = 6);

// A_X A_Y^{-1} hol.
Vec2 fiber_map(DiskPoint X, DiskPoint Y, Vec2 hol);

enum class PieceKind { Horizontal, Saddle };

struct PathPiece {
  PieceKind kind = PieceKind::Horizontal;
  DiskPoint from, to;      // equal for saddle pieces
  Lift lift;               // fiber point of a horizontal piece, start of a saddle piece
  Lift endLift;            // saddle pieces only
  Vec2 devStart, devEnd;   // developed fiber positions
  SaddleConnection saddle; // saddle pieces only, oriented along the path
  int region = -1;         // family region of a saddle piece
  double length = 0.0;     // rho for horizontals, flat length at the base for saddles
};

struct PreferredPath {
  FiberPoint start, end;
  std::vector<PathPiece> pieces;
  double dLength = 0.0;
  double collapsedLength = 0.0;
  double continuityResidual = 0.0;

  int saddle_count() const { return static_cast<int>(pieces.size() / 2); }
};

PreferredPath build_preferred_path(const BundleModel& m, const FiberPoint& x, const FiberPoint& y);
double collapsed_length(const BundleModel& m, const PreferredPath& p);
// Length of the geodesic segment outside every Ball of the family.
double collapsed_horizontal(const HoroFamily& family, DiskPoint p, DiskPoint q);
PreferredPath reversed(const PreferredPath& p);

// Fan: apex plus a bottom geodesic whose junctions are all joined to the apex by single saddles.
struct Fan {
  Lift apex;
  std::vector<Lift> junctions;  // front is the end of the first top side, back the end of the second
  Vec2 apexDev;
  std::vector<Vec2> junctionDev;

  int k() const { return static_cast<int>(junctions.size()) - 1; }
  // Developed Euclidean triangles (apex, junction i-1, junction i).
  std::vector<std::array<Vec2, 3>> triangles() const;
};

Fan make_fan(Vec2 apexDev, const std::vector<Vec2>& junctionDev);
std::vector<Fan> decompose_into_fans(const TranslationSurface& s, const Lift& x, const Lift& y, const Lift& z,
                                     const GeodesicOptions& opt = {});

struct StructureReport {
  bool ordered = false;
  std::vector<double> directions;  // chain of 2k+1 directions in [0, pi)
  std::vector<int> offending;      // gap indices breaking the chain
  double winding = 0.0;            // total ccw turn along the chain, in units of pi
};

StructureReport check_structure_lemma(const Fan& f);

// Euclidean triangle spanned by sigma and a pool member, as holonomies leaving the shared cone point.
struct SpanTriangle {
  int partner = 0;
  Vec2 first, second;
};

std::vector<SpanTriangle> spanning_triangles(const TranslationSurface& s, const SaddleConnection& sigma,
                                             const std::vector<SaddleConnection>& pool, const GeodesicOptions& opt = {});
// Saddles of the pool spanning a triangle with sigma.
std::vector<int> span_set(const TranslationSurface& s, const SaddleConnection& sigma,
                          const std::vector<SaddleConnection>& pool, const GeodesicOptions& opt = {});

// Endpoint of a combinatorial path: a family region (its anchor is the base) and a fiber lift.
struct ComboNode {
  int region = 0;
  Lift fiber;
};

struct ComboPath {
  bool found = false;
  double length = 0.0;
  int jumps = 0;
  int saddles = 0;
  int explored = 0;
};

// Shortest concatenation of horizontal jumps and saddle moves at their regions; saddle moves follow the
// flat geodesic between the two fiber lifts.
ComboPath combinatorial_path(const BundleModel& m, const ComboNode& v, const ComboNode& w, int budget = 200000);

// Sampling helpers shared by the harness and the tests.
Lift random_lift(const BundleModel& m, int steps, std::mt19937_64& rng);
DiskPoint random_base(const BundleModel& m, double radius, std::mt19937_64& rng);

}  // namespace flatbundle
