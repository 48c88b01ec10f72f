#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "flatbundle/veech.hpp"
#include "support.hpp"

using namespace flatbundle;

namespace {

const Mat2 kShear{1.0, octagon_shear(), 0.0, 1.0};

VeechGroupData bare_group(const std::vector<Mat2>& gens) {
  VeechGroupData g;
  for (const Mat2& m : gens) g.generators.push_back(AffineAutomorphism{m, {}, {}, 0, 0});
  return g;
}

bool has_point(const std::vector<BoundaryPoint>& pts, BoundaryPoint b, double tol = 1e-9) {
  for (const auto& p : pts)
    if (boundary_gap(p, b) <= tol) return true;
  return false;
}

// Trace scan over reduced words: any word with |trace| = 2 that is not the identity.
bool has_parabolic_word(const std::vector<Mat2>& gens, int depth) {
  for (const Word& w : reduced_words(gens, depth))
    if (classify(w.m) == IsometryKind::Parabolic) return true;
  return false;
}

}  // namespace

TEST_CASE("identity is the trivial automorphism") {
  const auto s = testing::surface("octagon");
  const AffineAutomorphism a = verify_affine(s, Mat2::identity());
  CHECK(max_abs_diff(a.derivative, Mat2::identity()) == 0.0);
  for (std::size_t v = 0; v < a.coneMap.size(); ++v) CHECK(a.coneMap[v] == static_cast<int>(v));
}

TEST_CASE("octagon horizontal multitwist is an affine automorphism") {
  const auto s = testing::surface("octagon");
  const AffineAutomorphism a = verify_affine(s, kShear);
  CHECK(a.derivative.trace() == doctest::Approx(2.0));
  CHECK(classify(a.derivative) == IsometryKind::Parabolic);
  CHECK(verify_affine(s, Mat2::rotation(kPi / 4)).coneMap.size() == s.cone_points().size());
}

TEST_CASE("matrices that are not derivatives are rejected") {
  const auto s = testing::surface("octagon");
  try {
    verify_affine(s, Mat2::diag(2.0, 0.5));
    FAIL("expected NotAnAutomorphism");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAnAutomorphism);
  }
  try {
    verify_affine(s, Mat2::diag(2.0, 2.0));
    FAIL("expected BadDeterminant");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadDeterminant);
  }
  // Half the multitwist shears the cylinders by half their moduli, which does not re-glue.
  CHECK_THROWS_AS(verify_affine(s, {1.0, 0.5 * octagon_shear(), 0.0, 1.0}), Error);
}

TEST_CASE("every catalog generator verifies") {
  for (const auto& id : catalog_group_ids()) {
    CAPTURE(id);
    const GroupPreset g = catalog_group(id);
    const auto s = testing::surface(g.surface);
    for (std::size_t i = 0; i < g.generators.size(); ++i) {
      const auto a = verify_affine(s, g.generators[i], g.hints[i]);
      CHECK(a.derivative.det() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("reduced words") {
  const std::vector<Mat2> gens{kShear, Mat2::rotation(kPi / 4)};
  const auto words = reduced_words(gens, 3);
  // 4 + 4*3 + 4*9 reduced words of length 1..3.
  CHECK(words.size() == 52);
  for (const Word& w : words) {
    Mat2 m = Mat2::identity();
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
      if (i > 0) CHECK((w.letters[i] ^ 1) != w.letters[i - 1]);
      const Mat2& g = gens[static_cast<std::size_t>(w.letters[i] / 2)];
      m = m * (w.letters[i] % 2 ? g.inverse_sl2() : g);
    }
    CHECK(max_abs_diff(m, w.m) <= 1e-9);
  }
}

TEST_CASE("limit set samples") {
  SUBCASE("single parabolic generator") {
    const auto pts = sample_limit_set(bare_group({kShear}), 6);
    REQUIRE(pts.size() == 1);
    CHECK(boundary_gap(pts[0], boundary_of(Direction{0.0})) <= 1e-12);
  }

  SUBCASE("two hyperbolics with crossing axes") {
    const auto gens = catalog_group("octagon-schottky").generators;
    const auto p0 = boundary_fixed_points(gens[0]), p1 = boundary_fixed_points(gens[1]);
    REQUIRE(p0.size() == 2);
    REQUIRE(p1.size() == 2);
    CHECK(geodesics_cross(Geodesic{p0[0], p0[1]}, Geodesic{p1[0], p1[1]}));
    const auto pts = sample_limit_set(bare_group(gens), 8);
    CHECK(pts.size() > 2);
  }

  SUBCASE("monotone in depth") {
    const auto g = bare_group(catalog_group("octagon-cusped").generators);
    for (int d = 2; d < 6; ++d) {
      const auto small = sample_limit_set(g, d), big = sample_limit_set(g, d + 1);
      CHECK(big.size() >= small.size());
      for (const auto& p : small) CHECK(has_point(big, p, 2e-8));
    }
  }
}

TEST_CASE("hulls") {
  SUBCASE("three points give one ideal triangle") {
    const ConvexRegion R = build_hull({BoundaryPoint{0.0}, BoundaryPoint{2.0}, BoundaryPoint{4.0}});
    CHECK(R.sides.size() == 3);
    CHECK(R.contains({0.0}));
    CHECK_FALSE(R.contains({std::polar(0.99, 5.0)}));
  }

  SUBCASE("fewer than three points") {
    CHECK_THROWS_AS(build_hull({BoundaryPoint{0.0}, BoundaryPoint{2.0}}), Error);
  }

  SUBCASE("adding a point enlarges the region") {
    std::vector<BoundaryPoint> pts{{0.0}, {1.5}, {3.0}, {4.5}};
    const ConvexRegion small = build_hull(pts);
    pts.insert(pts.begin() + 2, BoundaryPoint{2.2});
    const ConvexRegion big = build_hull(pts);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> r(0.0, 0.99), a(0.0, kTwoPi);
    int grew = 0;
    for (int i = 0; i < 2000; ++i) {
      const DiskPoint p{std::polar(r(rng), a(rng))};
      if (small.contains(p)) CHECK(big.contains(p));
      if (!small.contains(p) && big.contains(p)) ++grew;
    }
    CHECK(grew > 0);
  }

  SUBCASE("lattice hull fills the disk as depth grows") {
    const auto gens = catalog_group("octagon-lattice").generators;
    double prev = std::numeric_limits<double>::infinity();
    for (int d = 2; d <= 5; ++d) {
      const ConvexRegion R = build_hull(sample_limit_set(bare_group(gens), d));
      double worst = 0.0;
      for (int i = 0; i < 24; ++i)
        for (double r : {0.3, 0.6, 0.9}) {
          const DiskPoint p{std::polar(r, kTwoPi * i / 24)};
          worst = std::max(worst, hyp_distance(p, project_to_region(p, R)));
        }
      CHECK(worst <= prev + 1e-12);
      prev = worst;
    }
    CHECK(prev < 0.05);
  }
}

TEST_CASE("parabolic fixed points") {
  SUBCASE("upper triangular generator fixes the horizontal point") {
    const auto found = find_parabolic_fixed_points(bare_group({kShear, Mat2::rotation(kPi / 4)}), 2);
    bool horizontal = false;
    for (const auto& p : found)
      if (boundary_gap(p.at, boundary_of(Direction{0.0})) <= 1e-12) {
        horizontal = true;
        CHECK(p.witness.letters.size() == 1);
      }
    CHECK(horizontal);
  }

  SUBCASE("purely hyperbolic group has none") {
    const auto gens = catalog_group("octagon-schottky").generators;
    for (int d = 1; d <= 6; ++d) {
      CHECK(find_parabolic_fixed_points(bare_group(gens), d).empty());
      CHECK_FALSE(has_parabolic_word(gens, d));
    }
  }

  SUBCASE("conjugates are found at their word length") {
    const std::vector<Mat2> gens{kShear, Mat2::rotation(kPi / 4)};
    const auto found = find_parabolic_fixed_points(bare_group(gens), 3);
    const Mat2 w = gens[1];
    const BoundaryPoint expected = act(w, boundary_of(Direction{0.0}));
    CHECK(classify(w * kShear * w.inverse_sl2()) == IsometryKind::Parabolic);
    CHECK(has_point([&] {
      std::vector<BoundaryPoint> v;
      for (const auto& p : found) v.push_back(p.at);
      return v;
    }(), expected));
  }
}

TEST_CASE("group data") {
  for (const auto& id : catalog_group_ids()) {
    CAPTURE(id);
    const auto& e = testing::experiment(id);
    CHECK(e.group.limitSample.size() > 2);
    CHECK(e.group.generators.size() == e.preset.generators.size());
    CHECK(std::is_sorted(e.group.limitSample.begin(), e.group.limitSample.end(),
                         [](BoundaryPoint a, BoundaryPoint b) { return a.angle < b.angle; }));
    CHECK(e.group.parabolicFixedPoints.empty() == (id == "octagon-schottky"));
  }
}

TEST_CASE("horoball family") {
  SUBCASE("lattice octagon: horizontal saddles give a ball at the horizontal point") {
    const auto& e = testing::experiment("octagon-lattice");
    const HoroRegion* r = e.family.find(Direction{0.0});
    REQUIRE(r != nullptr);
    CHECK(r->kind == HoroKind::Ball);
    CHECK(boundary_gap(r->ball.base, boundary_of(Direction{0.0})) <= 1e-12);
    CHECK(r->ball.contains(r->anchor, 1e-9));
  }

  SUBCASE("directions outside the hull are points at the projection") {
    for (const char* id : {"octagon-schottky", "octagon-cusped"}) {
      const auto& e = testing::experiment(id);
      const ConvexRegion hull = effective_hull(e.group);
      int points = 0;
      for (const auto& r : e.family.regions) {
        if (r.kind != HoroKind::Point) continue;
        ++points;
        CHECK(r.witness == "outside");
        CHECK(std::abs(r.anchor.z - project_ideal_to_region(boundary_of(r.direction), hull).z) <= 1e-9);
      }
      CHECK(points > 0);
    }
  }

  SUBCASE("one region per direction") {
    for (const auto& id : catalog_group_ids()) {
      const auto& e = testing::experiment(id);
      std::vector<Direction> dirs;
      for (const auto& s : e.saddles) {
        bool seen = false;
        for (const auto& d : dirs) seen = seen || same_direction(d, s.direction, 1e-9);
        if (!seen) dirs.push_back(s.direction);
      }
      CHECK(e.family.regions.size() == dirs.size());
      for (const auto& s : e.saddles) CHECK(e.family.find(s.direction) != nullptr);
    }
  }

  SUBCASE("separation, boundary conditions and equivariance") {
    for (const auto& id : catalog_group_ids()) {
      CAPTURE(id);
      const auto& e = testing::experiment(id);
      const auto& f = e.family;
      CHECK(f.oneThirdViolations == 0);
      CHECK(f.hullDistanceViolations == 0);
      CHECK(f.equivarianceResidual <= 1e-6);
      for (std::size_t i = 0; i < f.regions.size(); ++i)
        for (std::size_t j = i + 1; j < f.regions.size(); ++j)
          if (f.regions[i].kind == HoroKind::Ball && f.regions[j].kind == HoroKind::Ball)
            CHECK(horoball_distance(f.regions[i].ball, f.regions[j].ball) >= 1.0 - 1e-9);
      // Generator images of balls whose image direction is also in the family.
      for (const Mat2& g : e.group.derivatives())
        for (const auto& r : f.regions) {
          if (r.kind != HoroKind::Ball) continue;
          const Horoball img = r.ball.image(g);
          const HoroRegion* other = f.find(direction_of(img.base), 1e-9);
          if (!other || other->kind != HoroKind::Ball) continue;
          CHECK(std::abs(other->ball.radius - img.radius) <= 1e-6);
        }
    }
  }

  SUBCASE("hull drift shrinks with depth") {
    const GroupPreset p = catalog_group("octagon-schottky");
    const auto s = testing::surface(p.surface);
    double prev = kTwoPi;
    for (int d = 3; d <= 6; ++d) {
      const auto g = build_group(s, p.generators, p.hints, d);
      CHECK(g.sampleDrift <= prev + 1e-12);
      prev = g.sampleDrift;
    }
  }
}
