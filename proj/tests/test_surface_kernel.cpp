#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "flatbundle/geodesic.hpp"
#include "oracle_surface.hpp"
#include "support.hpp"

using namespace flatbundle;

namespace {

// Sum of interior polygon angles; every polygon corner ends up at some cone point.
double polygon_angle_sum(const SurfaceDefinition& def) {
  double total = 0.0;
  for (const auto& poly : def.polygons) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = poly[(i + n - 1) % n], cur = poly[i], next = poly[(i + 1) % n];
      total += ccw_angle(next - cur, prev - cur);
    }
  }
  return total;
}

std::vector<Vec2> holonomies(const std::vector<SaddleConnection>& v) {
  std::vector<Vec2> out;
  for (const auto& s : v) out.push_back(s.holonomy);
  return out;
}

SurfaceDefinition unit_torus() {
  return {"torus", {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, {{0, 0, 0, 2}, {0, 1, 0, 3}}};
}

}  // namespace

TEST_CASE("octagon has one 6pi cone point and genus 2") {
  const auto s = testing::surface("octagon");
  REQUIRE(s.cone_points().size() == 1);
  const double expected = polygon_angle_sum(s.definition());
  CHECK(expected == doctest::Approx(6 * kPi).epsilon(1e-12));
  CHECK(s.cone_points()[0].angle == doctest::Approx(expected).epsilon(1e-12));
  CHECK(s.genus() == 2);
  CHECK(s.area() == doctest::Approx(2 * (1 + std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("catalog surfaces satisfy the angle defect identity") {
  for (const auto& id : catalog_surface_ids()) {
    CAPTURE(id);
    const auto s = testing::surface(id);
    double defect = 0.0;
    for (const auto& c : s.cone_points()) defect += c.angle - kTwoPi;
    CHECK(std::abs(defect - kTwoPi * (2 * s.genus() - 2)) <= 1e-9);
    CHECK(std::abs(s.gauss_bonnet_residual()) <= 1e-9);
    CHECK(s.genus() >= 2);
    double sum = 0.0;
    for (const auto& c : s.cone_points()) sum += c.angle;
    CHECK(sum == doctest::Approx(polygon_angle_sum(s.definition())).epsilon(1e-12));
  }
}

TEST_CASE("L-shaped surface has genus 2 and a single 6pi cone point") {
  const auto s = testing::surface("L3");
  CHECK(s.genus() == 2);
  REQUIRE(s.cone_points().size() == 1);
  CHECK(s.cone_points()[0].angle == doctest::Approx(6 * kPi).epsilon(1e-12));
}

TEST_CASE("torus is rejected") {
  try {
    TranslationSurface::load(unit_torus());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GenusTooSmall);
  }
}

TEST_CASE("bad gluings are rejected") {
  SurfaceDefinition unglued = unit_torus();
  unglued.gluings.pop_back();
  SurfaceDefinition mismatched = unit_torus();
  mismatched.polygons[0][2] = {1.0, 2.0};
  mismatched.polygons[0][3] = {0.0, 2.0};
  mismatched.gluings = {{0, 0, 0, 1}, {0, 2, 0, 3}};
  for (const auto& def : {unglued, mismatched}) {
    try {
      TranslationSurface::load(def);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedGluing);
    }
  }
}

TEST_CASE("short octagon saddles are the four side classes") {
  const auto s = testing::surface("octagon");
  EnumerateOptions o;
  o.maxLength = 1.0;
  const auto sc = s.enumerate_saddle_connections(o);
  REQUIRE(sc.size() == 4);
  std::vector<Vec2> expected;
  for (int k = 0; k < 4; ++k) expected.push_back({std::cos(k * kPi / 4), std::sin(k * kPi / 4)});
  CHECK(oracle::same_holonomy_sets(holonomies(sc), expected, 1e-12));
  CHECK(oracle::same_holonomy_sets(oracle::saddle_holonomies(s, 1.0), expected, 1e-12));
}

TEST_CASE("cutoff below the systole gives no saddles") {
  for (const auto& id : catalog_surface_ids()) {
    const auto s = testing::surface(id);
    EnumerateOptions o;
    o.maxLength = 0.5 * s.shortest_edge();
    CHECK(s.enumerate_saddle_connections(o).empty());
  }
}

TEST_CASE("non-positive cutoff is invalid") {
  EnumerateOptions o;
  o.maxLength = 0.0;
  CHECK_THROWS_AS(testing::surface("octagon").enumerate_saddle_connections(o), Error);
}

TEST_CASE("enumeration equals the unfolding oracle up to length 4") {
  for (const auto& id : catalog_surface_ids()) {
    CAPTURE(id);
    const auto s = testing::surface(id);
    for (double L : {3.0, 4.0}) {
      EnumerateOptions o;
      o.maxLength = L;
      const auto mine = holonomies(s.enumerate_saddle_connections(o));
      const auto ref = oracle::saddle_holonomies(s, L);
      CHECK(mine.size() == ref.size());
      CHECK(oracle::same_holonomy_sets(mine, ref, 1e-9));
    }
  }
}

TEST_CASE("saddle crossings re-develop to their holonomy") {
  for (const auto& id : catalog_surface_ids()) {
    const auto s = testing::surface(id);
    EnumerateOptions o;
    o.maxLength = 4.0;
    for (const auto& sc : s.enumerate_saddle_connections(o)) {
      CHECK(sc.length > 0.0);
      CHECK(sc.length == doctest::Approx(sc.holonomy.norm()).epsilon(1e-15));
      CHECK((develop(s, sc.startCorner, sc.crossings, sc.endCorner) - sc.holonomy).norm() <= 1e-9);
      SaddleConnection again;
      REQUIRE(s.trace_saddle(sc.start, sc.startCone, sc.holonomy, &again));
      CHECK(again.end == sc.end);
    }
  }
}

TEST_CASE("directions live in [0, pi)") {
  CHECK(Direction::of({-1.0, 0.0}).theta == doctest::Approx(0.0));
  CHECK(Direction::of({0.0, -1.0}).theta == doctest::Approx(kPi / 2));
  CHECK(same_direction(Direction::of({1, 1}), Direction::of({-2, -2})));
  CHECK_FALSE(same_direction(Direction::of({1, 1}), Direction::of({1, 1.001})));
}

TEST_CASE("flat geodesics") {
  auto& e = testing::experiment("octagon-lattice");
  const auto& s = e.surface;

  SUBCASE("identical endpoints") {
    const Lift a = lift_of_corner(s, {0, 0});
    const auto g = flat_geodesic(s, a, a);
    CHECK(g.pieces.empty());
    CHECK(g.totalLength == 0.0);
  }

  SUBCASE("a saddle connection is its own geodesic") {
    for (const auto& sc : e.saddles) {
      const Lift a = lift_of_corner(s, sc.startCorner);
      const auto g = flat_geodesic(s, a, follow(s, a, sc));
      REQUIRE(g.pieces.size() == 1);
      CHECK((g.pieces[0].holonomy - sc.holonomy).norm() <= 1e-9);
      CHECK(g.totalLength == doctest::Approx(sc.length).epsilon(1e-12));
    }
  }

  SUBCASE("local condition, triangle inequality and chord bound") {
    std::mt19937_64 rng(7);
    int multi = 0;
    for (int i = 0; i < 200; ++i) {
      const Lift a = random_lift(e.model, 2, rng), b = random_lift(e.model, 3, rng), c = random_lift(e.model, 2, rng);
      const auto ab = flat_geodesic(s, a, b), bc = flat_geodesic(s, b, c), ac = flat_geodesic(s, a, c);
      CHECK(ac.totalLength <= ab.totalLength + bc.totalLength + 1e-9);
      for (const auto& angles : ab.junctionAngles) {
        CHECK(angles[0] >= kPi - 1e-9);
        CHECK(angles[1] >= kPi - 1e-9);
      }
      double sum = 0.0;
      for (const auto& p : ab.pieces) sum += p.length;
      CHECK(sum == doctest::Approx(ab.totalLength).epsilon(1e-12));
      const double chord = (lift_position(s, b) - lift_position(s, a)).norm();
      CHECK(ab.totalLength >= chord - 1e-9);
      if (ab.pieces.size() >= 2) {
        ++multi;
        // Each piece is a genuine saddle connection on the surface.
        for (const auto& p : ab.pieces) {
          SaddleConnection again;
          CHECK(s.trace_saddle(p.start, p.startCone, p.holonomy, &again));
        }
      }
    }
    CHECK(multi > 0);
  }
}
