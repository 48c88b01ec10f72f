#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "flatbundle/bundle.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace flatbundle;

namespace {

DiskPoint random_point(std::mt19937_64& rng, double maxR) {
  std::uniform_real_distribution<double> r(0.0, maxR), a(0.0, kTwoPi);
  return {std::polar(r(rng), a(rng))};
}

FiberPoint random_fiber_point(const Experiment& e, std::mt19937_64& rng) {
  return {random_base(e.model, 1.5, rng), random_lift(e.model, 2, rng)};
}

// One saddle seen from one of its ends: outgoing cone coordinate, holonomy, and the far end.
struct Arm {
  int vertex;
  double out;
  Vec2 hol;
  int farVertex;
  double back;  // cone coordinate at the far end pointing back
};

Arm arm(const SaddleConnection& s, bool fromStart) {
  if (fromStart) return {s.start, s.startCone, s.holonomy, s.end, s.endCone};
  return {s.end, s.endCone, -s.holonomy, s.start, s.startCone};
}

double cone_mod(const TranslationSurface& s, int v, double c) {
  return wrap_angle(c, s.cone_points()[static_cast<std::size_t>(v)].angle);
}

bool cone_close(const TranslationSurface& s, int v, double a, double b) {
  const double period = s.cone_points()[static_cast<std::size_t>(v)].angle;
  const double d = wrap_angle(a - b, period);
  return std::min(d, period - d) <= 1e-7;
}

// With `second` leaving the shared cone point less than pi counterclockwise of `first`, traces the
// closing side from the far end of `first` at the cone coordinate given by the planar corner angle,
// and checks that it lands on the far end of `second` with the matching cone coordinate there.
bool closes_ccw(const TranslationSurface& s, const Arm& first, const Arm& second) {
  const double gap = cone_mod(s, first.vertex, second.out - first.out);
  if (gap <= 1e-9 || gap >= kPi - 1e-9) return false;
  const Vec2 chord = second.hol - first.hol;
  const double atFirst = ccw_angle(chord, -first.hol);
  const double atSecond = ccw_angle(-second.hol, -chord);
  SaddleConnection out;
  if (!s.trace_saddle(first.farVertex, cone_mod(s, first.farVertex, first.back - atFirst), chord, &out)) return false;
  return out.end == second.farVertex && cone_close(s, out.end, out.endCone, second.back + atSecond);
}

std::set<int> span_oracle(const TranslationSurface& s, const SaddleConnection& sigma, const std::vector<SaddleConnection>& pool) {
  std::set<int> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& o = pool[i];
    if ((o.holonomy - sigma.holonomy).norm() <= 1e-9 && o.start == sigma.start &&
        cone_close(s, o.start, o.startCone, sigma.startCone))
      continue;
    for (bool sa : {true, false})
      for (bool oa : {true, false}) {
        const Arm a = arm(sigma, sa), b = arm(o, oa);
        if (a.vertex != b.vertex) continue;
        if (closes_ccw(s, a, b) || closes_ccw(s, b, a)) out.insert(static_cast<int>(i));
      }
  }
  return out;
}

using EdgeKey = std::pair<std::pair<long, long>, std::pair<long, long>>;

EdgeKey edge_key(Vec2 a, Vec2 b) {
  auto q = [](Vec2 v) { return std::pair<long, long>{std::lround(v.x * 1e6), std::lround(v.y * 1e6)}; };
  auto p = q(a), r = q(b);
  if (r < p) std::swap(p, r);
  return {p, r};
}

void toggle(std::map<EdgeKey, int>& parity, Vec2 a, Vec2 b) {
  auto& c = parity[edge_key(a, b)];
  c ^= 1;
}

std::set<EdgeKey> odd_edges(const std::map<EdgeKey, int>& parity) {
  std::set<EdgeKey> out;
  for (const auto& [k, v] : parity)
    if (v) out.insert(k);
  return out;
}

}  // namespace

TEST_CASE("fiber maps") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);

  SUBCASE("identity on the diagonal") {
    const DiskPoint X = random_point(rng, 0.9);
    const Vec2 h{u(rng), u(rng)};
    CHECK((fiber_map(X, X, h) - h).norm() <= 1e-12 * h.norm());
  }

  SUBCASE("composition law and bilipschitz bound") {
    for (int i = 0; i < 500; ++i) {
      const DiskPoint X = random_point(rng, 0.8), Y = random_point(rng, 0.8), Z = random_point(rng, 0.8);
      const Vec2 h{u(rng), u(rng)};
      const Vec2 twice = fiber_map(X, Y, fiber_map(Y, Z, h));
      const Vec2 once = fiber_map(X, Z, h);
      CHECK((twice - once).norm() <= 1e-12 * std::max(1.0, once.norm()));
      const double ratio = fiber_map(X, Y, h).norm() / h.norm();
      const double rho = hyp_distance(X, Y);
      CHECK(ratio <= std::exp(rho) * (1 + 1e-12));
      CHECK(ratio >= std::exp(-rho) * (1 - 1e-12));
    }
  }

  SUBCASE("pure contraction along the diagonal ray") {
    for (double t : {0.5, 1.0, 2.5}) {
      const DiskPoint O{0.0};
      const DiskPoint Y = act(Mat2::diag(std::exp(-t), std::exp(t)), O);
      const double rho = hyp_distance(O, Y);
      CHECK(fiber_map(Y, O, {0.0, 1.0}).norm() == doctest::Approx(std::exp(-0.5 * rho)).epsilon(1e-12));
      CHECK(fiber_map(Y, O, {1.0, 0.0}).norm() == doctest::Approx(std::exp(0.5 * rho)).epsilon(1e-12));
      CHECK(fiber_map(O, Y, {0.0, 1.0}).norm() == doctest::Approx(std::exp(0.5 * rho)).epsilon(1e-12));
    }
  }
}

TEST_CASE("preferred paths") {
  const auto& e = testing::experiment("octagon-cusped");
  const auto& m = e.model;
  std::mt19937_64 rng(43);

  SUBCASE("equal endpoints give a degenerate path") {
    const FiberPoint x = random_fiber_point(e, rng);
    const PreferredPath p = build_preferred_path(m, x, x);
    REQUIRE(p.pieces.size() == 1);
    CHECK(p.dLength == 0.0);
    CHECK(p.collapsedLength == 0.0);
  }

  SUBCASE("one saddle at its own region is the whole path") {
    int checked = 0;
    for (const auto& sc : e.saddles) {
      const HoroRegion* r = e.family.find(sc.direction);
      REQUIRE(r != nullptr);
      const Lift a = lift_of_corner(e.surface, sc.startCorner);
      const PreferredPath p = build_preferred_path(m, {r->anchor, a}, {r->anchor, follow(e.surface, a, sc)});
      REQUIRE(p.pieces.size() == 3);
      CHECK(p.pieces[0].length == 0.0);
      CHECK(p.pieces[2].length == 0.0);
      CHECK(p.dLength == doctest::Approx(saddle_length_at(r->anchor, sc.holonomy)).epsilon(1e-12));
      // A Ball saddle sits in a spine and collapses away.
      if (r->kind == HoroKind::Ball) CHECK(p.collapsedLength == 0.0);
      else CHECK(p.collapsedLength == doctest::Approx(p.dLength).epsilon(1e-12));
      ++checked;
    }
    CHECK(checked > 0);
  }

  SUBCASE("random pairs") {
    int multi = 0, missing = 0;
    for (int i = 0; i < 150; ++i) {
      const FiberPoint x = random_fiber_point(e, rng), y = random_fiber_point(e, rng);
      PreferredPath p;
      try {
        p = build_preferred_path(m, x, y);
      } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::MissingHoroRegion);
        ++missing;
        continue;
      }
      const FlatGeodesic g = flat_geodesic(e.surface, x.fiber, y.fiber, m.geodesic);
      REQUIRE(p.pieces.size() == 2 * g.pieces.size() + 1);
      if (g.pieces.size() > 1) ++multi;
      for (std::size_t k = 0; k < p.pieces.size(); ++k)
        CHECK(p.pieces[k].kind == (k % 2 == 0 ? PieceKind::Horizontal : PieceKind::Saddle));
      CHECK(p.continuityResidual < 1e-9);
      // Re-develop both sides of every junction.
      for (std::size_t k = 0; k + 1 < p.pieces.size(); ++k) {
        CHECK(std::abs(p.pieces[k].to.z - p.pieces[k + 1].from.z) <= 1e-12);
        CHECK((p.pieces[k].devEnd - lift_position(e.surface, p.pieces[k + 1].lift)).norm() < 1e-9);
      }
      CHECK(std::abs(p.pieces.front().from.z - x.base.z) <= 1e-12);
      CHECK(std::abs(p.pieces.back().to.z - y.base.z) <= 1e-12);
      double sum = 0.0;
      for (const auto& piece : p.pieces) sum += piece.length;
      CHECK(p.dLength == doctest::Approx(sum).epsilon(1e-12));
      CHECK(p.collapsedLength <= p.dLength + 1e-12);
      CHECK(reversed(p).dLength == doctest::Approx(p.dLength).epsilon(1e-12));
    }
    CHECK(multi > 0);
    CHECK(missing < 50);
  }
}

TEST_CASE("collapse") {
  SUBCASE("horizontal collapse removes exactly the chords inside balls") {
    const auto& e = testing::experiment("octagon-lattice");
    std::mt19937_64 rng(47);
    int hit = 0;
    for (int i = 0; i < 15; ++i) {
      const DiskPoint p = random_base(e.model, 2.5, rng), q = random_base(e.model, 2.5, rng);
      double inside = 0.0;
      for (const auto& r : e.family.regions)
        if (r.kind == HoroKind::Ball && horoball_chord(r.ball, p, q) > 0.0) inside += oracle::sampled_chord(r.ball, p, q);
      if (inside > 0.0) ++hit;
      CHECK(std::abs(collapsed_horizontal(e.family, p, q) - (hyp_distance(p, q) - inside)) <= 1e-5);
    }
    CHECK(hit > 0);
  }

  SUBCASE("nothing collapses without balls") {
    const auto& e = testing::experiment("octagon-schottky");
    REQUIRE(e.family.ball_count() == 0);
    std::mt19937_64 rng(53);
    int built = 0;
    for (int i = 0; i < 50; ++i) {
      try {
        const PreferredPath p = build_preferred_path(e.model, random_fiber_point(e, rng), random_fiber_point(e, rng));
        CHECK(p.collapsedLength == doctest::Approx(p.dLength).epsilon(1e-12));
        ++built;
      } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::MissingHoroRegion);
      }
    }
    CHECK(built > 10);
  }
}

TEST_CASE("fans") {
  const auto& e = testing::experiment("octagon-cusped");
  const auto& s = e.surface;

  SUBCASE("a Euclidean triangle is one fan with one triangle") {
    const auto tris = spanning_triangles(s, e.saddles[0], e.saddles, e.model.geodesic);
    REQUIRE(!tris.empty());
    const Lift p = lift_of_corner(s, e.saddles[0].startCorner);
    for (const auto& t : tris) {
      const auto& other = e.saddles[static_cast<std::size_t>(t.partner)];
      if ((t.first - e.saddles[0].holonomy).norm() > 1e-12 || (t.second - other.holonomy).norm() > 1e-12) continue;
      const Lift q = follow(s, p, e.saddles[0]), r = follow(s, p, other);
      const auto fans = decompose_into_fans(s, p, q, r, e.model.geodesic);
      REQUIRE(fans.size() == 1);
      CHECK(fans[0].k() == 1);
      CHECK(check_structure_lemma(fans[0]).ordered);
    }
  }

  SUBCASE("parallel bottom saddles pass with equality") {
    const Fan f = make_fan({0.0, 2.0}, {{-2.0, -1.0}, {-1.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
    const StructureReport r = check_structure_lemma(f);
    CHECK(r.ordered);
    CHECK(r.directions.size() == 7);
    CHECK(r.winding == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("a bottom doubling back is rejected") {
    const Fan f = make_fan({0.0, 5.0}, {{-1.0, 0.0}, {1.0, 0.0}, {0.5, -1.0}});
    CHECK_FALSE(check_structure_lemma(f).ordered);
  }

  SUBCASE("random triangles are tiled by ordered fans") {
    std::mt19937_64 rng(59);
    int tiled = 0, notReducible = 0;
    for (int i = 0; i < 150; ++i) {
      // One side is a single pool saddle.
      Lift v[3];
      v[0] = random_lift(e.model, 2, rng);
      v[1] = random_lift(e.model, 3, rng);
      std::vector<const SaddleConnection*> out;
      for (const auto& sc : e.saddles)
        if (sc.start == lift_vertex(s, v[0])) out.push_back(&sc);
      REQUIRE(!out.empty());
      v[2] = follow(s, v[0], *out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)]);
      std::vector<Fan> fans;
      try {
        fans = decompose_into_fans(s, v[0], v[1], v[2], e.model.geodesic);
      } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotReducible);
        ++notReducible;
        continue;
      }
      // Boundary of the union of fan triangles, by edge parity, against the three sides.
      std::map<EdgeKey, int> fromFans, fromSides;
      for (const auto& f : fans) {
        CHECK(check_structure_lemma(f).ordered);
        for (const auto& t : f.triangles())
          for (int k = 0; k < 3; ++k) toggle(fromFans, t[k], t[(k + 1) % 3]);
      }
      for (int k = 0; k < 3; ++k) {
        const Lift& a = v[k];
        const Lift& b = v[(k + 1) % 3];
        const auto g = flat_geodesic(s, a, b, e.model.geodesic);
        const auto lifts = geodesic_lifts(s, a, g);
        for (std::size_t j = 0; j + 1 < lifts.size(); ++j)
          toggle(fromSides, lift_position(s, lifts[j]), lift_position(s, lifts[j + 1]));
      }
      CHECK(odd_edges(fromFans) == odd_edges(fromSides));
      if (!fans.empty()) ++tiled;
    }
    CHECK(tiled > 30);
    CHECK(notReducible < 15);
  }
}

TEST_CASE("span sets") {
  const auto s = testing::surface("octagon");
  EnumerateOptions o;
  o.maxLength = 3.0;
  const auto pool = s.enumerate_saddle_connections(o);
  REQUIRE(pool.size() > 10);

  SUBCASE("a lone saddle spans nothing") {
    CHECK(span_set(s, pool[0], {pool[0]}).empty());
  }

  SUBCASE("matches the cone-coordinate oracle") {
    for (const auto& sigma : pool) {
      if (sigma.length > 1.0 + 1e-9) continue;
      const auto got = span_set(s, sigma, pool);
      CHECK(std::set<int>(got.begin(), got.end()) == span_oracle(s, sigma, pool));
      CHECK(!got.empty());
    }
  }

  SUBCASE("symmetry") {
    std::vector<std::set<int>> sets;
    for (const auto& sigma : pool) {
      const auto v = span_set(s, sigma, pool);
      sets.emplace_back(v.begin(), v.end());
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (int j : sets[i]) CHECK(sets[static_cast<std::size_t>(j)].count(static_cast<int>(i)) == 1);
  }
}

TEST_CASE("combinatorial paths") {
  const auto& e = testing::experiment("octagon-cusped");
  const auto& m = e.model;
  const int n = static_cast<int>(e.family.regions.size());
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> pick(0, n - 1);

  SUBCASE("equal endpoints") {
    const ComboNode v{pick(rng), random_lift(m, 2, rng)};
    const ComboPath p = combinatorial_path(m, v, v);
    CHECK(p.found);
    CHECK(p.length == 0.0);
    CHECK(p.jumps == 0);
    CHECK(p.saddles == 0);
  }

  SUBCASE("shortest over the layered move graph") {
    int found = 0;
    for (int i = 0; i < 40; ++i) {
      const ComboNode v{pick(rng), random_lift(m, 2, rng)}, w{pick(rng), random_lift(m, 2, rng)};
      const ComboPath p = combinatorial_path(m, v, w);
      if (!p.found) continue;
      ++found;
      const FlatGeodesic g = flat_geodesic(e.surface, v.fiber, w.fiber, m.geodesic);
      const int k = static_cast<int>(g.pieces.size());
      CHECK(p.saddles == k);
      std::vector<std::tuple<int, int, double>> edges;
      for (int layer = 0; layer <= k; ++layer) {
        for (int r = 0; r < n; ++r)
          for (const auto& [r2, w2] : m.jumps[static_cast<std::size_t>(r)]) edges.push_back({layer * n + r, layer * n + r2, w2});
        if (layer == k) continue;
        const HoroRegion* reg = e.family.find(g.pieces[static_cast<std::size_t>(layer)].direction);
        REQUIRE(reg != nullptr);
        const int r = static_cast<int>(reg - e.family.regions.data());
        const double cost = reg->kind == HoroKind::Ball ? 0.0 : saddle_length_at(reg->anchor, g.pieces[static_cast<std::size_t>(layer)].holonomy);
        edges.push_back({layer * n + r, (layer + 1) * n + r, cost});
      }
      const auto d = oracle::all_pairs((k + 1) * n, edges);
      CHECK(p.length == doctest::Approx(d[static_cast<std::size_t>(v.region)][static_cast<std::size_t>(k * n + w.region)]).epsilon(1e-9));
    }
    CHECK(found > 10);
  }
}
