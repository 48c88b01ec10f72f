#include "flatbundle/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace flatbundle {

namespace {

bool same_piece(const SaddleConnection& a, const SaddleConnection& b) {
  return (a.holonomy - b.holonomy).norm() <= 1e-9 && a.start == b.start &&
         std::abs(std::remainder(a.startCone - b.startCone, kTwoPi)) <= 1e-7;
}

SaddleConnection reverse_saddle(const SaddleConnection& sc) {
  SaddleConnection r = sc;
  r.holonomy = -sc.holonomy;
  std::swap(r.start, r.end);
  std::swap(r.startCorner, r.endCorner);
  std::swap(r.startCone, r.endCone);
  r.crossings.clear();
  return r;
}

const HoroRegion& region_for(const HoroFamily& f, Direction d, int* index) {
  const HoroRegion* r = f.find(d);
  if (!r) throw Error(ErrorCode::MissingHoroRegion, "saddle direction has no horo region");
  *index = static_cast<int>(r - f.regions.data());
  return *r;
}

}  // namespace

void finalize_model(BundleModel& m, double maxTrace, int neighbors) {
  const HoroFamily& f = *m.family;
  const std::size_t n = f.regions.size();
  m.graphs.assign(n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.regions[i].kind != HoroKind::Ball) continue;
    const DirectionResult r = trace_direction(*m.surface, f.regions[i].direction, maxTrace);
    if (r.closed) m.graphs[i] = build_bass_serre(*m.surface, r.decomposition);
  }
  m.spineDistance.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    if (!m.graphs[i]) continue;
    const BassSerreGraph& g = *m.graphs[i];
    for (int a = 0; a < g.vertexCount; ++a)
      for (int b = 0; b < g.vertexCount; ++b)
        m.spineDistance[i].push_back(graph_distance(g, GraphPoint{true, a, -1, 0.0}, GraphPoint{true, b, -1, 0.0}));
  }
  m.jumps.assign(n, {});
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) near.push_back({hyp_distance(f.regions[i].anchor, f.regions[j].anchor), j});
    std::sort(near.begin(), near.end());
    // Cyclic neighbors in direction order keep the jump graph connected.
    std::vector<std::size_t> pick;
    if (n > 1) {
      pick.push_back((i + 1) % n);
      pick.push_back((i + n - 1) % n);
    }
    for (std::size_t t = 0; t < near.size() && t < static_cast<std::size_t>(neighbors); ++t) pick.push_back(near[t].second);
    for (std::size_t j : pick) {
      if (j == i || linked[i][j]) continue;
      linked[i][j] = linked[j][i] = true;
      const double w = collapsed_horizontal(f, f.regions[i].anchor, f.regions[j].anchor);
      m.jumps[i].push_back({static_cast<int>(j), w});
      m.jumps[j].push_back({static_cast<int>(i), w});
    }
  }
  for (auto& list : m.jumps) std::sort(list.begin(), list.end());
}

Vec2 fiber_map(DiskPoint X, DiskPoint Y, Vec2 hol) { return section(X) * (section(Y).inverse_sl2() * hol); }

double collapsed_horizontal(const HoroFamily& family, DiskPoint p, DiskPoint q) {
  const double len = hyp_distance(p, q);
  double inside = 0.0;
  for (const HoroRegion& r : family.regions)
    if (r.kind == HoroKind::Ball) inside += horoball_chord(r.ball, p, q);
  return std::max(0.0, len - inside);
}

PreferredPath build_preferred_path(const BundleModel& m, const FiberPoint& x, const FiberPoint& y) {
  const TranslationSurface& s = *m.surface;
  const FlatGeodesic g = flat_geodesic(s, x.fiber, y.fiber, m.geodesic);
  const std::vector<Lift> lifts = geodesic_lifts(s, x.fiber, g);
  PreferredPath p;
  p.start = x;
  p.end = y;
  std::vector<Vec2> dev;
  dev.reserve(lifts.size());
  for (const Lift& l : lifts) dev.push_back(lift_position(s, l));

  DiskPoint at = x.base;
  auto horizontal = [&](DiskPoint to, std::size_t i) {
    PathPiece h;
    h.kind = PieceKind::Horizontal;
    h.from = at;
    h.to = to;
    h.lift = lifts[i];
    h.devStart = h.devEnd = dev[i];
    h.length = hyp_distance(at, to);
    p.pieces.push_back(std::move(h));
    at = to;
  };
  for (std::size_t i = 0; i < g.pieces.size(); ++i) {
    int index = -1;
    const HoroRegion& r = region_for(*m.family, g.pieces[i].direction, &index);
    horizontal(r.anchor, i);
    PathPiece sp;
    sp.kind = PieceKind::Saddle;
    sp.from = sp.to = r.anchor;
    sp.lift = lifts[i];
    sp.endLift = lifts[i + 1];
    sp.devStart = dev[i];
    sp.devEnd = dev[i] + g.pieces[i].holonomy;
    sp.saddle = g.pieces[i];
    sp.region = index;
    sp.length = saddle_length_at(r.anchor, g.pieces[i].holonomy);
    p.pieces.push_back(std::move(sp));
  }
  horizontal(y.base, g.pieces.size());

  for (std::size_t i = 0; i + 1 < p.pieces.size(); ++i) {
    const PathPiece& a = p.pieces[i];
    const PathPiece& b = p.pieces[i + 1];
    const Vec2 redeveloped = lift_position(s, b.lift);
    const double r = std::abs(a.to.z - b.from.z) + (a.devEnd - redeveloped).norm();
    p.continuityResidual = std::max(p.continuityResidual, r);
  }
  for (const PathPiece& piece : p.pieces) p.dLength += piece.length;
  p.collapsedLength = collapsed_length(m, p);
  return p;
}

double collapsed_length(const BundleModel& m, const PreferredPath& p) {
  double total = 0.0;
  for (const PathPiece& piece : p.pieces) {
    if (piece.kind == PieceKind::Horizontal) {
      // A horizontal keeps its fiber point, so a Ball crossing projects to a single tree point.
      total += collapsed_horizontal(*m.family, piece.from, piece.to);
    } else if (m.family->regions[static_cast<std::size_t>(piece.region)].kind == HoroKind::Point) {
      total += piece.length;
    }
  }
  return total;
}

PreferredPath reversed(const PreferredPath& p) {
  PreferredPath r = p;
  std::swap(r.start, r.end);
  std::reverse(r.pieces.begin(), r.pieces.end());
  for (PathPiece& piece : r.pieces) {
    std::swap(piece.from, piece.to);
    std::swap(piece.devStart, piece.devEnd);
    if (piece.kind == PieceKind::Saddle) {
      std::swap(piece.lift, piece.endLift);
      piece.saddle = reverse_saddle(piece.saddle);
    }
  }
  return r;
}

std::vector<std::array<Vec2, 3>> Fan::triangles() const {
  std::vector<std::array<Vec2, 3>> out;
  for (std::size_t i = 1; i < junctionDev.size(); ++i) out.push_back({apexDev, junctionDev[i - 1], junctionDev[i]});
  return out;
}

Fan make_fan(Vec2 apexDev, const std::vector<Vec2>& junctionDev) {
  Fan f;
  f.apexDev = apexDev;
  f.junctionDev = junctionDev;
  f.junctions.resize(junctionDev.size());
  return f;
}

namespace {

struct Side {
  FlatGeodesic g;
  std::vector<Lift> lifts;
};

Side side(const TranslationSurface& s, const Lift& a, const Lift& b, const GeodesicOptions& opt) {
  Side out;
  out.g = flat_geodesic(s, a, b, opt);
  out.lifts = geodesic_lifts(s, a, out.g);
  return out;
}

bool single(const TranslationSurface& s, const Lift& a, const Lift& b, const GeodesicOptions& opt) {
  return flat_geodesic(s, a, b, opt).pieces.size() == 1;
}

Fan fan_of(const TranslationSurface& s, const Lift& apex, const std::vector<Lift>& bottom) {
  Fan f;
  f.apex = apex;
  f.junctions = bottom;
  f.apexDev = lift_position(s, apex);
  for (const Lift& l : bottom) f.junctionDev.push_back(lift_position(s, l));
  return f;
}

// Largest j such that the apex sees junctions 1..j through single saddles.
std::size_t visible_prefix(const TranslationSurface& s, const Lift& apex, const std::vector<Lift>& bottom,
                           const GeodesicOptions& opt) {
  std::size_t j = 0;
  while (j + 1 < bottom.size() && single(s, apex, bottom[j + 1], opt)) ++j;
  return j;
}

}  // namespace

std::vector<Fan> decompose_into_fans(const TranslationSurface& s, const Lift& x, const Lift& y, const Lift& z,
                                     const GeodesicOptions& opt) {
  Lift a, b, c;
  if (single(s, x, z, opt)) {
    a = x, c = z, b = y;
  } else if (single(s, x, y, opt)) {
    a = x, c = y, b = z;
  } else if (single(s, y, z, opt)) {
    a = y, c = z, b = x;
  } else {
    throw Error(ErrorCode::NotReducible, "no side of the triangle is a single saddle connection");
  }
  std::vector<Fan> fans;
  for (int iter = 0; iter < 1000; ++iter) {
    const SaddleConnection ac = flat_geodesic(s, a, c, opt).pieces.at(0);
    Side ab = side(s, a, b, opt), cb = side(s, c, b, opt);
    if (ab.g.pieces.empty() || cb.g.pieces.empty()) return fans;
    if (same_piece(ab.g.pieces[0], ac)) return fans;
    if (same_piece(cb.g.pieces[0], reverse_saddle(ac))) return fans;
    // Strip the common tail at b.
    std::size_t na = ab.g.pieces.size(), nc = cb.g.pieces.size();
    while (na > 0 && nc > 0) {
      const SaddleConnection& pa = ab.g.pieces[na - 1];
      const SaddleConnection& pc = cb.g.pieces[nc - 1];
      if ((pa.holonomy - pc.holonomy).norm() > 1e-9 || std::abs(std::remainder(pa.endCone - pc.endCone, kTwoPi)) > 1e-7)
        break;
      --na, --nc;
    }
    if (na == 0 || nc == 0) return fans;
    ab.lifts.resize(na + 1);
    cb.lifts.resize(nc + 1);

    const std::size_t j = visible_prefix(s, a, cb.lifts, opt);
    if (j >= 1) {
      fans.push_back(fan_of(s, a, std::vector<Lift>(cb.lifts.begin(), cb.lifts.begin() + static_cast<long>(j) + 1)));
      if (j == nc) return fans;
      c = cb.lifts[j];
      continue;
    }
    const std::size_t i = visible_prefix(s, c, ab.lifts, opt);
    if (i >= 1) {
      fans.push_back(fan_of(s, c, std::vector<Lift>(ab.lifts.begin(), ab.lifts.begin() + static_cast<long>(i) + 1)));
      if (i == na) return fans;
      a = c;
      c = ab.lifts[i];
      continue;
    }
    throw Error(ErrorCode::NotReducible, "neither end of the single side sees past its first junction");
  }
  throw Error(ErrorCode::NotReducible, "fan peeling did not terminate");
}

StructureReport check_structure_lemma(const Fan& f) {
  StructureReport rep;
  const std::size_t n = f.junctionDev.size();
  if (n < 2) return rep;
  std::vector<Vec2> bottom = f.junctionDev;
  if (cross(bottom.front() - f.apexDev, bottom.back() - f.apexDev) < 0.0) std::reverse(bottom.begin(), bottom.end());
  const std::size_t k = n - 1;
  // Chain: tau_0 .. tau_k, then sigma_k .. sigma_1.
  std::vector<double>& dir = rep.directions;
  std::vector<bool> strict;
  for (std::size_t i = 0; i <= k; ++i) {
    dir.push_back(Direction::of(bottom[i] - f.apexDev).theta);
    strict.push_back(true);
  }
  for (std::size_t i = k; i >= 1; --i) {
    dir.push_back(Direction::of(bottom[i] - bottom[i - 1]).theta);
    strict.push_back(i == 1);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    double gap = wrap_angle(dir[(i + 1) % dir.size()] - dir[i], kPi);
    if (!strict[i] && gap > kPi - 1e-9) gap = 0.0;
    if (strict[i] && (gap <= 1e-12 || gap >= kPi - 1e-12)) rep.offending.push_back(static_cast<int>(i));
    total += gap;
  }
  rep.winding = total / kPi;
  if (std::abs(rep.winding - 1.0) > 1e-7 && rep.offending.empty()) rep.offending.push_back(-1);
  rep.ordered = rep.offending.empty();
  return rep;
}

std::vector<SpanTriangle> spanning_triangles(const TranslationSurface& s, const SaddleConnection& sigma,
                                             const std::vector<SaddleConnection>& pool, const GeodesicOptions& opt) {
  std::vector<SpanTriangle> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const SaddleConnection& other = pool[i];
    if (same_piece(other, sigma)) continue;
    // Both saddles leave a common lift of the shared cone point.
    for (int mode = 0; mode < 4; ++mode) {
      const bool sFromStart = (mode & 1) == 0, oFromStart = (mode & 2) == 0;
      if ((sFromStart ? sigma.start : sigma.end) != (oFromStart ? other.start : other.end)) continue;
      const Lift p = lift_of_corner(s, sFromStart ? sigma.startCorner : sigma.endCorner);
      const Lift q = sFromStart ? follow(s, p, sigma) : follow_reversed(s, p, sigma);
      const Lift r = oFromStart ? follow(s, p, other) : follow_reversed(s, p, other);
      if (!single(s, q, r, opt)) continue;
      out.push_back({static_cast<int>(i), sFromStart ? sigma.holonomy : -sigma.holonomy,
                     oFromStart ? other.holonomy : -other.holonomy});
    }
  }
  return out;
}

std::vector<int> span_set(const TranslationSurface& s, const SaddleConnection& sigma,
                          const std::vector<SaddleConnection>& pool, const GeodesicOptions& opt) {
  std::vector<int> out;
  for (const SpanTriangle& t : spanning_triangles(s, sigma, pool, opt))
    if (out.empty() || out.back() != t.partner) out.push_back(t.partner);
  return out;
}

ComboPath combinatorial_path(const BundleModel& m, const ComboNode& v, const ComboNode& w, int budget) {
  ComboPath out;
  const HoroFamily& f = *m.family;
  FlatGeodesic g;
  std::vector<int> regionOf;
  try {
    g = flat_geodesic(*m.surface, v.fiber, w.fiber, m.geodesic);
    for (const auto& piece : g.pieces) {
      int index = -1;
      region_for(f, piece.direction, &index);
      regionOf.push_back(index);
    }
  } catch (const Error&) {
    return out;
  }
  const int n = static_cast<int>(f.regions.size());
  const int k = static_cast<int>(g.pieces.size());
  auto id = [&](int r, int i) { return i * n + r; };
  std::vector<double> dist(static_cast<std::size_t>(n) * (k + 1), std::numeric_limits<double>::infinity());
  std::vector<int> jumpsTo(dist.size(), 0), saddlesTo(dist.size(), 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[id(v.region, 0)] = 0.0;
  pq.push({0.0, id(v.region, 0)});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (++out.explored > budget) return out;
    const int r = u % n, i = u / n;
    if (r == w.region && i == k) {
      out.found = true;
      out.length = d;
      out.jumps = jumpsTo[u];
      out.saddles = saddlesTo[u];
      return out;
    }
    auto relax = [&](int to, double cost, bool isJump) {
      if (d + cost < dist[to]) {
        dist[to] = d + cost;
        jumpsTo[to] = jumpsTo[u] + (isJump ? 1 : 0);
        saddlesTo[to] = saddlesTo[u] + (isJump ? 0 : 1);
        pq.push({dist[to], to});
      }
    };
    for (const auto& [r2, cost] : m.jumps[r]) relax(id(r2, i), cost, true);
    if (i < k && regionOf[i] == r) {
      const HoroRegion& reg = f.regions[r];
      const double cost = reg.kind == HoroKind::Ball ? 0.0 : saddle_length_at(reg.anchor, g.pieces[i].holonomy);
      relax(id(r, i + 1), cost, false);
    }
  }
  return out;
}

Lift random_lift(const BundleModel& m, int steps, std::mt19937_64& rng) {
  const TranslationSurface& s = *m.surface;
  Lift l;
  for (int t = 0; t < steps && !m.pool.empty(); ++t) {
    const int v = lift_vertex(s, l);
    std::vector<std::pair<int, bool>> options;
    for (std::size_t i = 0; i < m.pool.size(); ++i) {
      if (m.pool[i].start == v) options.push_back({static_cast<int>(i), true});
      if (m.pool[i].end == v) options.push_back({static_cast<int>(i), false});
    }
    if (options.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const auto [i, forward] = options[pick(rng)];
    l = forward ? follow(s, l, m.pool[static_cast<std::size_t>(i)]) : follow_reversed(s, l, m.pool[static_cast<std::size_t>(i)]);
  }
  return l;
}

DiskPoint random_base(const BundleModel& m, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double phi = kTwoPi * unit(rng);
  const Cx z0 = std::polar(std::tanh(0.5 * r), phi);
  const Cx b = m.family->basepoint.z;
  DiskPoint p{(z0 + b) / (1.0 + std::conj(b) * z0)};
  if (m.group && !m.group->lattice) p = project_to_region(p, effective_hull(*m.group));
  return p;
}

}  // namespace flatbundle
