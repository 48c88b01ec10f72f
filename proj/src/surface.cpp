#include "flatbundle/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace flatbundle {

namespace {

constexpr double kHitTol = 1e-9;

double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
  auto on_seg = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 &&
           std::min(p.y, q.y) - 1e-12 <= r.y && r.y <= std::max(p.y, q.y) + 1e-12;
  };
  const double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  const double eps = 1e-14;
  if (std::abs(d1) <= eps && on_seg(c, d, a)) return true;
  if (std::abs(d2) <= eps && on_seg(c, d, b)) return true;
  if (std::abs(d3) <= eps && on_seg(a, b, c)) return true;
  if (std::abs(d4) <= eps && on_seg(a, b, d)) return true;
  return false;
}

void check_simple(const std::vector<Vec2>& poly, int index) {
  const std::size_t n = poly.size();
  auto fail = [index](const std::string& why) {
    throw Error(ErrorCode::NonSimplePolygon, "polygon " + std::to_string(index) + ": " + why);
  };
  if (n < 3) fail("fewer than 3 vertices");
  for (std::size_t i = 0; i < n; ++i)
    if ((poly[(i + 1) % n] - poly[i]).norm() <= 1e-14) fail("zero-length edge");
  if (signed_area(poly) <= 0.0) fail("not positively oriented");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_touch(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) fail("self-intersecting");
    }
  }
}

bool point_in_closed_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  const double eps = 1e-13;
  return cross(b - a, p - a) >= -eps && cross(c - b, p - b) >= -eps && cross(a - c, p - c) >= -eps;
}

// Ear clipping; returns index triples into poly, each counterclockwise.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly, int index) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> out;
  while (idx.size() > 3) {
    bool clipped = false;
    const std::size_t m = idx.size();
    for (std::size_t i = 0; i < m && !clipped; ++i) {
      const int a = idx[(i + m - 1) % m], b = idx[i], c = idx[(i + 1) % m];
      const Vec2 pa = poly[a], pb = poly[b], pc = poly[c];
      if (cross(pb - pa, pc - pb) <= 1e-12 * (pb - pa).norm() * (pc - pb).norm()) continue;
      bool blocked = false;
      for (int q : idx) {
        if (q == a || q == b || q == c) continue;
        if (point_in_closed_triangle(poly[q], pa, pb, pc)) { blocked = true; break; }
      }
      if (blocked) continue;
      out.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
    }
    if (!clipped) throw Error(ErrorCode::NonSimplePolygon, "polygon " + std::to_string(index) + ": cannot triangulate");
  }
  const Vec2 pa = poly[idx[0]], pb = poly[idx[1]], pc = poly[idx[2]];
  if (cross(pb - pa, pc - pa) <= 0.0)
    throw Error(ErrorCode::NonSimplePolygon, "polygon " + std::to_string(index) + ": degenerate remainder");
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

double triangle_angle(Vec2 at, Vec2 a, Vec2 b) { return ccw_angle(a - at, b - at); }

}  // namespace

Direction Direction::of(Vec2 v) { return from_angle(v.angle()); }

Direction Direction::from_angle(double a) {
  double t = wrap_angle(a, kPi);
  if (kPi - t < 1e-15) t = 0.0;
  return {t};
}

double direction_gap(Direction a, Direction b) {
  const double d = std::abs(a.theta - b.theta);
  return std::min(d, kPi - d);
}

TranslationSurface TranslationSurface::load(const SurfaceDefinition& def) {
  TranslationSurface s;
  s.name_ = def.name;
  s.def_ = def;
  const int np = static_cast<int>(def.polygons.size());
  if (np == 0) throw Error(ErrorCode::MalformedGluing, "no polygons");
  for (int p = 0; p < np; ++p) check_simple(def.polygons[p], p);

  // Gluing table.
  std::map<std::pair<int, int>, std::pair<int, int>> partner;
  for (const auto& g : def.gluings) {
    for (int side = 0; side < 2; ++side) {
      const int p = g[2 * side], e = g[2 * side + 1];
      if (p < 0 || p >= np || e < 0 || e >= static_cast<int>(def.polygons[p].size()))
        throw Error(ErrorCode::MalformedGluing, "gluing refers to a missing edge");
    }
    const auto a = std::make_pair(g[0], g[1]);
    const auto b = std::make_pair(g[2], g[3]);
    if (a == b) throw Error(ErrorCode::MalformedGluing, "edge glued to itself");
    if (partner.count(a) || partner.count(b)) throw Error(ErrorCode::MalformedGluing, "edge glued twice");
    partner[a] = b;
    partner[b] = a;
    auto edge_vec = [&](std::pair<int, int> pe) {
      const auto& poly = def.polygons[pe.first];
      return poly[(pe.second + 1) % poly.size()] - poly[pe.second];
    };
    const Vec2 va = edge_vec(a), vb = edge_vec(b);
    if ((va + vb).norm() > 1e-12 * std::max(va.norm(), vb.norm()))
      throw Error(ErrorCode::MalformedGluing, "glued edges are not parallel translates of equal length");
  }
  for (int p = 0; p < np; ++p)
    for (int e = 0; e < static_cast<int>(def.polygons[p].size()); ++e)
      if (!partner.count({p, e}))
        throw Error(ErrorCode::MalformedGluing,
                    "edge " + std::to_string(e) + " of polygon " + std::to_string(p) + " is unpaired");

  // Triangulate.
  std::map<std::pair<int, int>, std::pair<int, int>> polyEdgeToTri;
  for (int p = 0; p < np; ++p) {
    const auto& poly = def.polygons[p];
    const int n = static_cast<int>(poly.size());
    std::map<std::pair<int, int>, std::pair<int, int>> diagonals;
    for (const auto& tri : ear_clip(poly, p)) {
      Triangle T;
      T.polygon = p;
      const int t = static_cast<int>(s.tris_.size());
      for (int k = 0; k < 3; ++k) T.p[k] = poly[tri[k]];
      s.tris_.push_back(T);
      for (int k = 0; k < 3; ++k) {
        const int i = tri[k], j = tri[(k + 1) % 3];
        if ((i + 1) % n == j) {
          s.tris_[t].polygonEdge[k] = i;
          polyEdgeToTri[{p, i}] = {t, k};
        } else {
          const auto key = std::make_pair(std::min(i, j), std::max(i, j));
          auto it = diagonals.find(key);
          if (it == diagonals.end()) {
            diagonals[key] = {t, k};
          } else {
            const auto [t2, k2] = it->second;
            s.tris_[t].nbr[k] = t2;
            s.tris_[t].nbrEdge[k] = k2;
            s.tris_[t].shift[k] = {0.0, 0.0};
            s.tris_[t2].nbr[k2] = t;
            s.tris_[t2].nbrEdge[k2] = k;
            s.tris_[t2].shift[k2] = {0.0, 0.0};
          }
        }
      }
    }
  }
  for (const auto& [pe, other] : partner) {
    const auto [t, k] = polyEdgeToTri.at(pe);
    const auto [t2, k2] = polyEdgeToTri.at(other);
    Triangle& T = s.tris_[t];
    T.nbr[k] = t2;
    T.nbrEdge[k] = k2;
    T.shift[k] = T.p[k] - s.tris_[t2].p[(k2 + 1) % 3];
  }
  for (auto& T : s.tris_)
    for (int k = 0; k < 3; ++k) T.angle[k] = triangle_angle(T.p[k], T.p[(k + 1) % 3], T.p[(k + 2) % 3]);

  // Vertex classes by walking corner cycles.
  const int nt = static_cast<int>(s.tris_.size());
  for (auto& T : s.tris_) T.vertex = {-1, -1, -1};
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      if (s.tris_[t].vertex[k] >= 0) continue;
      ConePoint cp;
      cp.id = static_cast<int>(s.cones_.size());
      cp.baseAngle = wrap_angle(s.tris_[t].edge(k).angle());
      Corner c{t, k};
      double acc = 0.0;
      do {
        Triangle& T = s.tris_[c.tri];
        T.vertex[c.k] = cp.id;
        T.coneStart[c.k] = acc;
        acc += T.angle[c.k];
        cp.cycle.push_back(c);
        c = s.next_ccw(c);
        if (cp.cycle.size() > static_cast<std::size_t>(3 * nt)) throw Error(ErrorCode::MalformedGluing, "corner cycle does not close");
      } while (!(c == Corner{t, k}));
      cp.angle = acc;
      const double turns = acc / kTwoPi;
      if (std::abs(turns - std::round(turns)) > 1e-9 || std::round(turns) < 1)
        throw Error(ErrorCode::MalformedGluing, "vertex angle is not a multiple of 2pi");
      s.cones_.push_back(cp);
    }
  }

  s.area_ = 0.0;
  for (const auto& poly : def.polygons) s.area_ += signed_area(poly);
  const int V = static_cast<int>(s.cones_.size());
  const int F = nt;
  const int E = 3 * nt / 2;
  const int chi = V - E + F;
  s.genus_ = (2 - chi) / 2;
  s.shortestEdge_ = 1e300;
  for (const auto& T : s.tris_)
    for (int k = 0; k < 3; ++k) s.shortestEdge_ = std::min(s.shortestEdge_, T.edge(k).norm());
  if (s.genus_ < 2)
    throw Error(ErrorCode::GenusTooSmall, "genus " + std::to_string(s.genus_) + " < 2");
  if (std::abs(s.gauss_bonnet_residual()) > 1e-9)
    throw Error(ErrorCode::InvariantFailed, "angle defects do not match the Euler characteristic");
  return s;
}

double TranslationSurface::gauss_bonnet_residual() const {
  double defect = 0.0;
  for (const auto& c : cones_) defect += c.angle - kTwoPi;
  return defect - kTwoPi * (2.0 * genus_ - 2.0);
}

Corner TranslationSurface::next_ccw(Corner c) const {
  const Triangle& T = tri(c.tri);
  const int e = (c.k + 2) % 3;
  return {T.nbr[e], T.nbrEdge[e]};
}

Corner TranslationSurface::next_cw(Corner c) const {
  const Triangle& T = tri(c.tri);
  return {T.nbr[c.k], (T.nbrEdge[c.k] + 1) % 3};
}

double TranslationSurface::cone_coordinate(Corner c, Vec2 u) const {
  const Triangle& T = tri(c.tri);
  double a = ccw_angle(T.edge(c.k), u);
  if (a > T.angle[c.k] + 0.5 * (kTwoPi - T.angle[c.k])) a = 0.0;
  const double K = cones_[T.vertex[c.k]].angle;
  double cone = wrap_angle(T.coneStart[c.k] + a, K);
  if (K - cone < 1e-13) cone = 0.0;
  return cone;
}

Corner TranslationSurface::corner_at(int vertex, double cone) const {
  const ConePoint& cp = cones_[vertex];
  cone = wrap_angle(cone, cp.angle);
  if (cp.angle - cone < 1e-12) return cp.cycle.front();
  for (const Corner& c : cp.cycle) {
    const Triangle& T = tri(c.tri);
    if (cone < T.coneStart[c.k] + T.angle[c.k] - 1e-12) return c;
  }
  return cp.cycle.front();
}

Vec2 TranslationSurface::direction_at(int vertex, double cone) const {
  const double a = cones_[vertex].baseAngle + cone;
  return {std::cos(a), std::sin(a)};
}

std::vector<double> TranslationSurface::prongs(int vertex, double planarAngle) const {
  const ConePoint& cp = cones_[vertex];
  const double c0 = wrap_angle(planarAngle - cp.baseAngle);
  const int turns = static_cast<int>(std::lround(cp.angle / kTwoPi));
  std::vector<double> out;
  for (int j = 0; j < turns; ++j) {
    double c = c0 + kTwoPi * j;
    if (cp.angle - c < 1e-12) c = 0.0;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

RayResult TranslationSurface::walk(int t, int e, Vec2 off, Vec2 origin, Vec2 dir, double maxLen,
                                   const RayVisitor& visit, RayResult res) const {
  double tIn = res.distance;
  const std::size_t guard = 1000000;
  for (std::size_t step = 0; step < guard; ++step) {
    const Triangle& T = tri(t);
    const Vec2 w = T.p[(e + 2) % 3] + off;
    const Vec2 rel = w - origin;
    const double s = cross(dir, rel);
    const double along = dot(dir, rel);
    if (std::abs(s) <= kHitTol * std::max(1.0, rel.norm()) && along > 0.0) {
      if (along <= maxLen + kHitTol) {
        if (visit && visit({t, off, tIn, along})) { res.stopped = true; }
        res.hitVertex = true;
        res.distance = along;
        res.endCorner = {t, (e + 2) % 3};
        res.lastTri = t;
        res.lastOffset = off;
        return res;
      }
      if (visit && visit({t, off, tIn, maxLen})) res.stopped = true;
      res.distance = maxLen;
      res.lastTri = t;
      res.lastOffset = off;
      return res;
    }
    const int exitEdge = s > 0.0 ? (e + 1) % 3 : (e + 2) % 3;
    const Vec2 a = T.p[exitEdge] + off;
    const Vec2 b = T.p[(exitEdge + 1) % 3] + off;
    const Vec2 ed = b - a;
    const double den = cross(dir, ed);
    double tOut = den != 0.0 ? cross(a - origin, ed) / den : maxLen;
    tOut = std::max(tOut, tIn);
    if (tOut >= maxLen) {
      if (visit && visit({t, off, tIn, maxLen})) res.stopped = true;
      res.distance = maxLen;
      res.lastTri = t;
      res.lastOffset = off;
      return res;
    }
    if (visit && visit({t, off, tIn, tOut})) {
      res.stopped = true;
      res.distance = tOut;
      res.lastTri = t;
      res.lastOffset = off;
      return res;
    }
    res.crossings.push_back({t, exitEdge});
    off = off + T.shift[exitEdge];
    e = T.nbrEdge[exitEdge];
    t = T.nbr[exitEdge];
    tIn = tOut;
  }
  throw Error(ErrorCode::Internal, "ray walk did not terminate");
}

RayResult TranslationSurface::trace_from_corner(Corner c, Vec2 dir, double maxLen, const RayVisitor& visit) const {
  const Triangle& T = tri(c.tri);
  const Vec2 off = -T.p[c.k];
  RayResult res;
  const Vec2 e1 = T.edge(c.k);
  const Vec2 e2 = T.p[(c.k + 2) % 3] - T.p[c.k];
  auto along_edge = [&](Vec2 e, int endK) -> bool {
    if (std::abs(cross(e, dir)) > kHitTol * std::max(1.0, e.norm()) || dot(e, dir) <= 0.0) return false;
    const double len = dot(e, dir);
    if (len <= maxLen + kHitTol) {
      if (visit && visit({c.tri, off, 0.0, len})) res.stopped = true;
      res.hitVertex = true;
      res.distance = len;
      res.endCorner = {c.tri, endK};
    } else {
      if (visit && visit({c.tri, off, 0.0, maxLen})) res.stopped = true;
      res.distance = maxLen;
    }
    res.lastTri = c.tri;
    res.lastOffset = off;
    return true;
  };
  if (along_edge(e1, (c.k + 1) % 3)) return res;
  if (along_edge(e2, (c.k + 2) % 3)) return res;
  const int exitEdge = (c.k + 1) % 3;
  const Vec2 a = T.p[exitEdge] + off;
  const Vec2 ed = T.edge(exitEdge);
  const double den = cross(dir, ed);
  const double tOut = den != 0.0 ? cross(a, ed) / den : maxLen;
  if (tOut >= maxLen) {
    if (visit && visit({c.tri, off, 0.0, maxLen})) res.stopped = true;
    res.distance = maxLen;
    res.lastTri = c.tri;
    res.lastOffset = off;
    return res;
  }
  if (visit && visit({c.tri, off, 0.0, tOut})) {
    res.stopped = true;
    res.distance = tOut;
    res.lastTri = c.tri;
    res.lastOffset = off;
    return res;
  }
  res.crossings.push_back({c.tri, exitEdge});
  res.distance = tOut;
  return walk(T.nbr[exitEdge], T.nbrEdge[exitEdge], off + T.shift[exitEdge], {0.0, 0.0}, dir, maxLen, visit, res);
}

RayResult TranslationSurface::trace_from_point(int t, Vec2 pos, Vec2 dir, double maxLen, const RayVisitor& visit) const {
  const Triangle& T = tri(t);
  RayResult res;
  double best = 1e300;
  int exitEdge = -1;
  for (int i = 0; i < 3; ++i) {
    const Vec2 ed = T.edge(i);
    const Vec2 n = Vec2{-ed.y, ed.x} / ed.norm();
    const double speed = dot(n, dir);
    if (speed >= 0.0) continue;
    const double dist = std::max(0.0, dot(n, pos - T.p[i]));
    const double tau = dist / -speed;
    if (tau < best) { best = tau; exitEdge = i; }
  }
  if (exitEdge < 0) throw Error(ErrorCode::Internal, "ray has no exit");
  if (best >= maxLen) {
    if (visit && visit({t, {0.0, 0.0}, 0.0, maxLen})) res.stopped = true;
    res.distance = maxLen;
    res.lastTri = t;
    return res;
  }
  const Vec2 hit = pos + dir * best;
  for (int j = 0; j < 3; ++j) {
    if ((hit - T.p[j]).norm() <= kHitTol) {
      if (visit && visit({t, {0.0, 0.0}, 0.0, best})) res.stopped = true;
      res.hitVertex = true;
      res.distance = best;
      res.endCorner = {t, j};
      res.lastTri = t;
      return res;
    }
  }
  if (visit && visit({t, {0.0, 0.0}, 0.0, best})) {
    res.stopped = true;
    res.distance = best;
    res.lastTri = t;
    return res;
  }
  res.crossings.push_back({t, exitEdge});
  res.distance = best;
  return walk(T.nbr[exitEdge], T.nbrEdge[exitEdge], T.shift[exitEdge], pos, dir, maxLen, visit, res);
}

SaddleConnection TranslationSurface::make_saddle(Corner start, Vec2 hol, std::vector<Crossing> crossings, Corner end) const {
  SaddleConnection sc;
  sc.holonomy = hol;
  sc.start = tri(start.tri).vertex[start.k];
  sc.end = tri(end.tri).vertex[end.k];
  sc.length = hol.norm();
  sc.direction = Direction::of(hol);
  sc.startCorner = start;
  sc.crossings = std::move(crossings);
  sc.endCorner = end;
  sc.startCone = cone_coordinate(start, hol);
  sc.endCone = cone_coordinate(end, -hol);
  return sc;
}

bool TranslationSurface::trace_saddle(int vertex, double cone, Vec2 holonomy, SaddleConnection* out) const {
  const double len = holonomy.norm();
  if (len <= 0.0) return false;
  const Corner c = corner_at(vertex, cone);
  const Vec2 dir = holonomy / len;
  RayResult r = trace_from_corner(c, dir, len * (1.0 + 1e-9) + 1e-9);
  if (!r.hitVertex || std::abs(r.distance - len) > 1e-7 * std::max(1.0, len)) return false;
  if (out) *out = make_saddle(c, holonomy, std::move(r.crossings), r.endCorner);
  return true;
}

Vec2 develop(const TranslationSurface& s, Corner start, const std::vector<Crossing>& crossings, Corner end) {
  Vec2 off = -s.position(start);
  int t = start.tri;
  for (const Crossing& c : crossings) {
    if (c.tri != t) throw Error(ErrorCode::Internal, "crossing sequence is not connected");
    const Triangle& T = s.tri(t);
    off = off + T.shift[c.edge];
    t = T.nbr[c.edge];
  }
  if (t != end.tri) throw Error(ErrorCode::Internal, "crossing sequence ends in the wrong triangle");
  return s.position(end) + off;
}

bool saddle_less(const SaddleConnection& a, const SaddleConnection& b) {
  if (std::abs(a.length - b.length) > 1e-12 * std::max(1.0, a.length)) return a.length < b.length;
  if (std::abs(a.direction.theta - b.direction.theta) > 1e-12) return a.direction.theta < b.direction.theta;
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.startCone < b.startCone;
}

}  // namespace flatbundle
