#include "flatbundle/veech.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "flatbundle/error.hpp"

namespace flatbundle {

namespace {

struct Placement {
  bool placed = false;
  std::array<int, 3> vert{};
  std::array<double, 3> cone{};
  std::array<SaddleConnection, 3> side{};
};

double cone_gap(double a, double b, double K) {
  const double d = wrap_angle(a - b, K);
  return std::min(d, K - d);
}

// Place triangle t with corner k at (v, c); returns false if an image side is not a saddle connection
// or the three sides do not close up.
bool place(const TranslationSurface& s, const Mat2& m, int t, int k, int v, double c, Placement& P) {
  const Triangle& T = s.tri(t);
  int vert = v;
  double cone = c;
  for (int j = 0; j < 3; ++j) {
    const int idx = (k + j) % 3;
    P.vert[idx] = vert;
    P.cone[idx] = cone;
    SaddleConnection sc;
    if (!s.trace_saddle(vert, cone, m * T.edge(idx), &sc)) return false;
    P.side[idx] = sc;
    const int nxt = (idx + 1) % 3;
    const double ang = ccw_angle(m * T.edge(nxt), -(m * T.edge(idx)));
    vert = sc.end;
    cone = wrap_angle(sc.endCone - ang, s.cone_points()[vert].angle);
  }
  const double K = s.cone_points()[v].angle;
  if (vert != v || cone_gap(cone, c, K) > 1e-7) return false;
  P.placed = true;
  return true;
}

// Whether some cone point lies strictly inside the image triangle with corner 0 at (v, c0), sector width w
// and far corners P1, P2 relative to that corner.
bool vertex_inside(const TranslationSurface& s, int v, double c0, double w, Vec2 P1, Vec2 P2) {
  const ConePoint& cp = s.cone_points()[v];
  const double K = cp.angle;
  const Vec2 side = P2 - P1;
  auto inside = [&](Vec2 x) { return cross(side, x - P1) > 1e-9 * side.norm(); };
  struct W {
    int tri, edge;
    Vec2 off, lo, hi;
  };
  std::vector<W> stack;
  auto push = [&](W w) {
    if (cross(w.lo, w.hi) <= 1e-14 * w.lo.norm() * w.hi.norm()) return;
    const Triangle& T = s.tri(w.tri);
    const Vec2 a = T.p[w.edge] + w.off, b = T.p[(w.edge + 1) % 3] + w.off;
    const Vec2 ed = b - a;
    auto hit = [&](Vec2 d) { return d * (cross(a, ed) / cross(d, ed)); };
    if (!inside(hit(w.lo)) && !inside(hit(w.hi))) return;
    stack.push_back(w);
  };
  for (const Corner& cr : cp.cycle) {
    const Triangle& T = s.tri(cr.tri);
    const double cs = T.coneStart[cr.k], ang = T.angle[cr.k];
    const double d = wrap_angle(c0 - cs, K);
    for (double dd : {d, d - K}) {
      const double lo = std::max(dd, 0.0), hi = std::min(dd + w, ang);
      if (hi - lo <= 1e-12) continue;
      const Vec2 off = -T.p[cr.k];
      const int e = (cr.k + 1) % 3;
      push({T.nbr[e], T.nbrEdge[e], off + T.shift[e], s.direction_at(v, cs + lo), s.direction_at(v, cs + hi)});
    }
  }
  std::size_t work = 0;
  while (!stack.empty()) {
    if (++work > 1'000'000) return true;
    const W wd = stack.back();
    stack.pop_back();
    const Triangle& U = s.tri(wd.tri);
    const Vec2 x = U.p[(wd.edge + 2) % 3] + wd.off;
    const double cl = cross(wd.lo, x), ch = cross(x, wd.hi);
    const double tol = 1e-12 * x.norm();
    const int eLo = (wd.edge + 1) % 3, eHi = (wd.edge + 2) % 3;
    auto sub = [&](int edge, Vec2 lo, Vec2 hi) {
      push({U.nbr[edge], U.nbrEdge[edge], wd.off + U.shift[edge], lo, hi});
    };
    if (cl > tol && ch > tol) {
      if (inside(x)) return true;
      sub(eLo, wd.lo, x);
      sub(eHi, x, wd.hi);
    } else if (cl <= tol) {
      sub(eHi, wd.lo, wd.hi);
    } else {
      sub(eLo, wd.lo, wd.hi);
    }
  }
  return false;
}

int gluing_of(const TranslationSurface& s, int t, int k) {
  const Triangle& T = s.tri(t);
  if (T.polygonEdge[k] < 0) return -1;
  const auto& gl = s.definition().gluings;
  for (std::size_t g = 0; g < gl.size(); ++g)
    if ((gl[g][0] == T.polygon && gl[g][1] == T.polygonEdge[k]) || (gl[g][2] == T.polygon && gl[g][3] == T.polygonEdge[k]))
      return static_cast<int>(g);
  return -1;
}

struct Attempt {
  bool ok = false;
  AffineAutomorphism aut;
};

Attempt try_candidate(const TranslationSurface& s, const Mat2& m, int v0, double c0) {
  const int nt = static_cast<int>(s.triangles().size());
  std::vector<Placement> P(static_cast<std::size_t>(nt));
  if (!place(s, m, 0, 0, v0, c0, P[0])) return {};
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    const int t = q.front();
    q.pop();
    const Triangle& T = s.tri(t);
    for (int k = 0; k < 3; ++k) {
      const int j = T.nbr[k], kk = T.nbrEdge[k];
      const int v = P[t].side[k].end;
      const double c = P[t].side[k].endCone;
      if (P[j].placed) {
        const double K = s.cone_points()[v].angle;
        if (P[j].vert[kk] != v || cone_gap(P[j].cone[kk], c, K) > 1e-7) return {};
        continue;
      }
      if (!place(s, m, j, kk, v, c, P[j])) return {};
      q.push(j);
    }
  }
  Attempt a;
  a.aut.derivative = m;
  a.aut.coneMap.assign(s.cone_points().size(), -1);
  for (int t = 0; t < nt; ++t) {
    const Triangle& T = s.tri(t);
    for (int k = 0; k < 3; ++k) {
      int& img = a.aut.coneMap[T.vertex[k]];
      if (img >= 0 && img != P[t].vert[k]) return {};
      img = P[t].vert[k];
    }
    const Vec2 P1 = m * T.edge(0), P2 = m * (T.p[2] - T.p[0]);
    if (vertex_inside(s, P[t].vert[0], P[t].cone[0], ccw_angle(P1, P2), P1, P2)) return {};
  }
  std::vector<int> seen(a.aut.coneMap.size(), 0);
  for (int img : a.aut.coneMap)
    if (img < 0 || seen[img]++) return {};
  a.aut.edgeMap.assign(s.definition().gluings.size(), -1);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      const int g = gluing_of(s, t, k);
      if (g < 0 || a.aut.edgeMap[g] >= 0) continue;
      const SaddleConnection& img = P[t].side[k];
      for (int t2 = 0; t2 < nt && a.aut.edgeMap[g] < 0; ++t2)
        for (int k2 = 0; k2 < 3; ++k2) {
          const Triangle& U = s.tri(t2);
          if ((U.edge(k2) - img.holonomy).norm() > 1e-7 * std::max(1.0, img.length)) continue;
          if (U.vertex[k2] != img.start) continue;
          const double K = s.cone_points()[img.start].angle;
          if (cone_gap(U.coneStart[k2], img.startCone, K) > 1e-7) continue;
          a.aut.edgeMap[g] = gluing_of(s, t2, k2);
          break;
        }
    }
  a.ok = true;
  return a;
}

std::vector<BoundaryPoint> dedupe_sorted(std::vector<BoundaryPoint> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](BoundaryPoint a, BoundaryPoint b) { return a.angle < b.angle; });
  std::vector<BoundaryPoint> out;
  for (const BoundaryPoint& p : pts)
    if (out.empty() || p.angle - out.back().angle > tol) out.push_back(p);
  if (out.size() > 1 && boundary_gap(out.front(), out.back()) <= tol) out.pop_back();
  return out;
}

Mat2 letter_matrix(const std::vector<Mat2>& gens, int letter) {
  const Mat2& g = gens[static_cast<std::size_t>(letter / 2)];
  return letter % 2 ? g.inverse_sl2() : g;
}

}  // namespace

AffineAutomorphism verify_affine(const TranslationSurface& s, const Mat2& m, int hint) {
  if (std::abs(m.det() - 1.0) > 1e-9)
    throw Error(ErrorCode::BadDeterminant, "determinant " + std::to_string(m.det()) + " is not 1");
  const Vec2 e0 = m * s.tri(0).edge(0);
  std::vector<std::pair<int, double>> candidates;
  for (const ConePoint& cp : s.cone_points())
    for (double c : s.prongs(cp.id, e0.angle())) candidates.push_back({cp.id, c});
  if (hint >= static_cast<int>(candidates.size()))
    throw Error(ErrorCode::NotAnAutomorphism, "hint " + std::to_string(hint) + " exceeds the candidate count");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (hint >= 0 && static_cast<int>(i) != hint) continue;
    Attempt a = try_candidate(s, m, candidates[i].first, candidates[i].second);
    if (a.ok) {
      a.aut.candidate = static_cast<int>(i);
      a.aut.candidateCount = static_cast<int>(candidates.size());
      return a.aut;
    }
  }
  throw Error(ErrorCode::NotAnAutomorphism, "no placement of the triangulation under the matrix re-glues the surface");
}

std::string Word::str() const {
  std::string out;
  for (int l : letters) out += static_cast<char>((l % 2 ? 'A' : 'a') + l / 2);
  return out.empty() ? "1" : out;
}

std::vector<Word> reduced_words(const std::vector<Mat2>& gens, int depth) {
  const int nl = static_cast<int>(gens.size()) * 2;
  std::vector<Word> out, layer{Word{}};
  for (int d = 1; d <= depth; ++d) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (int l = 0; l < nl; ++l) {
        if (!w.letters.empty() && (w.letters.back() ^ 1) == l) continue;
        Word x = w;
        x.letters.push_back(l);
        x.m = w.m * letter_matrix(gens, l);
        next.push_back(std::move(x));
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::vector<Mat2> VeechGroupData::derivatives() const {
  std::vector<Mat2> out;
  for (const auto& g : generators) out.push_back(g.derivative);
  return out;
}

std::vector<BoundaryPoint> sample_limit_set(const VeechGroupData& g, int depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidConfig, "depth must be at least 1");
  std::vector<BoundaryPoint> pts;
  for (const Word& w : reduced_words(g.derivatives(), depth))
    for (const BoundaryPoint& p : boundary_fixed_points(w.m)) pts.push_back(p);
  return dedupe_sorted(std::move(pts), 1e-8);
}

ConvexRegion build_hull(const std::vector<BoundaryPoint>& sample) {
  const auto pts = dedupe_sorted(sample, 1e-8);
  if (pts.size() < 3)
    throw Error(ErrorCode::ElementaryGroup, "limit sample has " + std::to_string(pts.size()) + " points");
  ConvexRegion R;
  for (std::size_t i = 0; i < pts.size(); ++i) R.sides.push_back({pts[i], pts[(i + 1) % pts.size()]});
  return R;
}

std::vector<ParabolicPoint> find_parabolic_fixed_points(const VeechGroupData& g, int depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidConfig, "depth must be at least 1");
  std::vector<ParabolicPoint> out;
  for (const Word& w : reduced_words(g.derivatives(), depth)) {
    if (classify(w.m) != IsometryKind::Parabolic) continue;
    const BoundaryPoint p = boundary_fixed_points(w.m).front();
    bool dup = false;
    for (const auto& q : out) dup = dup || boundary_gap(q.at, p) <= 1e-8;
    if (!dup) out.push_back({p, w});
  }
  return out;
}

VeechGroupData build_group(const TranslationSurface& s, const std::vector<Mat2>& gens,
                           const std::vector<int>& hints, int depth, bool lattice) {
  if (depth < 1) throw Error(ErrorCode::InvalidConfig, "depth must be at least 1");
  VeechGroupData g;
  g.surface = &s;
  g.wordDepth = depth;
  g.lattice = lattice;
  for (std::size_t i = 0; i < gens.size(); ++i)
    g.generators.push_back(verify_affine(s, gens[i], i < hints.size() ? hints[i] : -1));
  g.limitSample = sample_limit_set(g, depth);
  g.hull = build_hull(g.limitSample);
  g.parabolicFixedPoints = find_parabolic_fixed_points(g, depth);
  for (const Mat2& m : gens)
    for (const BoundaryPoint& p : g.limitSample) {
      const BoundaryPoint q = act(m, p);
      auto it = std::lower_bound(g.limitSample.begin(), g.limitSample.end(), q,
                                 [](BoundaryPoint a, BoundaryPoint b) { return a.angle < b.angle; });
      double best = kTwoPi;
      if (it != g.limitSample.end()) best = boundary_gap(*it, q);
      best = std::min(best, boundary_gap(it == g.limitSample.begin() ? g.limitSample.back() : *(it - 1), q));
      if (it == g.limitSample.end()) best = std::min(best, boundary_gap(g.limitSample.front(), q));
      g.sampleDrift = std::max(g.sampleDrift, best);
    }
  return g;
}

ConvexRegion effective_hull(const VeechGroupData& g) { return g.lattice ? ConvexRegion{} : g.hull; }

bool PingPong::certifies_outside(BoundaryPoint b) const {
  if (!valid) return false;
  for (const auto& [start, width] : arcs)
    if (wrap_angle(b.angle - start + 1e-12) <= width + 2e-12) return false;
  return true;
}

PingPong ping_pong_cover(const std::vector<Mat2>& gens, int level) {
  PingPong pp;
  const int nl = static_cast<int>(gens.size()) * 2;
  std::vector<Cx> center(static_cast<std::size_t>(nl));
  std::vector<double> radius(static_cast<std::size_t>(nl));
  for (int l = 0; l < nl; ++l) {
    const CMat N = disk_form(letter_matrix(gens, l));
    if (std::abs(N.c) < 1e-12) return pp;
    center[l] = -N.d / N.c;
    radius[l] = 1.0 / std::abs(N.c);
  }
  for (int i = 0; i < nl; ++i)
    for (int j = i + 1; j < nl; ++j)
      if (std::abs(center[i] - center[j]) < radius[i] + radius[j] - 1e-12) return pp;
  pp.valid = true;
  // Limit points of words starting with l lie in the isometric disk of l^{-1}; longer words prefix-map those arcs.
  struct Arc {
    double start, width;
    int first;
  };
  std::vector<Arc> layer;
  for (int l = 0; l < nl; ++l) {
    const int inv = l ^ 1;
    const double half = std::atan(radius[inv]);
    layer.push_back({wrap_angle(std::arg(center[inv]) - half), 2.0 * half, l});
  }
  for (int d = 2; d <= level; ++d) {
    std::vector<Arc> next;
    for (int l = 0; l < nl; ++l) {
      const CMat N = disk_form(letter_matrix(gens, l));
      for (const Arc& a : layer) {
        if ((a.first ^ 1) == l) continue;
        const Cx z0 = N(std::polar(1.0, a.start)), z1 = N(std::polar(1.0, a.start + a.width));
        // Nested arcs are shorter than pi, so a negative signed width is only rounding.
        const double a0 = std::arg(z0), signedWidth = std::remainder(std::arg(z1) - a0, kTwoPi);
        if (signedWidth >= 0.0) next.push_back({wrap_angle(a0), signedWidth, l});
        else next.push_back({wrap_angle(a0 + signedWidth), -signedWidth, l});
      }
    }
    layer = std::move(next);
  }
  for (const Arc& a : layer) pp.arcs.push_back({a.start, a.width});
  return pp;
}

}  // namespace flatbundle
