#include "flatbundle/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>

namespace flatbundle {

namespace {

struct Hit {
  int saddle;
  double tau;
};

// First boundary saddle met by the ray from p in direction dir (perpendicular to the decomposition).
std::optional<Hit> first_hit(const TranslationSurface& s, const CylinderDecomposition& c, const SurfacePoint& p,
                             Vec2 dir, double maxLen, double minTau) {
  const Vec2 u = c.direction.unit();
  std::optional<Hit> best;
  auto visit = [&](const RaySegment& seg) {
    const Vec2 base = p.pos - seg.offset;
    for (const SaddlePiece& piece : c.pieces[static_cast<std::size_t>(seg.tri)]) {
      const double tau = dot(piece.a - base, dir);
      if (tau < minTau || tau < seg.tIn - 1e-9 || tau > seg.tOut + 1e-9) continue;
      const double along = dot(base + dir * tau - piece.a, u);
      if (along < -1e-9 || along > (piece.b - piece.a).norm() + 1e-9) continue;
      if (!best || tau < best->tau) best = Hit{piece.saddle, tau};
    }
    return best.has_value();
  };
  s.trace_from_point(p.tri, p.pos, dir, maxLen, visit);
  return best;
}

SurfacePoint advance(const TranslationSurface& s, const SurfacePoint& p, Vec2 dir, double dist) {
  const RayResult r = s.trace_from_point(p.tri, p.pos, dir, dist);
  if (r.crossings.empty()) return {p.tri, p.pos + dir * dist};
  return {r.lastTri, p.pos + dir * dist - r.lastOffset};
}

// A perpendicular ray can end on a cone point that is not stored with the current triangle; nudging the
// start point along the decomposition direction keeps the perpendicular distance unchanged.
std::optional<Hit> robust_hit(const TranslationSurface& s, const CylinderDecomposition& c, const SurfacePoint& p,
                              Vec2 dir, double maxLen, double minTau, double nudge) {
  SurfacePoint q = p;
  for (int k = 0; k < 6; ++k) {
    if (auto h = first_hit(s, c, q, dir, maxLen, minTau)) return h;
    q = advance(s, q, c.direction.unit(), nudge * (1.0 + 0.37 * k));
  }
  return std::nullopt;
}

std::vector<std::vector<int>> cycles_of(const std::vector<int>& next) {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(next.size(), false);
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (seen[i]) continue;
    std::vector<int> cyc;
    for (int j = static_cast<int>(i); !seen[j]; j = next[j]) {
      seen[j] = true;
      cyc.push_back(j);
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

DirectionResult trace_direction(const TranslationSurface& s, Direction d, double maxTrace) {
  if (!(maxTrace > 0.0)) throw Error(ErrorCode::InvalidConfig, "maxTrace must be positive");
  DirectionResult res;
  CylinderDecomposition& c = res.decomposition;
  c.direction = d;
  c.pieces.assign(s.triangles().size(), {});
  const Vec2 u = d.unit();
  struct Mid {
    int tri;
    Vec2 pos;
  };
  std::vector<Mid> mids;
  for (const ConePoint& cp : s.cone_points()) {
    for (double cone : s.prongs(cp.id, u.angle())) {
      const int id = static_cast<int>(c.saddles.size());
      std::vector<RaySegment> segs;
      auto collect = [&](const RaySegment& seg) {
        segs.push_back(seg);
        return false;
      };
      const RayResult r = s.trace_from_corner(s.corner_at(cp.id, cone), u, maxTrace, collect);
      res.tracedLength += r.distance;
      if (!r.hitVertex) {
        res.closed = false;
        res.decomposition = {};
        return res;
      }
      SaddleConnection sc;
      if (!s.trace_saddle(cp.id, cone, u * r.distance, &sc))
        throw Error(ErrorCode::Internal, "separatrix did not retrace as a saddle connection");
      const double half = 0.5 * r.distance;
      for (const RaySegment& seg : segs) {
        const Vec2 a = u * seg.tIn - seg.offset, b = u * seg.tOut - seg.offset;
        c.pieces[static_cast<std::size_t>(seg.tri)].push_back({id, a, b});
        if (half >= seg.tIn && half <= seg.tOut && static_cast<int>(mids.size()) == id)
          mids.push_back({seg.tri, u * half - seg.offset});
      }
      if (static_cast<int>(mids.size()) != id + 1) throw Error(ErrorCode::Internal, "separatrix midpoint not found");
      c.saddles.push_back(sc);
    }
  }
  const int n = static_cast<int>(c.saddles.size());
  auto find_start = [&](int vertex, double cone) {
    const double K = s.cone_points()[vertex].angle;
    for (int j = 0; j < n; ++j) {
      if (c.saddles[j].start != vertex) continue;
      const double g = wrap_angle(c.saddles[j].startCone - cone, K);
      if (std::min(g, K - g) < 1e-7) return j;
    }
    throw Error(ErrorCode::Internal, "boundary successor not found");
  };
  std::vector<int> nextBottom(n), nextTop(n);
  for (int i = 0; i < n; ++i) {
    const SaddleConnection& sc = c.saddles[i];
    nextBottom[i] = find_start(sc.end, sc.endCone - kPi);
    nextTop[i] = find_start(sc.end, sc.endCone + kPi);
  }
  const auto bottoms = cycles_of(nextBottom), tops = cycles_of(nextTop);
  std::vector<int> topCycleOf(n);
  for (std::size_t k = 0; k < tops.size(); ++k)
    for (int j : tops[k]) topCycleOf[j] = static_cast<int>(k);

  std::vector<int> parent(s.cone_points().size());
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& sc : c.saddles) parent[find_root(parent, sc.start)] = find_root(parent, sc.end);
  std::vector<int> spineIndex(parent.size(), -1);
  c.spineOfVertex.assign(parent.size(), -1);
  for (std::size_t v = 0; v < parent.size(); ++v) {
    const int r = find_root(parent, static_cast<int>(v));
    if (spineIndex[r] < 0) {
      spineIndex[r] = static_cast<int>(c.spines.size());
      c.spines.emplace_back();
    }
    c.spineOfVertex[v] = spineIndex[r];
  }
  c.spineOfSaddle.resize(n);
  for (int i = 0; i < n; ++i) {
    c.spineOfSaddle[i] = c.spineOfVertex[c.saddles[i].start];
    c.spines[c.spineOfSaddle[i]].push_back(i);
  }

  const Vec2 up{-u.y, u.x};
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& sc : c.saddles) shortest = std::min(shortest, sc.length);
  const double reach = s.area() / shortest + 1.0;
  std::vector<bool> topUsed(tops.size(), false);
  for (const auto& bottom : bottoms) {
    Cylinder cyl;
    cyl.bottom = bottom;
    for (int j : bottom) cyl.circumference += c.saddles[j].length;
    const Mid& m = mids[static_cast<std::size_t>(bottom.front())];
    const auto hit = robust_hit(s, c, {m.tri, m.pos}, up, reach, 1e-9, 1e-3 * shortest);
    if (!hit) throw Error(ErrorCode::Internal, "cylinder has no top boundary");
    const int k = topCycleOf[hit->saddle];
    if (topUsed[k]) throw Error(ErrorCode::Internal, "top boundary matched twice");
    topUsed[k] = true;
    cyl.top = tops[k];
    cyl.width = hit->tau;
    cyl.bottomSpine = c.spineOfSaddle[bottom.front()];
    cyl.topSpine = c.spineOfSaddle[cyl.top.front()];
    c.cylinders.push_back(std::move(cyl));
  }
  double total = 0.0;
  for (const Cylinder& cyl : c.cylinders) total += cyl.circumference * cyl.width;
  c.areaResidual = total - s.area();
  res.closed = true;
  return res;
}

BassSerreGraph build_bass_serre(const TranslationSurface& s, const CylinderDecomposition& c) {
  BassSerreGraph g;
  g.surface = &s;
  g.decomposition = c;
  g.vertexCount = static_cast<int>(c.spines.size());
  for (std::size_t i = 0; i < c.cylinders.size(); ++i)
    g.edges.push_back({static_cast<int>(i), c.cylinders[i].bottomSpine, c.cylinders[i].topSpine, c.cylinders[i].width});
  return g;
}

GraphPoint BassSerreGraph::project(const SurfacePoint& p) const {
  const auto& c = decomposition;
  if (!surface || p.tri < 0 || p.tri >= static_cast<int>(surface->triangles().size()))
    throw Error(ErrorCode::PointNotInDecomposition, "point is not on the decomposed surface");
  const Triangle& T = surface->tri(p.tri);
  for (int k = 0; k < 3; ++k)
    if ((p.pos - T.p[k]).norm() <= 1e-12) return {true, c.spineOfVertex[T.vertex[k]], -1, 0.0};
  const Vec2 u = c.direction.unit();
  const Vec2 down{u.y, -u.x};
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& sc : c.saddles) shortest = std::min(shortest, sc.length);
  const auto hit = robust_hit(*surface, c, p, down, surface->area() / shortest + 1.0, -1e-12, 1e-6 * shortest);
  if (!hit) throw Error(ErrorCode::PointNotInDecomposition, "no boundary saddle below the point");
  int cyl = -1;
  for (std::size_t i = 0; i < c.cylinders.size() && cyl < 0; ++i)
    for (int j : c.cylinders[i].bottom)
      if (j == hit->saddle) cyl = static_cast<int>(i);
  if (cyl < 0) throw Error(ErrorCode::PointNotInDecomposition, "boundary saddle has no cylinder");
  const Cylinder& C = c.cylinders[cyl];
  const double tau = std::max(0.0, hit->tau);
  if (tau <= 1e-9) return {true, C.bottomSpine, -1, 0.0};
  if (tau >= C.width - 1e-9) return {true, C.topSpine, -1, 0.0};
  return {false, -1, cyl, tau};
}

double graph_distance(const BassSerreGraph& g, const GraphPoint& p, const GraphPoint& q) {
  auto ends = [&](const GraphPoint& x) {
    std::vector<std::pair<int, double>> out;
    if (x.atVertex) {
      out.push_back({x.vertex, 0.0});
    } else {
      const GraphEdge& e = g.edges[x.edge];
      out.push_back({e.from, x.t});
      out.push_back({e.to, e.weight - x.t});
    }
    return out;
  };
  std::vector<double> dist(static_cast<std::size_t>(g.vertexCount), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& [v, w] : ends(p))
    if (w < dist[v]) { dist[v] = w; pq.push({w, v}); }
  while (!pq.empty()) {
    const auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v]) continue;
    for (const GraphEdge& e : g.edges)
      for (const auto& [a, b] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}})
        if (a == v && dv + e.weight < dist[b]) { dist[b] = dv + e.weight; pq.push({dist[b], b}); }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [v, w] : ends(q)) best = std::min(best, dist[v] + w);
  if (!p.atVertex && !q.atVertex && p.edge == q.edge) best = std::min(best, std::abs(p.t - q.t));
  return best;
}

double tree_distance(const BassSerreGraph& g, const SurfacePoint& p, const SurfacePoint& q) {
  return graph_distance(g, g.project(p), g.project(q));
}

}  // namespace flatbundle
