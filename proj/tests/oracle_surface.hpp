#pragma once
// Independent reference computations for the surface kernel, used only by tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "flatbundle/surface.hpp"

namespace oracle {

using flatbundle::Vec2;

inline double seg_point_dist(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 ab = b - a;
  double t = flatbundle::dot(p - a, ab) / flatbundle::dot(ab, ab);
  t = std::clamp(t, 0.0, 1.0);
  return (a + ab * t - p).norm();
}

// Segment [0, w] crosses the open portal (a, b) transversally.
inline bool crosses_open(Vec2 w, Vec2 a, Vec2 b) {
  const double s1 = flatbundle::cross(w, a), s2 = flatbundle::cross(w, b);
  if (!(s1 * s2 < 0.0)) return false;
  const Vec2 ab = b - a;
  const double t = flatbundle::cross(a, ab) / flatbundle::cross(w, ab);
  return t > 0.0 && t < 1.0;
}

// Exhaustive unfolding: every triangle path from every corner, pruned by angular
// intervals (atan2) and distance, with each candidate segment validated portal by portal.
inline std::vector<Vec2> saddle_holonomies(const flatbundle::TranslationSurface& s, double L, int maxDepth = 200) {
  std::vector<Vec2> out;
  auto keep = [](Vec2 h) {
    const double tol = 1e-12 * h.norm();
    return h.y > tol || (std::abs(h.y) <= tol && h.x > 0);
  };
  struct Node {
    int tri, edge;
    Vec2 off;
    double lo, hi;
    std::vector<std::pair<Vec2, Vec2>> portals;
  };
  for (int t = 0; t < static_cast<int>(s.triangles().size()); ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto& T = s.tri(t);
      const Vec2 d0 = T.edge(k) / T.edge(k).norm();
      auto rel = [&](Vec2 v) { return std::atan2(flatbundle::cross(d0, v), flatbundle::dot(d0, v)); };
      if (T.edge(k).norm() <= L + 1e-12 && keep(T.edge(k))) out.push_back(T.edge(k));
      const Vec2 off = -T.p[k];
      const int ex = (k + 1) % 3;
      std::vector<Node> stack;
      stack.push_back({T.nbr[ex], T.nbrEdge[ex], off + T.shift[ex], 0.0, T.angle[k],
                       {{T.p[ex] + off, T.p[(ex + 1) % 3] + off}}});
      while (!stack.empty()) {
        Node n = std::move(stack.back());
        stack.pop_back();
        if (static_cast<int>(n.portals.size()) > maxDepth) continue;
        const auto& U = s.tri(n.tri);
        const Vec2 a = U.p[n.edge] + n.off, b = U.p[(n.edge + 1) % 3] + n.off;
        if (seg_point_dist(a, b, {0, 0}) > L + 1e-9) continue;
        const Vec2 w = U.p[(n.edge + 2) % 3] + n.off;
        const double aw = rel(w);
        const double eps = 1e-11;
        if (aw > n.lo + eps && aw < n.hi - eps && w.norm() <= L + 1e-12) {
          bool ok = true;
          for (const auto& [pa, pb] : n.portals) ok = ok && crosses_open(w, pa, pb);
          if (ok && keep(w)) out.push_back(w);
        }
        for (int side = 0; side < 2; ++side) {
          const int edge = (n.edge + 1 + side) % 3;
          const double lo = side == 0 ? n.lo : std::max(n.lo, aw);
          const double hi = side == 0 ? std::min(n.hi, aw) : n.hi;
          if (hi - lo <= 1e-13) continue;
          Node c{U.nbr[edge], U.nbrEdge[edge], n.off + U.shift[edge], lo, hi, n.portals};
          c.portals.push_back({U.p[edge] + n.off, U.p[(edge + 1) % 3] + n.off});
          stack.push_back(std::move(c));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](Vec2 p, Vec2 q) { return p.x != q.x ? p.x < q.x : p.y < q.y; });
  return out;
}

// Multiset equality of holonomy vectors under a tolerance.
inline bool same_holonomy_sets(std::vector<Vec2> a, std::vector<Vec2> b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Vec2& v : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size() && !found; ++j)
      if (!used[j] && (b[j] - v).norm() <= tol) used[j] = found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace oracle
