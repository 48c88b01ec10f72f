#include <algorithm>
#include <cmath>

#include "flatbundle/surface.hpp"

namespace flatbundle {

namespace {

struct Wedge {
  int tri;
  int edge;   // entry edge in `tri`
  Vec2 off;   // developed = triangle coordinates + off
  Vec2 lo;
  Vec2 hi;
  std::vector<Crossing> path;
};

// Distance from the origin to the part of segment [a, b] seen inside the wedge (lo, hi).
double clipped_distance(Vec2 a, Vec2 b, Vec2 lo, Vec2 hi) {
  const Vec2 ed = b - a;
  auto hit = [&](Vec2 d) {
    const double den = cross(d, ed);
    if (std::abs(den) < 1e-300) return a;
    return d * (cross(a, ed) / den);
  };
  const Vec2 p = hit(lo), q = hit(hi);
  const Vec2 pq = q - p;
  const double l2 = dot(pq, pq);
  double t = l2 > 0.0 ? -dot(p, pq) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p + pq * t).norm();
}

bool keep_orientation(Vec2 h) {
  const double tol = 1e-12 * h.norm();
  if (h.y > tol) return true;
  return std::abs(h.y) <= tol && h.x > 0.0;
}

}  // namespace

std::vector<SaddleConnection> TranslationSurface::enumerate_saddle_connections(const EnumerateOptions& opt) const {
  if (!(opt.maxLength > 0.0)) throw Error(ErrorCode::InvalidConfig, "maxLength must be positive");
  std::vector<SaddleConnection> out;
  const double lim = opt.maxLength * (1.0 + 1e-12);
  std::size_t work = 0;
  std::vector<Wedge> stack;
  auto push = [&](Wedge&& w) {
    if (cross(w.lo, w.hi) <= 1e-14 * w.lo.norm() * w.hi.norm()) return;
    const Triangle& T = tri(w.tri);
    const Vec2 a = T.p[w.edge] + w.off, b = T.p[(w.edge + 1) % 3] + w.off;
    if (clipped_distance(a, b, w.lo, w.hi) > lim) return;
    stack.push_back(std::move(w));
  };
  const int nt = static_cast<int>(tris_.size());
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const Triangle& T = tri(t);
      const Corner start{t, k};
      const Vec2 e1 = T.edge(k);
      if (e1.norm() <= lim && keep_orientation(e1)) out.push_back(make_saddle(start, e1, {}, {t, (k + 1) % 3}));
      const Vec2 off = -T.p[k];
      const int cross1 = (k + 1) % 3;
      push({T.nbr[cross1], T.nbrEdge[cross1], off + T.shift[cross1], T.p[cross1] + off, T.p[(k + 2) % 3] + off,
            {{t, cross1}}});
      while (!stack.empty()) {
        if (++work > opt.workBudget)
          throw Error(ErrorCode::CutoffTooLarge, "saddle enumeration exceeded its work budget");
        Wedge w = std::move(stack.back());
        stack.pop_back();
        const Triangle& U = tri(w.tri);
        const int e = w.edge;
        const Vec2 v = U.p[(e + 2) % 3] + w.off;
        const double tolL = 1e-12 * w.lo.norm() * v.norm();
        const double tolH = 1e-12 * w.hi.norm() * v.norm();
        const double cl = cross(w.lo, v), ch = cross(v, w.hi);
        const int eLo = (e + 1) % 3, eHi = (e + 2) % 3;
        auto sub = [&](int edge, Vec2 lo, Vec2 hi) {
          std::vector<Crossing> path = w.path;
          path.push_back({w.tri, edge});
          push({U.nbr[edge], U.nbrEdge[edge], w.off + U.shift[edge], lo, hi, std::move(path)});
        };
        if (cl > tolL && ch > tolH) {
          if (v.norm() <= lim && keep_orientation(v)) out.push_back(make_saddle(start, v, w.path, {w.tri, (e + 2) % 3}));
          sub(eLo, w.lo, v);
          sub(eHi, v, w.hi);
        } else if (cl <= tolL) {
          sub(eHi, w.lo, w.hi);
        } else {
          sub(eLo, w.lo, w.hi);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), saddle_less);
  return out;
}

}  // namespace flatbundle
