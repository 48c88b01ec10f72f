#include "flatbundle/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace flatbundle {

namespace {

struct Strip {
  std::vector<int> tri;
  std::vector<int> exitEdge;
  std::vector<std::array<int, 3>> id;
  std::vector<Vec2> pos;
  std::vector<int> cls;
};

Strip build_strip(const TranslationSurface& s, int startTri, const std::vector<Crossing>& crossings) {
  Strip st;
  st.tri.push_back(startTri);
  const Triangle& T0 = s.tri(startTri);
  for (int k = 0; k < 3; ++k) {
    st.pos.push_back(T0.p[k]);
    st.cls.push_back(T0.vertex[k]);
  }
  st.id.push_back({0, 1, 2});
  Vec2 off{0.0, 0.0};
  for (const Crossing& c : crossings) {
    if (c.tri != st.tri.back()) throw Error(ErrorCode::Internal, "sleeve is not connected");
    const Triangle& T = s.tri(c.tri);
    const int nt = T.nbr[c.edge], ne = T.nbrEdge[c.edge];
    off = off + T.shift[c.edge];
    const auto& cur = st.id.back();
    std::array<int, 3> nid{};
    nid[ne] = cur[(c.edge + 1) % 3];
    nid[(ne + 1) % 3] = cur[c.edge];
    nid[(ne + 2) % 3] = static_cast<int>(st.pos.size());
    const Triangle& N = s.tri(nt);
    st.pos.push_back(N.p[(ne + 2) % 3] + off);
    st.cls.push_back(N.vertex[(ne + 2) % 3]);
    st.exitEdge.push_back(c.edge);
    st.tri.push_back(nt);
    st.id.push_back(nid);
  }
  return st;
}

int corner_of(const std::array<int, 3>& ids, int u) {
  for (int k = 0; k < 3; ++k)
    if (ids[k] == u) return k;
  return -1;
}

double signed_angle(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

// Simple funnel over portals [first, last) of the strip, ending at `endId`.
std::vector<int> funnel(const Strip& st, int first, int last, int startId, int endId) {
  struct Portal { int l, r; };
  std::vector<Portal> portals;
  for (int i = first; i < last; ++i) {
    const int e = st.exitEdge[i];
    portals.push_back({st.id[i][(e + 1) % 3], st.id[i][e]});
  }
  portals.push_back({endId, endId});
  const int np = static_cast<int>(portals.size());
  std::vector<int> path{startId};
  int apex = startId, left = startId, right = startId;
  int leftIdx = 0, rightIdx = 0;
  auto P = [&](int id) { return st.pos[id]; };
  auto restart_at = [&](int newApex, int idx) {
    path.push_back(newApex);
    apex = left = right = newApex;
    int j = idx + 1;
    while (j < np && (portals[j].l == newApex || portals[j].r == newApex)) ++j;
    leftIdx = rightIdx = j - 1;
    return j - 1;
  };
  for (int i = 0; i < np; ++i) {
    const int L = portals[i].l, R = portals[i].r;
    if (L == apex || R == apex) continue;
    const Vec2 a = P(apex);
    if (right == apex || cross(P(right) - a, P(R) - a) >= 0.0) {
      if (right == apex || cross(P(left) - a, P(R) - a) < 0.0) {
        right = R;
        rightIdx = i;
      } else {
        i = restart_at(left, leftIdx);
        continue;
      }
    }
    if (left == apex || cross(P(left) - a, P(L) - a) <= 0.0) {
      if (left == apex || cross(P(right) - a, P(L) - a) > 0.0) {
        left = L;
        leftIdx = i;
      } else {
        i = restart_at(right, rightIdx);
        continue;
      }
    }
  }
  if (path.back() != endId) path.push_back(endId);
  return path;
}

struct Run {
  int i0 = 0, i1 = 0;
};

Run run_of(const Strip& st, int u, int lo, int hi) {
  Run r{-1, -1};
  for (int i = lo; i <= hi; ++i) {
    if (corner_of(st.id[i], u) >= 0) {
      if (r.i0 < 0) r.i0 = i;
      r.i1 = i;
    }
  }
  return r;
}

// Angle at strip vertex u between the incoming and outgoing directions, measured through the strip.
double strip_angle(const TranslationSurface& s, const Strip& st, const Run& run, int u, Vec2 dIn, Vec2 dOut) {
  auto edges = [&](int i, Vec2& e1, Vec2& e2, int& k) {
    k = corner_of(st.id[i], u);
    e1 = st.pos[st.id[i][(k + 1) % 3]] - st.pos[u];
    e2 = st.pos[st.id[i][(k + 2) % 3]] - st.pos[u];
  };
  if (run.i0 == run.i1) return std::abs(signed_angle(dIn, dOut));
  Vec2 a1, a2, b1, b2;
  int ka, kb;
  edges(run.i0, a1, a2, ka);
  edges(run.i1, b1, b2, kb);
  const bool ccw = st.exitEdge[run.i0] == (ka + 2) % 3;
  double A = 0.0;
  for (int i = run.i0 + 1; i < run.i1; ++i) A += s.tri(st.tri[i]).angle[corner_of(st.id[i], u)];
  if (ccw)
    A += signed_angle(dIn, a2) + signed_angle(b1, dOut);
  else
    A += signed_angle(a1, dIn) + signed_angle(dOut, b2);
  return A;
}

}  // namespace

std::vector<Crossing> reverse_crossings(const TranslationSurface& s, const std::vector<Crossing>& c) {
  std::vector<Crossing> out;
  out.reserve(c.size());
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    const Triangle& T = s.tri(it->tri);
    out.push_back({T.nbr[it->edge], T.nbrEdge[it->edge]});
  }
  return out;
}

void reduce_crossings(const TranslationSurface& s, std::vector<Crossing>& c) {
  std::vector<Crossing> out;
  out.reserve(c.size());
  for (const Crossing& x : c) {
    if (!out.empty()) {
      const Triangle& T = s.tri(out.back().tri);
      if (T.nbr[out.back().edge] == x.tri && T.nbrEdge[out.back().edge] == x.edge) {
        out.pop_back();
        continue;
      }
    }
    out.push_back(x);
  }
  c = std::move(out);
}

namespace {

int final_triangle(const TranslationSurface& s, const std::vector<Crossing>& sleeve) {
  if (sleeve.empty()) return 0;
  const Crossing& c = sleeve.back();
  return s.tri(c.tri).nbr[c.edge];
}

void rotate_to(const TranslationSurface& s, Corner from, Corner to, std::vector<Crossing>& sleeve) {
  Corner c = from;
  std::size_t guard = 0;
  while (!(c == to)) {
    sleeve.push_back({c.tri, (c.k + 2) % 3});
    c = s.next_ccw(c);
    if (++guard > 3 * s.triangles().size()) throw Error(ErrorCode::Internal, "corner is not at this vertex");
  }
}

}  // namespace

int lift_triangle(const TranslationSurface& s, const Lift& l) { return final_triangle(s, l.sleeve); }

int lift_vertex(const TranslationSurface& s, const Lift& l) { return s.tri(final_triangle(s, l.sleeve)).vertex[l.k]; }

Lift lift_of_corner(const TranslationSurface& s, Corner c) {
  const int nt = static_cast<int>(s.triangles().size());
  std::vector<Crossing> via(nt, Crossing{-1, -1});
  std::vector<bool> seen(nt, false);
  std::deque<int> q{0};
  seen[0] = true;
  while (!q.empty()) {
    const int t = q.front();
    q.pop_front();
    for (int e = 0; e < 3; ++e) {
      const int n = s.tri(t).nbr[e];
      if (!seen[n]) {
        seen[n] = true;
        via[n] = {t, e};
        q.push_back(n);
      }
    }
  }
  Lift l;
  for (int t = c.tri; t != 0; t = via[t].tri) l.sleeve.push_back(via[t]);
  std::reverse(l.sleeve.begin(), l.sleeve.end());
  l.k = c.k;
  return l;
}

Lift follow(const TranslationSurface& s, const Lift& from, const SaddleConnection& sc) {
  Lift out{from.sleeve, 0};
  rotate_to(s, {final_triangle(s, from.sleeve), from.k}, sc.startCorner, out.sleeve);
  out.sleeve.insert(out.sleeve.end(), sc.crossings.begin(), sc.crossings.end());
  reduce_crossings(s, out.sleeve);
  out.k = sc.endCorner.k;
  return out;
}

Lift follow_reversed(const TranslationSurface& s, const Lift& from, const SaddleConnection& sc) {
  Lift out{from.sleeve, 0};
  rotate_to(s, {final_triangle(s, from.sleeve), from.k}, sc.endCorner, out.sleeve);
  const auto rev = reverse_crossings(s, sc.crossings);
  out.sleeve.insert(out.sleeve.end(), rev.begin(), rev.end());
  reduce_crossings(s, out.sleeve);
  out.k = sc.startCorner.k;
  return out;
}

Vec2 lift_position(const TranslationSurface& s, const Lift& l) {
  return develop(s, {0, 0}, l.sleeve, {final_triangle(s, l.sleeve), l.k}) + s.tri(0).p[0];
}

FlatGeodesic flat_geodesic(const TranslationSurface& s, const Lift& a, const Lift& b, const GeodesicOptions& opt) {
  std::vector<Crossing> sleeve = reverse_crossings(s, a.sleeve);
  sleeve.insert(sleeve.end(), b.sleeve.begin(), b.sleeve.end());
  reduce_crossings(s, sleeve);
  const int startTri = final_triangle(s, a.sleeve);

  for (std::size_t iter = 0; iter < 100000; ++iter) {
    if (sleeve.size() > opt.maxCrossings)
      throw Error(ErrorCode::BallExceeded, "combined sleeve exceeds the realized ball");
    const Strip st = build_strip(s, startTri, sleeve);
    const int n = static_cast<int>(st.tri.size()) - 1;
    const int sId = st.id[0][a.k];
    const int eId = st.id[n][b.k];
    FlatGeodesic g;
    g.points.push_back({0.0, 0.0});
    g.vertices.push_back(st.cls[sId]);
    if (sId == eId) return g;
    int first = 0;
    while (first < n && corner_of(st.id[first + 1], sId) >= 0) ++first;
    int last = n;
    while (last > 0 && corner_of(st.id[last - 1], eId) >= 0) --last;
    std::vector<int> path;
    if (first >= last)
      path = {sId, eId};
    else
      path = funnel(st, first, last, sId, eId);

    // Local geodesic test at each bend; reroute around the first violating vertex.
    bool rerouted = false;
    std::vector<std::array<double, 2>> angles;
    for (std::size_t j = 1; j + 1 < path.size() && !rerouted; ++j) {
      const int u = path[j];
      const Run run = run_of(st, u, first, last);
      const Vec2 dIn = st.pos[path[j - 1]] - st.pos[u];
      const Vec2 dOut = st.pos[path[j + 1]] - st.pos[u];
      const double K = s.cone_points()[st.cls[u]].angle;
      const double A = strip_angle(s, st, run, u, dIn, dOut);
      if (K - A < kPi - 1e-9) {
        const int r = run.i1 - run.i0 + 1;
        const Corner c0{st.tri[run.i0], corner_of(st.id[run.i0], u)};
        const int N = static_cast<int>(s.cone_points()[st.cls[u]].cycle.size());
        std::vector<Crossing> next(sleeve.begin(), sleeve.begin() + run.i0);
        if (r > N) {
          next.insert(next.end(), sleeve.begin() + run.i0 + N, sleeve.end());
        } else {
          const bool ccw = st.exitEdge[run.i0] == (c0.k + 2) % 3;
          Corner c = c0;
          for (int step = 0; step < N - r + 1; ++step) {
            if (ccw) {
              next.push_back({c.tri, c.k});
              c = s.next_cw(c);
            } else {
              next.push_back({c.tri, (c.k + 2) % 3});
              c = s.next_ccw(c);
            }
          }
          next.insert(next.end(), sleeve.begin() + run.i1, sleeve.end());
        }
        reduce_crossings(s, next);
        sleeve = std::move(next);
        rerouted = true;
        break;
      }
      angles.push_back({A, K - A});
    }
    if (rerouted) continue;

    // Split segments at strip vertices lying on them.
    std::vector<int> full{path.front()};
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
      const int p = path[j], q = path[j + 1];
      const Run rp = run_of(st, p, 0, n), rq = run_of(st, q, 0, n);
      const Vec2 P = st.pos[p], Q = st.pos[q];
      const Vec2 d = Q - P;
      const double len = d.norm();
      std::vector<std::pair<double, int>> on;
      std::vector<bool> seen(st.pos.size(), false);
      for (int i = std::min(rp.i1, rq.i0); i <= std::max(rp.i1, rq.i0); ++i) {
        for (int k = 0; k < 3; ++k) {
          const int v = st.id[i][k];
          if (v == p || v == q || seen[v]) continue;
          seen[v] = true;
          const Vec2 w = st.pos[v] - P;
          const double t = dot(w, d) / len;
          if (t > 1e-9 && t < len - 1e-9 && std::abs(cross(d, w)) / len <= 1e-9 * std::max(1.0, len)) on.push_back({t, v});
        }
      }
      std::sort(on.begin(), on.end());
      for (const auto& [t, v] : on) full.push_back(v);
      full.push_back(q);
    }
    if (full.size() != path.size()) {
      angles.clear();
      for (std::size_t j = 1; j + 1 < full.size(); ++j) {
        const int u = full[j];
        const double K = s.cone_points()[st.cls[u]].angle;
        const double A = strip_angle(s, st, run_of(st, u, first, last), u, st.pos[full[j - 1]] - st.pos[u],
                                     st.pos[full[j + 1]] - st.pos[u]);
        angles.push_back({A, K - A});
      }
    }

    // Pieces as traced saddle connections.
    const Vec2 origin = st.pos[sId];
    g.points.clear();
    g.vertices.clear();
    for (int id : full) {
      g.points.push_back(st.pos[id] - origin);
      g.vertices.push_back(st.cls[id]);
    }
    for (std::size_t j = 0; j + 1 < full.size(); ++j) {
      const int p = full[j];
      const Vec2 hol = st.pos[full[j + 1]] - st.pos[p];
      const Run rp = run_of(st, p, 0, n);
      SaddleConnection sc;
      bool ok = false;
      for (int i = rp.i0; i <= rp.i1 && !ok; ++i) {
        const int k = corner_of(st.id[i], p);
        const Vec2 e1 = st.pos[st.id[i][(k + 1) % 3]] - st.pos[p];
        const Vec2 e2 = st.pos[st.id[i][(k + 2) % 3]] - st.pos[p];
        const double tol = 1e-10;
        if (signed_angle(e1, hol) < -tol || signed_angle(hol, e2) < -tol) continue;
        const double cone = s.cone_coordinate({st.tri[i], k}, hol);
        ok = s.trace_saddle(st.cls[p], cone, hol, &sc);
      }
      if (!ok) throw Error(ErrorCode::Internal, "geodesic segment is not a saddle connection");
      g.totalLength += sc.length;
      g.pieces.push_back(std::move(sc));
    }
    g.junctionAngles = std::move(angles);
    if (g.totalLength > opt.radius)
      throw Error(ErrorCode::BallExceeded, "geodesic leaves the realized ball");
    return g;
  }
  throw Error(ErrorCode::Internal, "geodesic rerouting did not converge");
}

std::vector<Lift> geodesic_lifts(const TranslationSurface& s, const Lift& a, const FlatGeodesic& g) {
  std::vector<Lift> out{a};
  for (const auto& p : g.pieces) out.push_back(follow(s, out.back(), p));
  return out;
}

std::string lift_key(const TranslationSurface& s, const Lift& l, const GeodesicOptions& opt) {
  const FlatGeodesic g = flat_geodesic(s, Lift{}, l, opt);
  std::ostringstream os;
  os << lift_vertex(s, l);
  for (const auto& p : g.pieces)
    os << '|' << std::llround(p.startCone * 1e6) << ',' << std::llround(p.holonomy.x * 1e6) << ','
       << std::llround(p.holonomy.y * 1e6);
  return os.str();
}

}  // namespace flatbundle
