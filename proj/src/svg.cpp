#include "flatbundle/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace flatbundle {

namespace {

constexpr double kRadius = 480.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

struct Canvas {
  std::ostringstream os;

  Canvas() {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
  }
  std::string finish() {
    os << "</svg>\n";
    return os.str();
  }
};

std::string pt(Cx z) { return num(500.0 + kRadius * z.real()) + "," + num(500.0 - kRadius * z.imag()); }

// Path command drawing the ideal geodesic from a to b as a circular arc (or a diameter).
std::string arc_to(Cx a, Cx b) {
  const double angle = std::abs(std::arg(b / a));
  const double r = std::tan(angle / 2.0);
  if (!(r < 1e6)) return " L " + pt(b);
  const bool ccw = (std::conj(a) * b).imag() > 0.0;
  return " A " + num(kRadius * r) + " " + num(kRadius * r) + " 0 0 " + (ccw ? "1 " : "0 ") + pt(b);
}

std::string ideal_polygon(const std::vector<Cx>& vertices) {
  std::string d = "M " + pt(vertices.front());
  for (std::size_t i = 0; i < vertices.size(); ++i) d += arc_to(vertices[i], vertices[(i + 1) % vertices.size()]);
  return d + " Z";
}

std::vector<Cx> segment_polyline(DiskPoint p, DiskPoint q) {
  const double len = hyp_distance(p, q);
  const int n = std::max(2, static_cast<int>(std::ceil(len / 0.1)));
  std::vector<Cx> out;
  for (int i = 0; i <= n; ++i) out.push_back(i == n ? q.z : geodesic_point(p, q, len * i / n).z);
  return out;
}

std::string points_attr(const std::vector<Cx>& zs) {
  std::string s;
  for (std::size_t i = 0; i < zs.size(); ++i) s += (i ? " " : "") + pt(zs[i]);
  return s;
}

void disk_and_hull(Canvas& c, const ConvexRegion& hull) {
  if (hull.sides.empty()) {
    c.os << "<circle cx=\"500.00\" cy=\"500.00\" r=\"" << num(kRadius) << "\" fill=\"#d6ecfa\" stroke=\"none\"/>\n";
  } else {
    std::vector<Cx> corners;
    for (const Geodesic& g : hull.sides) corners.push_back(g.a.z());
    c.os << "<path d=\"" << ideal_polygon(corners) << "\" fill=\"#d6ecfa\" stroke=\"#7fb5d9\" stroke-width=\"1\"/>\n";
  }
  c.os << "<circle cx=\"500.00\" cy=\"500.00\" r=\"" << num(kRadius) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
}

void horo_regions(Canvas& c, const HoroFamily& family) {
  for (const HoroRegion& r : family.regions) {
    if (r.kind == HoroKind::Ball) {
      const Cx ctr = r.ball.center();
      c.os << "<circle cx=\"" << num(500.0 + kRadius * ctr.real()) << "\" cy=\"" << num(500.0 - kRadius * ctr.imag())
           << "\" r=\"" << num(kRadius * r.ball.radius) << "\" fill=\"#f4d7a8\" fill-opacity=\"0.6\" stroke=\"#b07a20\" stroke-width=\"1\"/>\n";
    } else {
      const Cx z = r.anchor.z;
      c.os << "<circle cx=\"" << num(500.0 + kRadius * z.real()) << "\" cy=\"" << num(500.0 - kRadius * z.imag())
           << "\" r=\"4\" fill=\"#a02020\"/>\n";
    }
  }
}

}  // namespace

std::string render_horoballs(const ConvexRegion& hull, const HoroFamily& family) {
  Canvas c;
  disk_and_hull(c, hull);
  horo_regions(c, family);
  return c.finish();
}

std::string render_cylinders(const TranslationSurface& s, const CylinderDecomposition& dec) {
  Canvas c;
  const auto& polys = s.definition().polygons;
  // Polygons side by side, scaled to the canvas width.
  std::vector<Vec2> offset;
  double x = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& poly : polys) {
    double minx = lo, maxx = -lo;
    for (const Vec2& v : poly) {
      minx = std::min(minx, v.x), maxx = std::max(maxx, v.x);
      lo = std::min(lo, v.y), hi = std::max(hi, v.y);
    }
    offset.push_back({x - minx, 0.0});
    x += (maxx - minx) + 0.25;
  }
  const double width = std::max(x - 0.25, 1e-9), height = std::max(hi - lo, 1e-9);
  const double scale = 900.0 / std::max(width, height);
  auto sx = [&](Vec2 v, std::size_t poly) { return num(50.0 + scale * (v + offset[poly]).x); };
  auto sy = [&](Vec2 v, std::size_t poly) { return num(950.0 - scale * ((v + offset[poly]).y - lo)); };
  auto map = [&](Vec2 v, std::size_t poly) { return sx(v, poly) + "," + sy(v, poly); };
  static const char* palette[] = {"#cfe3f5", "#f5e0c8", "#d8f0d0", "#efd0ef", "#f3f0c0", "#d0f0ef"};
  for (std::size_t p = 0; p < polys.size(); ++p) {
    c.os << "<polygon points=\"";
    for (std::size_t i = 0; i < polys[p].size(); ++i) c.os << (i ? " " : "") << map(polys[p][i], p);
    c.os << "\" fill=\"" << palette[p % 6] << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  for (std::size_t t = 0; t < dec.pieces.size(); ++t) {
    const auto poly = static_cast<std::size_t>(s.tri(static_cast<int>(t)).polygon);
    for (const SaddlePiece& piece : dec.pieces[t])
      c.os << "<line x1=\"" << sx(piece.a, poly) << "\" y1=\"" << sy(piece.a, poly) << "\" x2=\"" << sx(piece.b, poly)
           << "\" y2=\"" << sy(piece.b, poly) << "\" stroke=\"#c03030\" stroke-width=\"2\"/>\n";
  }
  return c.finish();
}

std::string render_ideal_fan(const Fan& f, const ConvexRegion& hull) {
  Canvas c;
  disk_and_hull(c, hull);
  static const char* palette[] = {"#f2b8b8", "#b8d8f2", "#c8f2b8", "#f2e2b8"};
  const auto tris = f.triangles();
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& T = tris[i];
    const BoundaryPoint v[3] = {boundary_of(Direction::of(T[1] - T[0])), boundary_of(Direction::of(T[2] - T[1])),
                                boundary_of(Direction::of(T[2] - T[0]))};
    c.os << "<path d=\"" << ideal_polygon({v[0].z(), v[1].z(), v[2].z()}) << "\" fill=\"" << palette[i % 4]
         << "\" fill-opacity=\"0.7\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }
  return c.finish();
}

std::string render_path(const PreferredPath& p, const ConvexRegion& hull, const HoroFamily& family) {
  Canvas c;
  disk_and_hull(c, hull);
  horo_regions(c, family);
  for (const PathPiece& piece : p.pieces) {
    if (piece.kind == PieceKind::Horizontal) {
      c.os << "<polyline points=\"" << points_attr(segment_polyline(piece.from, piece.to))
           << "\" fill=\"none\" stroke=\"#203080\" stroke-width=\"2\"/>\n";
    } else {
      c.os << "<rect x=\"" << num(500.0 + kRadius * piece.from.z.real() - 5.0) << "\" y=\""
           << num(500.0 - kRadius * piece.from.z.imag() - 5.0) << "\" width=\"10\" height=\"10\" fill=\"#208040\"/>\n";
    }
  }
  return c.finish();
}

}  // namespace flatbundle
