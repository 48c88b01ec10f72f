#include "flatbundle/disk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatbundle/error.hpp"

namespace flatbundle {

namespace {

const Cx kI{0.0, 1.0};

Vec2 klein(Cx z) {
  const Cx k = 2.0 * z / (1.0 + std::norm(z));
  return {k.real(), k.imag()};
}

Cx from_klein(Vec2 k) {
  const double n2 = std::min(dot(k, k), 1.0);
  const Cx kk{k.x, k.y};
  return kk / (1.0 + std::sqrt(1.0 - n2));
}

Vec2 vec(Cx z) { return {z.real(), z.imag()}; }

// Euclidean radius of the horoball based at xi whose horocycle passes through z.
double radius_through(Cx xi, Cx z) {
  return std::norm(z - xi) / (2.0 * (1.0 - (z * std::conj(xi)).real()));
}

HalfPlaneFrame frame_at(BoundaryPoint base) {
  return HalfPlaneFrame::make(std::polar(1.0, base.angle + kPi), base.z());
}

double poisson(Cx xi, Cx z) { return (1.0 - std::norm(z)) / std::norm(xi - z); }

std::vector<DiskPoint> region_vertices(const ConvexRegion& R) {
  std::vector<DiskPoint> out;
  const std::size_t n = R.sides.size();
  for (std::size_t i = 0; i < n && n > 1; ++i) {
    DiskPoint at;
    if (geodesics_cross(R.sides[i], R.sides[(i + 1) % n], &at)) out.push_back(at);
  }
  return out;
}

}  // namespace

BoundaryPoint boundary_of(Direction d) { return {wrap_angle(-2.0 * d.theta) + 0.0}; }

Direction direction_of(BoundaryPoint b) { return Direction::from_angle(-0.5 * b.angle); }

double boundary_gap(BoundaryPoint a, BoundaryPoint b) {
  const double d = wrap_angle(a.angle - b.angle);
  return std::min(d, kTwoPi - d);
}

Cx disk_to_upper(Cx z) { return kI * (1.0 + z) / (1.0 - z); }
Cx upper_to_disk(Cx w) { return (w - kI) / (w + kI); }

double hyp_distance(DiskPoint p, DiskPoint q) {
  const double num = std::norm(p.z - q.z);
  const double den = (1.0 - std::norm(p.z)) * (1.0 - std::norm(q.z));
  return std::acosh(1.0 + 2.0 * num / den);
}

double teichmuller_distance(DiskPoint p, DiskPoint q) { return 0.5 * hyp_distance(p, q); }

Mat2 section(DiskPoint X) {
  const Cx w = disk_to_upper(X.z);
  const double sy = std::sqrt(w.imag());
  return {1.0 / sy, -w.real() / sy, 0.0, sy};
}

DiskPoint point_of_section(const Mat2& A) {
  const Mat2 B = A.inverse();
  const Cx w = (B.a * kI + B.b) / (B.c * kI + B.d);
  return {upper_to_disk(w)};
}

double saddle_length_at(DiskPoint X, Vec2 hol) {
  if (hol.norm() == 0.0) throw Error(ErrorCode::ZeroHolonomy, "holonomy vector is zero");
  return (section(X) * hol).norm();
}

CMat disk_form(const Mat2& m) {
  const CMat C{1.0, -kI, 1.0, kI};
  const CMat Cinv{kI / (2.0 * kI), kI / (2.0 * kI), -1.0 / (2.0 * kI), 1.0 / (2.0 * kI)};
  const CMat M{m.a, m.b, m.c, m.d};
  return C * M * Cinv;
}

DiskPoint act(const Mat2& m, DiskPoint p) { return {disk_form(m)(p.z)}; }

BoundaryPoint act(const Mat2& m, BoundaryPoint b) {
  return boundary_of(Direction::of(m * direction_of(b).unit()));
}

IsometryKind classify(const Mat2& m, double tol) {
  const double n = m.frobenius();
  const double eff = std::min(tol * std::max(1.0, n * n), 1e-3);
  const double tr = std::abs(m.trace());
  if (std::abs(tr - 2.0) <= eff) {
    const double s = m.trace() >= 0 ? 1.0 : -1.0;
    if (max_abs_diff(m, Mat2::diag(s, s)) <= eff) return IsometryKind::Identity;
    return IsometryKind::Parabolic;
  }
  return tr < 2.0 ? IsometryKind::Elliptic : IsometryKind::Hyperbolic;
}

std::vector<BoundaryPoint> boundary_fixed_points(const Mat2& m) {
  auto eigvec = [&](double lam) {
    const Vec2 r1{m.b, lam - m.a}, r2{lam - m.d, m.c};
    return r1.norm() >= r2.norm() ? r1 : r2;
  };
  const double tr = m.trace();
  switch (classify(m)) {
    case IsometryKind::Parabolic:
      return {boundary_of(Direction::of(eigvec(0.5 * tr)))};
    case IsometryKind::Hyperbolic: {
      const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0));
      const double big = 0.5 * (tr + (tr >= 0 ? disc : -disc));
      const double small = 1.0 / big;
      return {boundary_of(Direction::of(eigvec(big))), boundary_of(Direction::of(eigvec(small)))};
    }
    default:
      return {};
  }
}

HalfPlaneFrame HalfPlaneFrame::make(Cx u1, Cx u2) {
  HalfPlaneFrame f{u1, u2, 1.0};
  const double gap = wrap_angle(std::arg(u2) - std::arg(u1));
  const Cx u3 = u1 * std::polar(1.0, 0.5 * gap);
  const Cx d = (u3 - u1) / (u3 - u2);
  f.rot = std::conj(d) / std::abs(d);
  if (((-u1) / (-u2) * f.rot).imag() < 0.0) f.rot = -f.rot;
  return f;
}

bool ConvexRegion::contains(DiskPoint p, double tol) const {
  const Vec2 k = klein(p.z);
  for (const Geodesic& g : sides) {
    const Vec2 a = vec(g.a.z()), b = vec(g.b.z());
    if (cross(b - a, k - a) < -tol) return false;
  }
  return true;
}

double distance_to_geodesic(DiskPoint p, const Geodesic& g) {
  const Cx w = HalfPlaneFrame::make(g.a.z(), g.b.z()).to(p.z);
  return std::asinh(std::abs(w.real()) / w.imag());
}

DiskPoint perpendicular_foot(DiskPoint p, const Geodesic& g) {
  const auto f = HalfPlaneFrame::make(g.a.z(), g.b.z());
  return {f.from(kI * std::abs(f.to(p.z)))};
}

bool geodesics_cross(const Geodesic& g, const Geodesic& h, DiskPoint* at) {
  const Vec2 a1 = vec(g.a.z()), b1 = vec(g.b.z()), a2 = vec(h.a.z()), b2 = vec(h.b.z());
  const double s1 = cross(b1 - a1, a2 - a1), s2 = cross(b1 - a1, b2 - a1);
  const double s3 = cross(b2 - a2, a1 - a2), s4 = cross(b2 - a2, b1 - a2);
  const double eps = 1e-14;
  if (!(s1 * s2 < -eps && s3 * s4 < -eps)) return false;
  if (at) {
    const double t = s1 / (s1 - s2);
    at->z = from_klein(a2 + (b2 - a2) * t);
  }
  return true;
}

DiskPoint geodesic_point(DiskPoint p, DiskPoint q, double t) {
  const Cx qq = (q.z - p.z) / (1.0 - std::conj(p.z) * q.z);
  if (std::abs(qq) == 0.0) return p;
  const Cx w = std::tanh(0.5 * t) * qq / std::abs(qq);
  return {(w + p.z) / (1.0 + std::conj(p.z) * w)};
}

DiskPoint point_on_geodesic(const Geodesic& g, double s) {
  const auto f = HalfPlaneFrame::make(g.a.z(), g.b.z());
  return {f.from(kI * std::abs(f.to(0.0)) * std::exp(s))};
}

namespace {

// Candidate with the smallest score that lies in the region.
DiskPoint best_contained(std::vector<std::pair<double, DiskPoint>> cands, const ConvexRegion& R) {
  std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [score, c] : cands)
    if (R.contains(c, 1e-10)) return c;
  throw Error(ErrorCode::EmptyRegion, "region has no points");
}

}  // namespace

DiskPoint project_to_region(DiskPoint p, const ConvexRegion& R) {
  if (R.contains(p)) return p;
  std::vector<std::pair<double, DiskPoint>> cands;
  for (const Geodesic& g : R.sides) {
    const DiskPoint f = perpendicular_foot(p, g);
    cands.push_back({hyp_distance(p, f), f});
  }
  for (const DiskPoint& v : region_vertices(R)) cands.push_back({hyp_distance(p, v), v});
  return best_contained(std::move(cands), R);
}

DiskPoint project_ideal_to_region(BoundaryPoint b, const ConvexRegion& R) {
  const Cx xi = b.z();
  if (R.contains({xi}, 1e-10))
    throw Error(ErrorCode::EmptyRegion, "ideal point lies in the closure of the region");
  std::vector<std::pair<double, DiskPoint>> cands;
  for (const Geodesic& g : R.sides) {
    if (boundary_gap(g.a, b) < 1e-12 || boundary_gap(g.b, b) < 1e-12) continue;
    const auto f = HalfPlaneFrame::make(g.a.z(), g.b.z());
    const DiskPoint c{f.from(kI * std::abs(f.to(xi).real()))};
    cands.push_back({-poisson(xi, c.z), c});
  }
  for (const DiskPoint& v : region_vertices(R)) cands.push_back({-poisson(xi, v.z), v});
  return best_contained(std::move(cands), R);
}

DiskPoint ideal_incenter(const IdealTriangle& T) {
  for (int i = 0; i < 3; ++i)
    if (boundary_gap(T.v[i], T.v[(i + 1) % 3]) < 1e-9)
      throw Error(ErrorCode::DegenerateTriangle, "ideal triangle has coincident vertices");
  const auto f = HalfPlaneFrame::make(T.v[0].z(), T.v[1].z());
  const double x3 = f.to(T.v[2].z()).real();
  return {f.from(Cx{0.5 * x3, 0.5 * std::sqrt(3.0) * std::abs(x3)})};
}

bool Horoball::contains(DiskPoint p, double tol) const { return std::abs(p.z - center()) <= radius + tol; }

Horoball Horoball::image(const Mat2& m) const {
  const BoundaryPoint b = act(m, base);
  const DiskPoint p = act(m, apex());
  return {b, radius_through(b.z(), p.z)};
}

Horoball horoball_for_level(Direction d, double shortest, double level) {
  const double l2 = level * level;
  return {boundary_of(d), l2 / (l2 + shortest * shortest)};
}

double horoball_level(const Horoball& b, double shortest) {
  return shortest * std::sqrt(b.radius / (1.0 - b.radius));
}

double horoball_distance(const Horoball& b, DiskPoint p) {
  const auto f = frame_at(b.base);
  const double h = f.to(b.apex().z).imag();
  return std::max(0.0, std::log(h / f.to(p.z).imag()));
}

double horoball_distance(const Horoball& b, const Geodesic& g) {
  if (boundary_gap(b.base, g.a) < 1e-9 || boundary_gap(b.base, g.b) < 1e-9) return 0.0;
  const auto f = HalfPlaneFrame::make(g.a.z(), b.base.z());
  const double h = f.to(b.apex().z).imag();
  const double top = 0.5 * std::abs(f.to(g.b.z()).real());
  return std::max(0.0, std::log(h / top));
}

double horoball_distance(const Horoball& b, const Horoball& c) {
  if (boundary_gap(b.base, c.base) < 1e-12) return 0.0;
  const auto f = HalfPlaneFrame::make(c.base.z(), b.base.z());
  const double h = f.to(b.apex().z).imag();
  const Cx w = f.to(c.apex().z);
  const double D = std::norm(w) / w.imag();
  return std::max(0.0, std::log(h / D));
}

double horoball_chord(const Horoball& b, DiskPoint p, DiskPoint q) {
  const double len = hyp_distance(p, q);
  if (len == 0.0) return 0.0;
  const auto f = frame_at(b.base);
  const double h = f.to(b.apex().z).imag();
  const Cx P = f.to(p.z), Q = f.to(q.z);
  double inside = 0.0;
  if (std::abs(P.real() - Q.real()) <= 1e-14 * (P.imag() + Q.imag())) {
    const double lo = std::min(P.imag(), Q.imag()), hi = std::max(P.imag(), Q.imag());
    if (hi > h) inside = std::log(hi / std::max(lo, h));
  } else {
    const double c = (std::norm(P) - std::norm(Q)) / (2.0 * (P.real() - Q.real()));
    const double R = std::hypot(P.real() - c, P.imag());
    if (R > h) {
      const double phiP = std::atan2(P.imag(), P.real() - c), phiQ = std::atan2(Q.imag(), Q.real() - c);
      const double a = std::asin(h / R);
      const double lo = std::max(std::min(phiP, phiQ), a), hi = std::min(std::max(phiP, phiQ), kPi - a);
      if (hi > lo) inside = std::log(std::tan(0.5 * hi) / std::tan(0.5 * lo));
    }
  }
  return std::clamp(inside, 0.0, len);
}

}  // namespace flatbundle
