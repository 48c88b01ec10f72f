#include "flatbundle/slimness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flatbundle {

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  const double t = l2 > 0.0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
  return (p - (a + ab * t)).norm();
}

int ball_containing(const HoroFamily& f, DiskPoint p) {
  for (std::size_t i = 0; i < f.regions.size(); ++i)
    if (f.regions[i].kind == HoroKind::Ball && f.regions[i].ball.contains(p)) return static_cast<int>(i);
  return -1;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::min(v.size() - 1, idx == 0 ? 0 : idx - 1)];
}

double hausdorff_to(const BundleModel& m, const std::vector<PathSample>& from,
                    const std::vector<const std::vector<PathSample>*>& targets) {
  double worst = 0.0;
  for (const PathSample& a : from) {
    double best = std::numeric_limits<double>::infinity(), coshBest = best;
    for (const auto* t : targets) {
      for (const PathSample& b : *t) {
        if (best == 0.0) break;
        if (!(a.region >= 0 && a.region == b.region)) {
          // Hyperbolic part alone already exceeds the best candidate.
          const Cx d = a.upper - b.upper;
          const double arg = 1.0 + std::norm(d) / (2.0 * a.upper.imag() * b.upper.imag());
          if (arg >= coshBest) continue;
        }
        const double d = sample_distance(m, a, b);
        if (d < best) {
          best = d;
          coshBest = std::cosh(d);
        }
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

std::vector<PathSample> sample_path(const BundleModel& m, const PreferredPath& p, const SampleOptions& opt) {
  const HoroFamily& f = *m.family;
  const TranslationSurface& s = *m.surface;
  std::vector<PathSample> out;
  auto push = [&](DiskPoint base, Vec2 dev, int region, int vertex) {
    PathSample smp;
    smp.base = base;
    smp.upper = disk_to_upper(base.z);
    smp.frame = section(base);
    smp.dev = dev;
    if (opt.collapse && region >= 0 && m.graphs[static_cast<std::size_t>(region)]) {
      smp.region = region;
      smp.spine = m.graphs[static_cast<std::size_t>(region)]->decomposition.spineOfVertex[static_cast<std::size_t>(vertex)];
    }
    out.push_back(smp);
  };
  for (std::size_t i = 0; i < p.pieces.size(); ++i) {
    const PathPiece& piece = p.pieces[i];
    const int n = std::max(1, static_cast<int>(std::ceil(piece.length / opt.step - 1e-9)));
    for (int t = (i == 0 ? 0 : 1); t <= n; ++t) {
      const double u = static_cast<double>(t) / n;
      if (piece.kind == PieceKind::Horizontal) {
        const DiskPoint base = t == 0 ? piece.from : t == n ? piece.to : geodesic_point(piece.from, piece.to, piece.length * u);
        push(base, piece.devStart, opt.collapse ? ball_containing(f, base) : -1, lift_vertex(s, piece.lift));
      } else {
        const bool ball = f.regions[static_cast<std::size_t>(piece.region)].kind == HoroKind::Ball;
        push(piece.from, piece.devStart + (piece.devEnd - piece.devStart) * u, ball ? piece.region : -1, piece.saddle.start);
      }
    }
  }
  return out;
}

double sample_distance(const BundleModel& m, const PathSample& a, const PathSample& b) {
  if (a.region >= 0 && a.region == b.region) {
    const auto& table = m.spineDistance[static_cast<std::size_t>(a.region)];
    const int v = m.graphs[static_cast<std::size_t>(a.region)]->vertexCount;
    return table[static_cast<std::size_t>(a.spine * v + b.spine)];
  }
  const Cx d = a.upper - b.upper;
  const double rho = std::acosh(1.0 + std::norm(d) / (2.0 * a.upper.imag() * b.upper.imag()));
  const Vec2 delta = a.dev - b.dev;
  return rho + std::min((a.frame * delta).norm(), (b.frame * delta).norm());
}

double sides_slimness(const BundleModel& m, const std::vector<std::vector<PathSample>>& sides) {
  double delta = 0.0;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    std::vector<const std::vector<PathSample>*> others;
    for (std::size_t j = 0; j < sides.size(); ++j)
      if (j != i) others.push_back(&sides[j]);
    delta = std::max(delta, hausdorff_to(m, sides[i], others));
  }
  return delta;
}

double triangle_slimness(const BundleModel& m, const FiberPoint& x, const FiberPoint& y, const FiberPoint& z,
                         const SampleOptions& opt) {
  const std::vector<std::vector<PathSample>> sides{
      sample_path(m, build_preferred_path(m, x, y), opt),
      sample_path(m, build_preferred_path(m, y, z), opt),
      sample_path(m, build_preferred_path(m, x, z), opt),
  };
  return sides_slimness(m, sides);
}

double euclidean_slimness(DiskPoint X, const std::array<Vec2, 3>& corners, double step) {
  const Mat2 A = section(X);
  std::array<Vec2, 3> c{};
  for (int i = 0; i < 3; ++i) c[i] = A * corners[i];
  double delta = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = c[i], b = c[(i + 1) % 3], o = c[(i + 2) % 3];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step)));
    for (int t = 0; t <= n; ++t) {
      const Vec2 p = a + (b - a) * (static_cast<double>(t) / n);
      delta = std::max(delta, std::min(segment_distance(p, b, o), segment_distance(p, o, a)));
    }
  }
  return delta;
}

FanLemmaResult fan_lemma_check(const BundleModel& m, const Fan& f, DiskPoint base, const SampleOptions& opt) {
  FanLemmaResult r;
  const FiberPoint apex{base, f.apex}, zp{base, f.junctions.front()}, xp{base, f.junctions.back()};
  const auto top1 = sample_path(m, build_preferred_path(m, zp, apex), opt);
  const auto top2 = sample_path(m, build_preferred_path(m, apex, xp), opt);
  const auto bottom = sample_path(m, build_preferred_path(m, zp, xp), opt);
  r.delta = sides_slimness(m, {top1, top2, bottom});
  r.furtherDelta = std::max(hausdorff_to(m, top1, {&bottom}), hausdorff_to(m, top2, {&bottom}));
  const HoroRegion* rz = m.family->find(Direction::of(f.junctionDev.front() - f.apexDev));
  const HoroRegion* rx = m.family->find(Direction::of(f.junctionDev.back() - f.apexDev));
  if (rz && rx) {
    const double detour = hyp_distance(rz->anchor, base) + hyp_distance(base, rx->anchor) - hyp_distance(rz->anchor, rx->anchor);
    r.applies = detour <= 1e-9;
  }
  r.furthermoreHolds = !r.applies || std::isfinite(r.furtherDelta);
  return r;
}

double gromov_four_point(int n, const std::function<double(int, int)>& dist) {
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(i * n + j)] = dist(i, j);
  auto D = [&](int i, int j) { return d[static_cast<std::size_t>(i * n + j)]; };
  double delta = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int e = c + 1; e < n; ++e) {
          double s[3] = {D(a, b) + D(c, e), D(a, c) + D(b, e), D(a, e) + D(b, c)};
          std::sort(s, s + 3);
          delta = std::max(delta, 0.5 * (s[2] - s[1]));
        }
  return delta;
}

SlimnessReport slimness_sweep(const BundleModel& m, const SweepOptions& opt) {
  SlimnessReport rep;
  std::mt19937_64 rng(opt.seed);
  SampleOptions fine = opt.sample;
  fine.step *= 0.5;
  const int maxAttempts = 20 * opt.triangles;
  for (int attempt = 0; attempt < maxAttempts && static_cast<int>(rep.perTriangle.size()) < opt.triangles; ++attempt) {
    FiberPoint p[3];
    for (auto& q : p) {
      q.base = random_base(m, opt.baseRadius, rng);
      q.fiber = random_lift(m, opt.liftSteps, rng);
    }
    try {
      const double d = triangle_slimness(m, p[0], p[1], p[2], opt.sample);
      const double dFine = triangle_slimness(m, p[0], p[1], p[2], fine);
      rep.perTriangle.push_back(d);
      rep.perTriangleHalfStep.push_back(dFine);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingHoroRegion) throw;
      ++rep.skipped;
    }
  }
  rep.samples = static_cast<int>(rep.perTriangle.size());
  for (std::size_t i = 0; i < rep.perTriangle.size(); ++i) {
    rep.deltaMax = std::max(rep.deltaMax, rep.perTriangle[i]);
    rep.halfStepDeltaMax = std::max(rep.halfStepDeltaMax, rep.perTriangleHalfStep[i]);
    if (2 * i >= rep.perTriangle.size()) rep.secondHalfMax = std::max(rep.secondHalfMax, rep.perTriangle[i]);
  }
  rep.q50 = quantile(rep.perTriangle, 0.5);
  rep.q90 = quantile(rep.perTriangle, 0.9);
  rep.q99 = quantile(rep.perTriangle, 0.99);
  return rep;
}

}  // namespace flatbundle
