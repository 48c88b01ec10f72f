#include <algorithm>
#include <cmath>
#include <limits>

#include "flatbundle/error.hpp"
#include "flatbundle/veech.hpp"

namespace flatbundle {

namespace {

std::vector<int> inverse_letters(const std::vector<int>& w) {
  std::vector<int> out(w.rbegin(), w.rend());
  for (int& l : out) l ^= 1;
  return out;
}

std::vector<int> concat_reduced(std::vector<int> a, const std::vector<int>& b) {
  for (int l : b) {
    if (!a.empty() && (a.back() ^ 1) == l) a.pop_back();
    else a.push_back(l);
  }
  return a;
}

Word make_word(const std::vector<Mat2>& gens, std::vector<int> letters) {
  Word w;
  w.letters = std::move(letters);
  for (int l : w.letters) {
    const Mat2& g = gens[static_cast<std::size_t>(l / 2)];
    w.m = w.m * (l % 2 ? g.inverse_sl2() : g);
  }
  return w;
}

struct OrbitEntry {
  double angle;
  int rep;
  std::vector<int> transport;
};

class OrbitTable {
 public:
  void add(const BoundaryPoint& p, int rep, const std::vector<Word>& words) {
    entries_.push_back({p.angle, rep, {}});
    for (const Word& w : words) entries_.push_back({act(w.m, p).angle, rep, w.letters});
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const OrbitEntry& a, const OrbitEntry& b) { return a.angle < b.angle; });
  }

  const OrbitEntry* find(BoundaryPoint p, double tol) const {
    if (entries_.empty()) return nullptr;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), p.angle - tol,
                               [](const OrbitEntry& e, double a) { return e.angle < a; });
    const OrbitEntry* best = nullptr;
    double bestGap = tol;
    auto consider = [&](const OrbitEntry& e) {
      const double g = boundary_gap({e.angle}, p);
      if (g <= bestGap && (!best || e.transport.size() < best->transport.size() || g < bestGap)) {
        bestGap = g;
        best = &e;
      }
    };
    for (auto j = it; j != entries_.end() && j->angle <= p.angle + tol; ++j) consider(*j);
    consider(entries_.front());
    consider(entries_.back());
    return best;
  }

 private:
  std::vector<OrbitEntry> entries_;
};

struct DirectionGroup {
  Direction dir;
  Vec2 shortest;
};

std::vector<DirectionGroup> group_directions(const std::vector<SaddleConnection>& saddles, double tol) {
  std::vector<const SaddleConnection*> sorted;
  for (const auto& s : saddles) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SaddleConnection* a, const SaddleConnection* b) { return a->direction.theta < b->direction.theta; });
  std::vector<DirectionGroup> out;
  for (const SaddleConnection* s : sorted) {
    if (!out.empty() && s->direction.theta - out.back().dir.theta <= tol) {
      if (s->length < out.back().shortest.norm()) out.back().shortest = s->holonomy;
      continue;
    }
    out.push_back({s->direction, s->holonomy});
  }
  if (out.size() > 1 && same_direction(out.front().dir, out.back().dir, tol)) {
    if (out.back().shortest.norm() < out.front().shortest.norm()) out.front().shortest = out.back().shortest;
    out.pop_back();
  }
  return out;
}

struct Rep {
  BoundaryPoint at;
  Word parabolic;
  double shortest = 0.0;  // flat length of the shortest saddle in the representative direction
  double level = 0.0;
  bool used = false;
};

struct Classified {
  bool parabolic = false;
  int rep = -1;
  std::vector<int> transport;  // direction = transport . rep
};

// Samples of the horocycle of b over one period of the parabolic p, starting at the point nearest `from`.
std::vector<DiskPoint> horocycle_samples(const Horoball& b, const Mat2& p, DiskPoint from, int n) {
  const auto f = HalfPlaneFrame::make(std::polar(1.0, b.base.angle + kPi), b.base.z());
  const double h = f.to(b.apex().z).imag();
  const Cx q{f.to(from.z).real(), h};
  const double tau = f.to(act(p, DiskPoint{f.from(q)}).z).real() - q.real();
  std::vector<DiskPoint> out;
  for (int j = 0; j < n; ++j) out.push_back({f.from(q + Cx{tau * j / n, 0.0})});
  return out;
}

DiskPoint nearest_on_horocycle(const Horoball& b, DiskPoint from) {
  const auto f = HalfPlaneFrame::make(std::polar(1.0, b.base.angle + kPi), b.base.z());
  return {f.from(Cx{f.to(from.z).real(), f.to(b.apex().z).imag()})};
}

struct BallCheck {
  const std::vector<DirectionGroup>* dirs;
  const ConvexRegion* hull;
  DiskPoint basepoint;
  int samples;
  double tol;

  bool one_third(const Horoball& b, Direction d, double level, const Mat2& p) const {
    for (const DiskPoint& X : horocycle_samples(b, p, basepoint, samples))
      for (const DirectionGroup& g : *dirs) {
        if (same_direction(g.dir, d, tol)) continue;
        if (saddle_length_at(X, g.shortest) < 3.0 * level * (1.0 - 1e-9)) return false;
      }
    return true;
  }

  bool hull_far(const Horoball& b) const {
    for (const Geodesic& side : hull->sides) {
      if (boundary_gap(side.a, b.base) <= tol || boundary_gap(side.b, b.base) <= tol) continue;
      if (horoball_distance(b, side) < 1.0 - 1e-9) return false;
    }
    return true;
  }
};

}  // namespace

const HoroRegion* HoroFamily::find(Direction d, double tol) const {
  auto it = std::lower_bound(regions.begin(), regions.end(), d.theta - tol,
                             [](const HoroRegion& r, double t) { return r.direction.theta < t; });
  if (it != regions.end() && same_direction(it->direction, d, tol)) return &*it;
  if (!regions.empty() && same_direction(regions.front().direction, d, tol)) return &regions.front();
  if (!regions.empty() && same_direction(regions.back().direction, d, tol)) return &regions.back();
  return nullptr;
}

std::size_t HoroFamily::ball_count() const {
  return static_cast<std::size_t>(
      std::count_if(regions.begin(), regions.end(), [](const HoroRegion& r) { return r.kind == HoroKind::Ball; }));
}

HoroFamily build_horoball_family(const VeechGroupData& g, const std::vector<SaddleConnection>& saddles,
                                 const HoroballOptions& opt) {
  if (saddles.empty()) throw Error(ErrorCode::InvalidConfig, "no saddle connections to classify");
  const std::vector<Mat2> gens = g.derivatives();
  const std::vector<Word> words = reduced_words(gens, g.wordDepth);
  const std::vector<Word> shortWords = reduced_words(gens, std::min(3, g.wordDepth));
  const double tol = opt.directionTol;

  std::vector<Rep> reps;
  OrbitTable table;
  for (const ParabolicPoint& p : g.parabolicFixedPoints) {
    if (table.find(p.at, tol)) continue;
    table.add(p.at, static_cast<int>(reps.size()), words);
    reps.push_back({p.at, p.witness});
  }
  const PingPong cover = ping_pong_cover(gens, opt.certificateLevel);

  const auto dirs = group_directions(saddles, tol);
  std::vector<Classified> cls(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const BoundaryPoint b = boundary_of(dirs[i].dir);
    if (const OrbitEntry* e = table.find(b, tol)) {
      cls[i] = {true, e->rep, e->transport};
      continue;
    }
    Vec2 v = dirs[i].shortest;
    std::vector<int> back;  // letters of T^{-1} where v = T . shortest
    for (int iter = 0; iter < 200; ++iter) {
      const Word* best = nullptr;
      double bestLen = v.norm() * (1.0 - 1e-12);
      for (const Word& w : shortWords) {
        const double l = (w.m * v).norm();
        if (l < bestLen) { bestLen = l; best = &w; }
      }
      if (!best) break;
      v = best->m * v;
      back = concat_reduced(back, inverse_letters(best->letters));
    }
    if (const OrbitEntry* e = table.find(boundary_of(Direction::of(v)), tol)) {
      cls[i] = {true, e->rep, concat_reduced(back, e->transport)};
      continue;
    }
    if (cover.certifies_outside(b)) continue;
    throw Error(ErrorCode::DirectionInsideHullNotParabolic,
                "saddle direction " + std::to_string(dirs[i].dir.theta) +
                    " has no parabolic witness up to depth " + std::to_string(g.wordDepth) +
                    " and no outside certificate");
  }

  HoroFamily fam;
  const ConvexRegion hull = effective_hull(g);
  fam.basepoint = project_to_region(DiskPoint{}, hull);
  BallCheck check{&dirs, &hull, fam.basepoint, opt.samples, tol};

  struct BallInfo {
    std::size_t dir;
    Mat2 parabolic;
    Mat2 transport;
    std::string witness;
  };
  std::vector<BallInfo> balls;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (!cls[i].parabolic) continue;
    const Rep& r = reps[static_cast<std::size_t>(cls[i].rep)];
    const Word t = make_word(gens, cls[i].transport);
    const Word w = make_word(gens, concat_reduced(concat_reduced(t.letters, r.parabolic.letters), inverse_letters(t.letters)));
    balls.push_back({i, w.m, t.m, w.str()});
  }
  // Largest admissible level of each ball; an orbit shares the smallest of its members.
  for (const BallInfo& bi : balls) {
    const Direction d = dirs[bi.dir].dir;
    const double a = dirs[bi.dir].shortest.norm();
    auto ok = [&](double level) {
      const Horoball b = horoball_for_level(d, a, level);
      return check.hull_far(b) && check.one_third(b, d, level, bi.parabolic);
    };
    double lo = a;
    for (int i = 0; i < 80 && !ok(lo); ++i) lo *= 0.5;
    if (!ok(lo)) throw Error(ErrorCode::InvariantFailed, "no admissible horoball for a parabolic direction");
    double hi = 2.0 * lo;
    while (ok(hi) && hi < 1e6 * a) { lo = hi; hi *= 2.0; }
    while (hi / lo - 1.0 > 1e-7) {
      const double mid = std::sqrt(lo * hi);
      (ok(mid) ? lo : hi) = mid;
    }
    Rep& r = reps[static_cast<std::size_t>(cls[bi.dir].rep)];
    if (!r.used || lo < r.level) {
      r.level = lo;
      r.shortest = (bi.transport.inverse_sl2() * dirs[bi.dir].shortest).norm();
    }
    r.used = true;
  }
  auto build_ball = [&](const BallInfo& bi) {
    const Rep& r = reps[static_cast<std::size_t>(cls[bi.dir].rep)];
    return horoball_for_level(dirs[bi.dir].dir, dirs[bi.dir].shortest.norm(), r.level);
  };
  auto min_separation = [&]() {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < balls.size(); ++i)
      for (std::size_t j = i + 1; j < balls.size(); ++j)
        m = std::min(m, horoball_distance(build_ball(balls[i]), build_ball(balls[j])));
    return m;
  };
  double sep = min_separation();
  if (sep < 1.0) {
    const double shrink = std::exp(-0.5 * ((1.0 - sep) / 2.0 + 1e-9));
    for (Rep& r : reps) r.level *= shrink;
    sep = min_separation();
  }
  fam.minBallSeparation = balls.size() > 1 ? sep : 0.0;

  for (std::size_t i = 0; i < dirs.size(); ++i) {
    HoroRegion reg;
    reg.direction = dirs[i].dir;
    reg.shortestHolonomy = dirs[i].shortest;
    if (!cls[i].parabolic) {
      reg.kind = HoroKind::Point;
      reg.anchor = project_ideal_to_region(boundary_of(dirs[i].dir), hull);
      reg.witness = "outside";
      fam.regions.push_back(reg);
    }
  }
  for (const BallInfo& bi : balls) {
    const Rep& r = reps[static_cast<std::size_t>(cls[bi.dir].rep)];
    HoroRegion reg;
    reg.kind = HoroKind::Ball;
    reg.direction = dirs[bi.dir].dir;
    reg.shortestHolonomy = dirs[bi.dir].shortest;
    reg.ball = build_ball(bi);
    reg.lengthLevel = r.level;
    reg.anchor = nearest_on_horocycle(reg.ball, fam.basepoint);
    reg.witness = bi.witness;
    const Horoball moved = horoball_for_level(direction_of(r.at), r.shortest, r.level).image(bi.transport);
    fam.equivarianceResidual = std::max(
        {fam.equivarianceResidual, std::abs(moved.center() - reg.ball.center()), std::abs(moved.radius - reg.ball.radius)});
    if (!check.one_third(reg.ball, reg.direction, r.level, bi.parabolic)) ++fam.oneThirdViolations;
    if (!check.hull_far(reg.ball)) ++fam.hullDistanceViolations;
    fam.regions.push_back(reg);
  }
  std::sort(fam.regions.begin(), fam.regions.end(),
            [](const HoroRegion& a, const HoroRegion& b) { return a.direction.theta < b.direction.theta; });
  return fam;
}

}  // namespace flatbundle
