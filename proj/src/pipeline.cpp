#include "flatbundle/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

#include "flatbundle/svg.hpp"
#include "json.hpp"

namespace flatbundle {

using json = nlohmann::ordered_json;

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, field + " " + why);
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["surface"] = c.surface;
  j["group"] = c.group;
  j["word_depth"] = c.wordDepth;
  j["max_length"] = c.maxLength;
  j["max_trace"] = c.maxTrace;
  j["unfolding_radius"] = c.unfoldingRadius;
  j["seed"] = c.seed;
  j["step"] = c.step;
  j["paths"] = c.paths;
  j["fans"] = c.fans;
  j["triangles"] = c.triangles;
  j["balance_triangles"] = c.balanceTriangles;
  j["decay_pairs"] = c.decayPairs;
  j["combo_pairs"] = c.comboPairs;
  j["gromov_points"] = c.gromovPoints;
  j["lift_steps"] = c.liftSteps;
  j["base_radius"] = c.baseRadius;
  j["out"] = c.out;
  return j;
}

std::string fixed(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

SuiteResult suite(const std::string& name, bool passed, const std::string& detail, const json& metrics) {
  return {name, passed, detail, metrics.dump()};
}

// One saddle step from a lift, chosen uniformly among the pool saddles at its cone point.
bool random_step(const BundleModel& m, const Lift& from, std::mt19937_64& rng, Lift* out) {
  const int v = lift_vertex(*m.surface, from);
  std::vector<std::pair<std::size_t, bool>> options;
  for (std::size_t i = 0; i < m.pool.size(); ++i) {
    if (m.pool[i].start == v) options.push_back({i, true});
    if (m.pool[i].end == v) options.push_back({i, false});
  }
  if (options.empty()) return false;
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  const auto [i, forward] = options[pick(rng)];
  *out = forward ? follow(*m.surface, from, m.pool[i]) : follow_reversed(*m.surface, from, m.pool[i]);
  return true;
}

struct FanSample {
  std::vector<Fan> fans;
  int triangles = 0;
  int notReducible = 0;
  int degenerate = 0;
};

FanSample sample_fans(const Experiment& e, int count, std::mt19937_64& rng) {
  FanSample out;
  const int steps = e.config.liftSteps;
  for (int attempt = 0; attempt < 50 * count && static_cast<int>(out.fans.size()) < count; ++attempt) {
    const Lift x = random_lift(e.model, steps, rng);
    Lift z;
    if (!random_step(e.model, x, rng, &z)) break;
    const Lift y = random_lift(e.model, steps + 1, rng);
    try {
      const auto fans = decompose_into_fans(e.surface, x, y, z, e.model.geodesic);
      ++out.triangles;
      if (fans.empty()) ++out.degenerate;
      for (const Fan& f : fans) out.fans.push_back(f);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NotReducible) throw;
      ++out.notReducible;
    }
  }
  if (static_cast<int>(out.fans.size()) > count) out.fans.resize(static_cast<std::size_t>(count));
  return out;
}

// Embedded Euclidean triangles of the pool, as pairs of holonomies from a shared corner.
std::vector<std::pair<Vec2, Vec2>> euclidean_triangles(const Experiment& e) {
  std::vector<std::pair<Vec2, Vec2>> out;
  for (const SaddleConnection& sc : e.saddles)
    for (const SpanTriangle& t : spanning_triangles(e.surface, sc, e.saddles, e.model.geodesic))
      out.push_back({t.first, t.second});
  return out;
}

// Words stay small enough that their images of unit vectors keep full precision.
constexpr double kMaxWordNorm = 30.0;

Mat2 random_word(const Experiment& e, std::mt19937_64& rng) {
  const auto gens = e.group.derivatives();
  Mat2 m = Mat2::identity();
  if (gens.empty()) return m;
  std::uniform_int_distribution<int> len(0, 3), letter(0, static_cast<int>(2 * gens.size()) - 1);
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const int l = letter(rng);
    const Mat2& g = gens[static_cast<std::size_t>(l / 2)];
    const Mat2 next = m * (l % 2 == 0 ? g : g.inverse_sl2());
    if (next.op_norm() > kMaxWordNorm) break;
    m = next;
  }
  return m;
}

SuiteResult run_gauss_bonnet(const Experiment& e) {
  const double r = e.surface.gauss_bonnet_residual();
  json m;
  m["genus"] = e.surface.genus();
  m["cone_points"] = e.surface.cone_points().size();
  m["residual"] = r;
  return suite("gauss_bonnet", std::abs(r) <= 1e-9, "angle defect identity", m);
}

SuiteResult run_enumeration(const Experiment& e) {
  int duplicates = 0, overLength = 0;
  for (std::size_t i = 0; i < e.saddles.size(); ++i) {
    const auto& a = e.saddles[i];
    if (a.length > e.config.maxLength * (1.0 + 1e-12) || std::abs(a.holonomy.norm() - a.length) > 1e-9) ++overLength;
    for (std::size_t j = i + 1; j < e.saddles.size(); ++j) {
      const auto& b = e.saddles[j];
      if ((a.holonomy - b.holonomy).norm() <= 1e-9 && a.startCorner.tri == b.startCorner.tri &&
          a.startCorner.k == b.startCorner.k)
        ++duplicates;
    }
  }
  json m;
  m["count"] = e.saddles.size();
  m["max_length"] = e.config.maxLength;
  m["duplicates"] = duplicates;
  m["length_violations"] = overLength;
  return suite("enumeration", !e.saddles.empty() && duplicates == 0 && overLength == 0,
               "saddle connections up to the cutoff, one per orientation class", m);
}

SuiteResult run_dichotomy(const Experiment& e) {
  json m;
  if (!e.familyError.empty()) {
    m["error"] = e.familyError;
    return suite("dichotomy", false, e.familyError, m);
  }
  int balls = 0, points = 0, open = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < e.family.regions.size(); ++i) {
    if (e.family.regions[i].kind == HoroKind::Ball) {
      ++balls;
      if (!e.model.graphs[i]) ++open;
      else area = std::max(area, std::abs(e.model.graphs[i]->decomposition.areaResidual));
    } else {
      ++points;
    }
  }
  m["directions"] = e.family.regions.size();
  m["parabolic"] = balls;
  m["outside_hull"] = points;
  m["unclassified"] = 0;
  m["parabolic_without_decomposition"] = open;
  m["max_area_residual"] = area;
  const bool ok = open == 0 && area <= 1e-6;
  return suite("dichotomy", ok, "every direction parabolic with witness or certified outside the limit set", m);
}

SuiteResult run_horoballs(const Experiment& e) {
  json m;
  if (!e.familyError.empty()) return suite("horoballs", false, e.familyError, m);
  const auto& f = e.family;
  m["balls"] = f.ball_count();
  m["points"] = f.regions.size() - f.ball_count();
  m["min_ball_separation"] = f.ball_count() > 1 ? f.minBallSeparation : 0.0;
  m["one_third_violations"] = f.oneThirdViolations;
  m["hull_distance_violations"] = f.hullDistanceViolations;
  m["equivariance_residual"] = f.equivarianceResidual;
  const bool ok = f.oneThirdViolations == 0 && f.hullDistanceViolations == 0 &&
                  (f.ball_count() < 2 || f.minBallSeparation >= 1.0 - 1e-9) && f.equivarianceResidual <= 1e-6;
  return suite("horoballs", ok, "balls separated by at least 1 and far from the hull boundary", m);
}

SuiteResult run_balance(const Experiment& e, const std::vector<std::pair<Vec2, Vec2>>& tris, std::mt19937_64& rng) {
  json m;
  const double A = e.surface.area();
  const double side = std::log(std::sqrt(3.0));
  int bad = 0, done = 0;
  double spread = 0.0, longest = 0.0, sideErr = 0.0;
  if (!tris.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, tris.size() - 1);
    for (int t = 0; t < e.config.balanceTriangles; ++t) {
      const auto& tri = tris[pick(rng)];
      const Mat2 w = random_word(e, rng);
      const Vec2 v[3] = {w * tri.first, w * tri.second, w * (tri.second - tri.first)};
      const IdealTriangle T{{boundary_of(Direction::of(v[0])), boundary_of(Direction::of(v[1])),
                             boundary_of(Direction::of(v[2]))}};
      const DiskPoint b = ideal_incenter(T);
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0, err = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double l = saddle_length_at(b, v[k]);
        lo = std::min(lo, l), hi = std::max(hi, l);
        err = std::max(err, std::abs(distance_to_geodesic(b, Geodesic{T.v[k], T.v[(k + 1) % 3]}) - side));
      }
      const double rel = (hi - lo) / hi;
      spread = std::max(spread, rel);
      longest = std::max(longest, hi / std::sqrt(A));
      sideErr = std::max(sideErr, err);
      if (rel > 1e-9 || hi > 2.0 * std::sqrt(A) + 1e-12 || err > 1e-9) ++bad;
      ++done;
    }
  }
  m["triangles"] = done;
  m["distinct_embedded"] = tris.size();
  m["max_relative_spread"] = spread;
  m["max_length_over_sqrt_area"] = longest;
  m["max_side_distance_error"] = sideErr;
  m["violations"] = bad;
  return suite("balance", done == e.config.balanceTriangles && bad == 0,
               "equal lengths at the ideal incenter, each at most 2 sqrt(area)", m);
}

SuiteResult run_decay(const Experiment& e, const std::vector<std::pair<Vec2, Vec2>>& tris, std::mt19937_64& rng) {
  json m;
  const double A = e.surface.area();
  int bad = 0, checks = 0;
  double worst = 0.0;
  if (!tris.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, tris.size() - 1);
    std::uniform_real_distribution<double> offset(-6.0, 6.0);
    for (int t = 0; t < e.config.decayPairs; ++t) {
      const auto& tri = tris[pick(rng)];
      const Mat2 w = random_word(e, rng);
      const Vec2 vx = w * tri.first, vy = w * tri.second;
      const Geodesic g{boundary_of(Direction::of(vx)), boundary_of(Direction::of(vy))};
      const double s0 = offset(rng);
      for (double L : {1.0, 2.0, 4.0, 8.0}) {
        // Segment of Teichmuller length L is 2L in the curvature -1 parameter.
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 100; ++i) {
          const DiskPoint p = point_on_geodesic(g, s0 + 2.0 * L * i / 99.0);
          best = std::min({best, saddle_length_at(p, vx), saddle_length_at(p, vy)});
        }
        const double bound = 2.0 * std::sqrt(3.0 * A) * std::exp(-L / 2.0);
        worst = std::max(worst, best / bound);
        if (best > bound) ++bad;
        ++checks;
      }
    }
  }
  m["pairs"] = e.config.decayPairs;
  m["checks"] = checks;
  m["max_ratio_to_bound"] = worst;
  m["violations"] = bad;
  return suite("decay", checks == 4 * e.config.decayPairs && bad == 0, "shorter side decays like 2 sqrt(3A) e^{-L/2}", m);
}

SuiteResult run_structure(const FanSample& fs, int wanted) {
  json m;
  int failures = 0, parallel = 0, maxK = 0;
  for (const Fan& f : fs.fans) {
    const StructureReport r = check_structure_lemma(f);
    if (!r.ordered) ++failures;
    maxK = std::max(maxK, f.k());
    for (std::size_t i = 1; i + 1 < f.junctionDev.size(); ++i)
      if (std::abs(cross(f.junctionDev[i] - f.junctionDev[i - 1], f.junctionDev[i + 1] - f.junctionDev[i])) < 1e-9) ++parallel;
  }
  m["fans"] = fs.fans.size();
  m["source_triangles"] = fs.triangles;
  m["degenerate_triangles"] = fs.degenerate;
  m["not_reducible"] = fs.notReducible;
  m["max_k"] = maxK;
  m["parallel_bottom_pairs"] = parallel;
  m["failures"] = failures;
  return suite("structure_lemma", static_cast<int>(fs.fans.size()) == wanted && failures == 0,
               "fan directions appear in cyclic order", m);
}

SuiteResult run_collapse(const Experiment& e, std::mt19937_64& rng, PreferredPath* example) {
  json m;
  int built = 0, missing = 0, violations = 0;
  double residual = 0.0, margin = std::numeric_limits<double>::infinity(), meanRatio = 0.0;
  for (int attempt = 0; attempt < 20 * e.config.paths && built < e.config.paths; ++attempt) {
    const FiberPoint x{random_base(e.model, e.config.baseRadius, rng), random_lift(e.model, e.config.liftSteps, rng)};
    const FiberPoint y{random_base(e.model, e.config.baseRadius, rng), random_lift(e.model, e.config.liftSteps, rng)};
    try {
      const PreferredPath p = build_preferred_path(e.model, x, y);
      ++built;
      residual = std::max(residual, p.continuityResidual);
      margin = std::min(margin, p.dLength - p.collapsedLength);
      if (p.dLength > 0.0) meanRatio += p.collapsedLength / p.dLength;
      if (p.collapsedLength > p.dLength + 1e-12) ++violations;
      if (example && example->pieces.size() < 5 && p.pieces.size() >= 5) *example = p;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::MissingHoroRegion) throw;
      ++missing;
    }
  }
  m["paths"] = built;
  m["missing_horo_region"] = missing;
  m["max_continuity_residual"] = residual;
  m["min_margin"] = built ? margin : 0.0;
  m["mean_collapsed_over_length"] = built ? meanRatio / built : 0.0;
  m["violations"] = violations;
  return suite("collapse", built == e.config.paths && violations == 0 && residual < 1e-9,
               "collapsed length never exceeds path length", m);
}

json slimness_json(const SlimnessReport& r, const SweepOptions& o) {
  json m;
  m["triangles"] = r.samples;
  m["skipped"] = r.skipped;
  m["seed"] = o.seed;
  m["step"] = o.sample.step;
  m["collapsed"] = o.sample.collapse;
  m["delta_max"] = r.deltaMax;
  m["second_half_delta_max"] = r.secondHalfMax;
  m["half_step_delta_max"] = r.halfStepDeltaMax;
  m["q50"] = r.q50;
  m["q90"] = r.q90;
  m["q99"] = r.q99;
  return m;
}

bool slim_ok(const SlimnessReport& r, int wanted) {
  return r.samples == wanted && std::isfinite(r.deltaMax) && r.secondHalfMax <= r.deltaMax &&
         std::abs(r.halfStepDeltaMax - r.deltaMax) < 0.05;
}

SuiteResult run_fan_lemma(const Experiment& e, const FanSample& fs) {
  json m;
  double delta = 0.0, further = 0.0, firstHalf = 0.0;
  int checked = 0, skipped = 0, applies = 0, holds = 0;
  const std::size_t n = std::min<std::size_t>(100, fs.fans.size());
  SampleOptions opt;
  opt.step = e.config.step;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const FanLemmaResult r = fan_lemma_check(e.model, fs.fans[i], e.family.basepoint, opt);
      ++checked;
      delta = std::max(delta, r.delta);
      further = std::max(further, r.furtherDelta);
      if (2 * i < n) firstHalf = std::max(firstHalf, r.delta);
      if (r.applies) ++applies;
      if (r.furthermoreHolds) ++holds;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::MissingHoroRegion) throw;
      ++skipped;
    }
  }
  m["fans"] = checked;
  m["skipped"] = skipped;
  m["delta_max"] = delta;
  m["first_half_delta_max"] = firstHalf;
  m["further_delta_max"] = further;
  m["furthermore_applies"] = applies;
  m["furthermore_holds"] = holds;
  const bool ok = checked > 0 && std::isfinite(delta) && std::isfinite(further) && holds == checked;
  return suite("fan_lemma", ok, "fan triangles of collapsed paths are slim", m);
}

double combo_max_ratio(const Experiment& e, std::uint64_t seed, int* used, int* notFound) {
  std::mt19937_64 rng(seed);
  const auto& regions = e.family.regions;
  double worst = 0.0;
  *used = 0;
  *notFound = 0;
  if (regions.empty()) return worst;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(regions.size()) - 1);
  for (int attempt = 0; attempt < 20 * e.config.comboPairs && *used < e.config.comboPairs; ++attempt) {
    const ComboNode v{pick(rng), random_lift(e.model, e.config.liftSteps, rng)};
    const ComboNode w{pick(rng), random_lift(e.model, e.config.liftSteps, rng)};
    const ComboPath c = combinatorial_path(e.model, v, w);
    if (!c.found) {
      ++*notFound;
      continue;
    }
    try {
      const PreferredPath p = build_preferred_path(e.model, {regions[static_cast<std::size_t>(v.region)].anchor, v.fiber},
                                                   {regions[static_cast<std::size_t>(w.region)].anchor, w.fiber});
      if (p.collapsedLength <= 1e-9) continue;
      worst = std::max(worst, c.length / p.collapsedLength);
      ++*used;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::MissingHoroRegion) throw;
    }
  }
  return worst;
}

SuiteResult run_combinatorial(const Experiment& e, std::mt19937_64& rng) {
  json m;
  const std::uint64_t s1 = rng(), s2 = rng();
  int used1 = 0, used2 = 0, nf1 = 0, nf2 = 0;
  const double r1 = combo_max_ratio(e, s1, &used1, &nf1);
  const double r2 = combo_max_ratio(e, s2, &used2, &nf2);
  const double spread = std::abs(r1 - r2) / std::max({r1, r2, 1e-300});
  m["pairs"] = {used1, used2};
  m["not_found"] = {nf1, nf2};
  m["max_ratio"] = {r1, r2};
  m["relative_difference"] = spread;
  const bool ok = used1 == e.config.comboPairs && used2 == e.config.comboPairs && std::isfinite(r1) &&
                  std::isfinite(r2) && spread <= 0.2;
  return suite("combinatorial", ok, "combinatorial length over collapsed length bounded and stable across seeds", m);
}

SuiteResult run_gromov(const Experiment& e, std::mt19937_64& rng) {
  json m;
  std::vector<FiberPoint> pts;
  std::vector<std::vector<double>> d;
  int rejected = 0;
  for (int attempt = 0; attempt < 50 * e.config.gromovPoints && static_cast<int>(pts.size()) < e.config.gromovPoints;
       ++attempt) {
    const FiberPoint p{random_base(e.model, e.config.baseRadius, rng), random_lift(e.model, e.config.liftSteps, rng)};
    std::vector<double> row;
    try {
      for (const FiberPoint& q : pts) row.push_back(build_preferred_path(e.model, q, p).collapsedLength);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::MissingHoroRegion) throw;
      ++rejected;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) d[i].push_back(row[i]);
    row.push_back(0.0);
    d.push_back(row);
    pts.push_back(p);
  }
  const int n = static_cast<int>(pts.size());
  double diam = 0.0;
  for (const auto& row : d)
    for (double v : row) diam = std::max(diam, v);
  const double delta = n >= 4 ? gromov_four_point(n, [&](int i, int j) { return d[i][j]; }) : 0.0;
  m["points"] = n;
  m["rejected"] = rejected;
  m["delta"] = delta;
  m["diameter"] = diam;
  m["delta_over_diameter"] = diam > 0.0 ? delta / diam : 0.0;
  return suite("gromov", n == e.config.gromovPoints && std::isfinite(delta), "four-point delta on collapsed path lengths", m);
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  require(!c.surface.empty(), "surface", "must be set");
  require(!c.group.empty(), "group", "must be set");
  require(c.wordDepth >= 1, "word_depth", "must be at least 1");
  require(c.maxLength > 0.0, "max_length", "must be positive");
  require(c.maxTrace > 0.0, "max_trace", "must be positive");
  require(c.unfoldingRadius > 0.0, "unfolding_radius", "must be positive");
  require(c.step > 0.0, "step", "must be positive");
  require(c.paths >= 1, "paths", "must be at least 1");
  require(c.fans >= 1, "fans", "must be at least 1");
  require(c.triangles >= 1, "triangles", "must be at least 1");
  require(c.balanceTriangles >= 1, "balance_triangles", "must be at least 1");
  require(c.decayPairs >= 1, "decay_pairs", "must be at least 1");
  require(c.comboPairs >= 1, "combo_pairs", "must be at least 1");
  require(c.gromovPoints >= 4 && c.gromovPoints <= 60, "gromov_points", "must be between 4 and 60");
  require(c.liftSteps >= 1, "lift_steps", "must be at least 1");
  require(c.baseRadius > 0.0, "base_radius", "must be positive");
  require(!c.out.empty(), "out", "must be set");
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  ExperimentConfig c;
  const json defaults = config_json(c);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!defaults.contains(it.key())) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + it.key() + "'");
  try {
    c.surface = j.value("surface", c.surface);
    c.group = j.value("group", c.group);
    c.wordDepth = j.value("word_depth", c.wordDepth);
    c.maxLength = j.value("max_length", c.maxLength);
    c.maxTrace = j.value("max_trace", c.maxTrace);
    c.unfoldingRadius = j.value("unfolding_radius", c.unfoldingRadius);
    c.seed = j.value("seed", c.seed);
    c.step = j.value("step", c.step);
    c.paths = j.value("paths", c.paths);
    c.fans = j.value("fans", c.fans);
    c.triangles = j.value("triangles", c.triangles);
    c.balanceTriangles = j.value("balance_triangles", c.balanceTriangles);
    c.decayPairs = j.value("decay_pairs", c.decayPairs);
    c.comboPairs = j.value("combo_pairs", c.comboPairs);
    c.gromovPoints = j.value("gromov_points", c.gromovPoints);
    c.liftSteps = j.value("lift_steps", c.liftSteps);
    c.baseRadius = j.value("base_radius", c.baseRadius);
    c.out = j.value("out", c.out);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) { return config_json(c).dump(2) + "\n"; }

std::unique_ptr<Experiment> prepare_experiment(const ExperimentConfig& c) {
  validate_config(c);
  auto e = std::make_unique<Experiment>();
  e->config = c;
  e->preset = resolve_group(c.group);
  const SurfaceDefinition def = resolve_surface(c.surface);
  if (!e->preset.surface.empty() && e->preset.surface != def.name)
    throw Error(ErrorCode::InvalidConfig,
                "group '" + e->preset.id + "' acts on surface '" + e->preset.surface + "', not '" + def.name + "'");
  e->surface = TranslationSurface::load(def);
  e->group = build_group(e->surface, e->preset.generators, e->preset.hints, c.wordDepth, e->preset.lattice);
  EnumerateOptions eo;
  eo.maxLength = c.maxLength;
  e->saddles = e->surface.enumerate_saddle_connections(eo);
  e->model.surface = &e->surface;
  e->model.group = &e->group;
  e->model.family = &e->family;
  e->model.pool = e->saddles;
  e->model.geodesic.radius = c.unfoldingRadius;
  try {
    e->family = build_horoball_family(e->group, e->saddles);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::DirectionInsideHullNotParabolic) throw;
    e->familyError = err.what();
    return e;
  }
  finalize_model(e->model, c.maxTrace);
  return e;
}

RunReport run_experiment(Experiment& e) {
  RunReport r;
  std::mt19937_64 rng(e.config.seed);
  r.suites.push_back(run_gauss_bonnet(e));
  r.suites.push_back(run_enumeration(e));
  r.suites.push_back(run_dichotomy(e));
  r.suites.push_back(run_horoballs(e));
  SlimnessReport slim;
  if (e.familyError.empty()) {
    const auto tris = euclidean_triangles(e);
    r.suites.push_back(run_balance(e, tris, rng));
    r.suites.push_back(run_decay(e, tris, rng));
    const FanSample fans = sample_fans(e, e.config.fans, rng);
    r.suites.push_back(run_structure(fans, e.config.fans));
    r.suites.push_back(run_collapse(e, rng, nullptr));

    SweepOptions so;
    so.triangles = e.config.triangles;
    so.seed = rng();
    so.liftSteps = e.config.liftSteps;
    so.baseRadius = e.config.baseRadius;
    so.sample.step = e.config.step;
    slim = slimness_sweep(e.model, so);
    r.suites.push_back(suite("slimness", slim_ok(slim, so.triangles),
                             "finite delta, no growth over the sweep, stable under step halving", slimness_json(slim, so)));
    r.deltas = slim.perTriangle;
    r.deltasHalfStep = slim.perTriangleHalfStep;

    if (e.family.ball_count() == 0 && e.group.parabolicFixedPoints.empty()) {
      so.sample.collapse = false;
      const SlimnessReport flat = slimness_sweep(e.model, so);
      json m = slimness_json(flat, so);
      m["balls"] = 0;
      r.suites.push_back(suite("convex_cocompact", slim_ok(flat, so.triangles),
                               "no parabolics: empty ball family and finite stable delta on uncollapsed paths", m));
    }
    r.suites.push_back(run_fan_lemma(e, fans));
    r.suites.push_back(run_combinatorial(e, rng));
    r.suites.push_back(run_gromov(e, rng));
  }

  r.passed = true;
  for (const auto& s : r.suites)
    if (!s.passed && r.passed) {
      r.passed = false;
      r.firstFailure = s.name;
    }

  json rep;
  rep["config"] = config_json(e.config);
  json surf;
  surf["name"] = e.surface.name();
  surf["genus"] = e.surface.genus();
  surf["area"] = e.surface.area();
  surf["cone_angles"] = json::array();
  for (const auto& cp : e.surface.cone_points()) surf["cone_angles"].push_back(cp.angle);
  rep["surface"] = surf;
  json grp;
  grp["id"] = e.preset.id;
  grp["lattice"] = e.preset.lattice;
  grp["generators"] = json::array();
  for (const auto& g : e.preset.generators) grp["generators"].push_back({g.a, g.b, g.c, g.d});
  grp["limit_sample"] = e.group.limitSample.size();
  grp["hull_sides"] = e.group.hull.sides.size();
  grp["parabolic_fixed_points"] = e.group.parabolicFixedPoints.size();
  rep["group"] = grp;
  rep["suites"] = json::array();
  for (const auto& s : r.suites) {
    json js;
    js["name"] = s.name;
    js["passed"] = s.passed;
    js["detail"] = s.detail;
    js["metrics"] = json::parse(s.metrics);
    rep["suites"].push_back(js);
  }
  rep["approximations"] = {
      "tree distances are quotient-graph distances (lower bounds for the universal-cover tree)",
      "collapsed distance between sampled points: rho between bases plus the shorter fiber displacement, or the tree "
      "distance when both points collapse into the same ball",
      "combinatorial paths move the fiber along the flat geodesic between the endpoints",
  };
  rep["passed"] = r.passed;
  rep["first_failure"] = r.firstFailure;
  r.reportJson = rep.dump(2) + "\n";

  std::string csv = "triangle,delta,delta_half_step\n";
  for (std::size_t i = 0; i < r.deltas.size(); ++i)
    csv += std::to_string(i) + "," + fixed(r.deltas[i]) + "," + fixed(r.deltasHalfStep[i]) + "\n";
  r.deltasCsv = csv;
  return r;
}

std::vector<std::string> render_kinds() { return {"ideal-fan", "horoballs", "cylinders", "path"}; }

std::string render_kind(Experiment& e, const std::string& kind) {
  const ConvexRegion hull = effective_hull(e.group);
  if (kind == "horoballs") {
    if (!e.familyError.empty()) throw Error(ErrorCode::MissingInput, "no horoball family: " + e.familyError);
    return render_horoballs(hull, e.family);
  }
  if (kind == "cylinders") {
    DirectionResult d = trace_direction(e.surface, Direction{0.0}, e.config.maxTrace);
    for (std::size_t i = 0; !d.closed && i < e.family.regions.size(); ++i)
      if (e.family.regions[i].kind == HoroKind::Ball) d = trace_direction(e.surface, e.family.regions[i].direction, e.config.maxTrace);
    if (!d.closed) throw Error(ErrorCode::MissingInput, "no periodic direction to draw");
    return render_cylinders(e.surface, d.decomposition);
  }
  if (!e.familyError.empty()) throw Error(ErrorCode::MissingInput, "no horoball family: " + e.familyError);
  std::mt19937_64 rng(e.config.seed);
  if (kind == "ideal-fan") {
    const FanSample fs = sample_fans(e, 200, rng);
    const Fan* best = nullptr;
    for (const Fan& f : fs.fans)
      if (!best || (best->k() < 3 && f.k() > best->k())) best = &f;
    if (!best) throw Error(ErrorCode::MissingInput, "no fan found");
    return render_ideal_fan(*best, hull);
  }
  if (kind == "path") {
    PreferredPath p;
    ExperimentConfig c = e.config;
    for (int attempt = 0; attempt < 200 && p.pieces.size() < 5; ++attempt) {
      const FiberPoint x{random_base(e.model, c.baseRadius, rng), random_lift(e.model, c.liftSteps, rng)};
      const FiberPoint y{random_base(e.model, c.baseRadius, rng), random_lift(e.model, c.liftSteps, rng)};
      try {
        p = build_preferred_path(e.model, x, y);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::MissingHoroRegion) throw;
      }
    }
    if (p.pieces.empty()) throw Error(ErrorCode::MissingInput, "no preferred path could be built");
    return render_path(p, hull, e.family);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown render kind '" + kind + "' (did you mean '" + nearest_name(kind, render_kinds()) + "'?)");
}

void write_run_outputs(Experiment& e, const RunReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  write_text_file(dir + "/report.json", r.reportJson);
  write_text_file(dir + "/deltas.csv", r.deltasCsv);
  for (const auto& kind : render_kinds()) {
    try {
      write_text_file(dir + "/" + kind + ".svg", render_kind(e, kind));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::MissingInput) throw;
    }
  }
}

std::string catalog_listing(bool asJson) {
  json j;
  j["surfaces"] = json::array();
  for (const auto& id : catalog_surface_ids()) {
    const TranslationSurface s = TranslationSurface::load(catalog_surface(id));
    json x;
    x["id"] = id;
    x["genus"] = s.genus();
    x["area"] = s.area();
    x["polygons"] = s.definition().polygons.size();
    j["surfaces"].push_back(x);
  }
  j["groups"] = json::array();
  for (const auto& id : catalog_group_ids()) {
    const GroupPreset g = catalog_group(id);
    json x;
    x["id"] = id;
    x["surface"] = g.surface;
    x["generators"] = g.generators.size();
    x["lattice"] = g.lattice;
    x["description"] = g.description;
    j["groups"].push_back(x);
  }
  if (asJson) return j.dump(2) + "\n";
  std::string out = "surfaces:\n";
  for (const auto& x : j["surfaces"])
    out += "  " + x["id"].get<std::string>() + "  genus " + std::to_string(x["genus"].get<int>()) + ", area " +
           fixed(x["area"].get<double>(), 6) + "\n";
  out += "groups:\n";
  for (const auto& x : j["groups"])
    out += "  " + x["id"].get<std::string>() + "  on " + x["surface"].get<std::string>() + ": " +
           x["description"].get<std::string>() + "\n";
  return out;
}

}  // namespace flatbundle
