#include "flatbundle/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace flatbundle {

namespace {

using nlohmann::json;

std::vector<Vec2> polygon_from_edges(const std::vector<Vec2>& edges) {
  std::vector<Vec2> poly{{0.0, 0.0}};
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) poly.push_back(poly.back() + edges[i]);
  return poly;
}

SurfaceDefinition octagon() {
  SurfaceDefinition d;
  d.name = "octagon";
  std::vector<Vec2> edges(8);
  for (int k = 0; k < 4; ++k) {
    edges[k] = {std::cos(k * kPi / 4), std::sin(k * kPi / 4)};
    edges[k + 4] = -edges[k];
  }
  edges[0] = {1.0, 0.0};
  edges[2] = {0.0, 1.0};
  edges[4] = {-1.0, 0.0};
  edges[6] = {0.0, -1.0};
  d.polygons.push_back(polygon_from_edges(edges));
  for (int k = 0; k < 4; ++k) d.gluings.push_back({0, k, 0, k + 4});
  return d;
}

SurfaceDefinition double_pentagon() {
  SurfaceDefinition d;
  d.name = "double-pentagon";
  std::vector<Vec2> edges(5);
  for (int k = 0; k < 5; ++k) edges[k] = {std::cos(2 * k * kPi / 5), std::sin(2 * k * kPi / 5)};
  edges[0] = {1.0, 0.0};
  auto p1 = polygon_from_edges(edges);
  std::vector<Vec2> p2;
  for (const Vec2& v : p1) p2.push_back(-v);
  d.polygons = {p1, p2};
  for (int k = 0; k < 5; ++k) d.gluings.push_back({0, k, 1, k});
  return d;
}

SurfaceDefinition l_shape() {
  SurfaceDefinition d;
  d.name = "L3";
  d.polygons.push_back({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}, {0, 1}});
  d.gluings = {{0, 0, 0, 5}, {0, 1, 0, 3}, {0, 2, 0, 7}, {0, 4, 0, 6}};
  return d;
}

Mat2 shear(double s) { return {1.0, s, 0.0, 1.0}; }
Mat2 lower_shear(double s) { return {1.0, 0.0, s, 1.0}; }

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

[[noreturn]] void unknown(const std::string& kind, const std::string& id, const std::vector<std::string>& names) {
  throw Error(ErrorCode::UnknownCatalogId,
              "unknown " + kind + " '" + id + "' (did you mean '" + nearest_name(id, names) + "'?)");
}

}  // namespace

std::vector<std::string> catalog_surface_ids() { return {"octagon", "double-pentagon", "L3"}; }

std::vector<std::string> catalog_group_ids() {
  return {"octagon-lattice", "octagon-cusped", "octagon-schottky", "pentagon-lattice", "L3-lattice"};
}

SurfaceDefinition catalog_surface(const std::string& id) {
  if (id == "octagon") return octagon();
  if (id == "double-pentagon") return double_pentagon();
  if (id == "L3") return l_shape();
  unknown("surface", id, catalog_surface_ids());
}

GroupPreset catalog_group(const std::string& id) {
  const double s = octagon_shear();
  const Mat2 r8 = Mat2::rotation(kPi / 4);
  GroupPreset g;
  g.id = id;
  if (id == "octagon-lattice") {
    g.surface = "octagon";
    g.description = "full lattice: rotation by pi/4 and the horizontal multitwist";
    g.generators = {r8, shear(s)};
    g.lattice = true;
  } else if (id == "octagon-cusped") {
    g.surface = "octagon";
    g.description = "non-lattice free subgroup generated by the horizontal and vertical multitwists";
    g.generators = {shear(s), lower_shear(-s)};
  } else if (id == "octagon-schottky") {
    g.surface = "octagon";
    g.description = "purely hyperbolic subgroup generated by two conjugate pseudo-Anosov derivatives";
    const Mat2 h = shear(s) * lower_shear(s);
    g.generators = {h, r8 * h * r8.inverse_sl2()};
  } else if (id == "pentagon-lattice") {
    g.surface = "double-pentagon";
    g.description = "full lattice: rotation by pi/5 and the horizontal multitwist";
    g.generators = {Mat2::rotation(kPi / 5), shear(2.0 / std::tan(kPi / 5))};
    g.lattice = true;
  } else if (id == "L3-lattice") {
    g.surface = "L3";
    g.description = "finite-index subgroup generated by the horizontal and vertical double twists";
    g.generators = {shear(2.0), lower_shear(2.0)};
    g.lattice = true;
  } else {
    unknown("group", id, catalog_group_ids());
  }
  g.hints.assign(g.generators.size(), -1);
  return g;
}

std::string nearest_name(const std::string& query, const std::vector<std::string>& names) {
  std::string best;
  std::size_t bestD = static_cast<std::size_t>(-1);
  for (const auto& n : names) {
    const std::size_t d = edit_distance(query, n);
    if (d < bestD) { bestD = d; best = n; }
  }
  return best;
}

SurfaceDefinition surface_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    SurfaceDefinition d;
    d.name = j.value("name", std::string("custom"));
    for (const auto& poly : j.at("polygons")) {
      std::vector<Vec2> p;
      for (const auto& v : poly) p.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      d.polygons.push_back(std::move(p));
    }
    for (const auto& g : j.at("gluings"))
      d.gluings.push_back({g.at(0).get<int>(), g.at(1).get<int>(), g.at(2).get<int>(), g.at(3).get<int>()});
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("surface file: ") + e.what());
  }
}

std::string surface_to_json(const SurfaceDefinition& def) {
  json j;
  j["name"] = def.name;
  j["polygons"] = json::array();
  for (const auto& poly : def.polygons) {
    json p = json::array();
    for (const Vec2& v : poly) p.push_back({v.x, v.y});
    j["polygons"].push_back(p);
  }
  j["gluings"] = def.gluings;
  return j.dump(2) + "\n";
}

GroupPreset group_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    GroupPreset g;
    g.id = j.value("id", std::string("custom"));
    g.surface = j.at("surface").get<std::string>();
    g.description = j.value("description", std::string());
    g.lattice = j.value("lattice", false);
    for (const auto& m : j.at("generators"))
      g.generators.push_back({m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>(), m.at(3).get<double>()});
    if (j.contains("hints")) g.hints = j.at("hints").get<std::vector<int>>();
    g.hints.resize(g.generators.size(), -1);
    if (g.generators.empty()) throw Error(ErrorCode::ParseError, "group file has no generators");
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("group file: ") + e.what());
  }
}

std::string group_to_json(const GroupPreset& g) {
  json j;
  j["id"] = g.id;
  j["surface"] = g.surface;
  j["description"] = g.description;
  j["lattice"] = g.lattice;
  j["generators"] = json::array();
  for (const Mat2& m : g.generators) j["generators"].push_back({m.a, m.b, m.c, m.d});
  j["hints"] = g.hints;
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
}

SurfaceDefinition resolve_surface(const std::string& idOrPath) {
  if (idOrPath.size() > 5 && idOrPath.ends_with(".json")) return surface_from_json(read_text_file(idOrPath));
  return catalog_surface(idOrPath);
}

GroupPreset resolve_group(const std::string& idOrPath) {
  if (idOrPath.size() > 5 && idOrPath.ends_with(".json")) return group_from_json(read_text_file(idOrPath));
  return catalog_group(idOrPath);
}

}  // namespace flatbundle
