#pragma once

#include <string>
#include <vector>

#include "flatbundle/surface.hpp"
#include "flatbundle/vec2.hpp"

namespace flatbundle {

struct GroupPreset {
  std::string id;
  std::string surface;
  std::string description;
  std::vector<Mat2> generators;
  std::vector<int> hints;  // candidate index for the affine check, -1 = search
  bool lattice = false;
};

std::vector<std::string> catalog_surface_ids();
std::vector<std::string> catalog_group_ids();
SurfaceDefinition catalog_surface(const std::string& id);
GroupPreset catalog_group(const std::string& id);

// Closest known id by edit distance, for error messages.
std::string nearest_name(const std::string& query, const std::vector<std::string>& names);

SurfaceDefinition surface_from_json(const std::string& text);
std::string surface_to_json(const SurfaceDefinition& def);
GroupPreset group_from_json(const std::string& text);
std::string group_to_json(const GroupPreset& g);

// Resolves a catalog id or a path to a JSON file.
SurfaceDefinition resolve_surface(const std::string& idOrPath);
GroupPreset resolve_group(const std::string& idOrPath);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Shear parameter of the octagon lattice generator, 2(1 + sqrt 2).
inline double octagon_shear() { return 2.0 * (1.0 + std::sqrt(2.0)); }

}  // namespace flatbundle
