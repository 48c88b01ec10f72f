#pragma once

#include <map>
#include <memory>
#include <string>

#include "flatbundle/catalog.hpp"
#include "flatbundle/pipeline.hpp"

namespace testing {

// Prepared experiment per group preset, built once per test binary.
inline flatbundle::Experiment& experiment(const std::string& group, double maxLength = 4.0) {
  static std::map<std::pair<std::string, double>, std::unique_ptr<flatbundle::Experiment>> cache;
  auto& slot = cache[{group, maxLength}];
  if (!slot) {
    flatbundle::ExperimentConfig c;
    c.group = group;
    c.surface = flatbundle::catalog_group(group).surface;
    c.maxLength = maxLength;
    slot = flatbundle::prepare_experiment(c);
  }
  return *slot;
}

inline flatbundle::TranslationSurface surface(const std::string& id) {
  return flatbundle::TranslationSurface::load(flatbundle::catalog_surface(id));
}

}  // namespace testing
