#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flatbundle/bundle.hpp"
#include "flatbundle/catalog.hpp"
#include "flatbundle/slimness.hpp"

namespace flatbundle {

struct ExperimentConfig {
  std::string surface = "octagon";
  std::string group = "octagon-lattice";
  int wordDepth = 6;
  double maxLength = 4.0;        // saddle enumeration cutoff
  double maxTrace = 50.0;        // separatrix cutoff for cylinder decompositions
  double unfoldingRadius = 80.0; // largest flat geodesic realized
  std::uint64_t seed = 1;
  double step = 0.05;            // slimness discretization
  int paths = 1000;
  int fans = 1000;
  int triangles = 200;
  int balanceTriangles = 500;
  int decayPairs = 200;
  int comboPairs = 100;
  int gromovPoints = 24;
  int liftSteps = 2;
  double baseRadius = 1.5;
  std::string out = "out";
};

// Throws InvalidConfig naming the first bad field.
void validate_config(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& c);

struct Experiment {
  ExperimentConfig config;
  GroupPreset preset;
  TranslationSurface surface;
  VeechGroupData group;
  std::vector<SaddleConnection> saddles;
  HoroFamily family;
  std::string familyError;  // set when the horoball family could not be built
  BundleModel model;
};

std::unique_ptr<Experiment> prepare_experiment(const ExperimentConfig& c);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::string metrics;  // JSON object
};

struct RunReport {
  std::vector<SuiteResult> suites;
  std::vector<double> deltas, deltasHalfStep;
  bool passed = false;
  std::string firstFailure;
  std::string reportJson;
  std::string deltasCsv;
};

RunReport run_experiment(Experiment& e);
void write_run_outputs(Experiment& e, const RunReport& r, const std::string& dir);

// kind: ideal-fan, horoballs, cylinders, path.
std::string render_kind(Experiment& e, const std::string& kind);
std::vector<std::string> render_kinds();

// Catalog listing (text or JSON).
std::string catalog_listing(bool json);

}  // namespace flatbundle
