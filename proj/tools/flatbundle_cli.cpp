#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "flatbundle.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;

struct Overrides {
  std::string config;
  std::optional<std::string> surface, group, out;
  std::optional<int> depth;
  std::optional<double> maxLength, maxTrace;
  std::optional<std::uint64_t> seed;
  bool asJson = false;
};

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--surface", o.surface, "catalog surface id or JSON file");
  cmd->add_option("--group", o.group, "catalog group id or JSON file");
  cmd->add_option("--depth", o.depth, "word depth for group enumeration");
  cmd->add_option("--max-length", o.maxLength, "saddle connection length cutoff");
  cmd->add_option("--max-trace", o.maxTrace, "separatrix cutoff for cylinder decompositions");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--json", o.asJson, "print JSON to stdout");
}

int report_error(int status) {
  std::cerr << "error: " << fb_last_error() << "\n";
  return status == FB_INVALID_CONFIG || status == FB_PARSE_ERROR || status == FB_UNKNOWN_CATALOG_ID ? 2 : 3;
}

// Config text with command-line overrides applied, or nullopt after printing an error.
std::optional<std::string> build_config(const Overrides& o) {
  std::string text = "{}";
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) {
      std::cerr << "error: cannot read config " << o.config << "\n";
      return std::nullopt;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    std::cerr << "error: ParseError: config is not a JSON object\n";
    return std::nullopt;
  }
  if (o.surface) j["surface"] = *o.surface;
  if (o.group) j["group"] = *o.group;
  if (o.depth) j["word_depth"] = *o.depth;
  if (o.maxLength) j["max_length"] = *o.maxLength;
  if (o.maxTrace) j["max_trace"] = *o.maxTrace;
  if (o.seed) j["seed"] = *o.seed;
  if (o.out) j["out"] = *o.out;
  return j.dump();
}

std::string out_dir(const std::string& config) {
  char* norm = nullptr;
  if (fb_config_normalize(config.c_str(), &norm) != FB_OK) return "out";
  const std::string dir = json::parse(norm)["out"].get<std::string>();
  fb_string_free(norm);
  return dir;
}

int cmd_catalog(bool asJson) {
  char* text = nullptr;
  if (const int st = fb_catalog(asJson ? 1 : 0, &text); st != FB_OK) return report_error(st);
  std::cout << text;
  fb_string_free(text);
  return 0;
}

int cmd_run(const Overrides& o) {
  const auto config = build_config(o);
  if (!config) return 2;
  fb_experiment* e = nullptr;
  if (const int st = fb_experiment_open(config->c_str(), &e); st != FB_OK) return report_error(st);
  fb_report* r = nullptr;
  int st = fb_experiment_run(e, &r);
  if (st == FB_OK) st = fb_report_write(e, r, out_dir(*config).c_str());
  if (st != FB_OK) {
    fb_report_free(r);
    fb_experiment_close(e);
    return report_error(st);
  }
  if (o.asJson) {
    std::cout << fb_report_json(r);
  } else {
    for (std::size_t i = 0; i < fb_report_suite_count(r); ++i) {
      const char* name = nullptr;
      int passed = 0;
      fb_report_suite(r, i, &name, &passed, nullptr);
      std::printf("%-18s %s\n", name, passed ? "pass" : "FAIL");
    }
    std::printf("outputs in %s\n", out_dir(*config).c_str());
  }
  const bool ok = fb_report_passed(r) != 0;
  if (!ok) std::cerr << "failed invariant: " << fb_report_first_failure(r) << "\n";
  fb_report_free(r);
  fb_experiment_close(e);
  return ok ? 0 : 1;
}

int cmd_render(const std::string& kind, const Overrides& o) {
  const auto config = build_config(o);
  if (!config) return 2;
  fb_experiment* e = nullptr;
  if (const int st = fb_experiment_open(config->c_str(), &e); st != FB_OK) return report_error(st);
  char* svg = nullptr;
  const int st = fb_render(e, kind.c_str(), &svg);
  fb_experiment_close(e);
  if (st != FB_OK) return report_error(st);
  const std::string dir = out_dir(*config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = dir + "/" + kind + ".svg";
  std::ofstream f(path, std::ios::binary);
  f << svg;
  fb_string_free(svg);
  if (!f) {
    std::cerr << "error: IoError: cannot write " << path << "\n";
    return 3;
  }
  std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatbundle: geometry of flat surface bundles over Veech group quotients"};
  app.require_subcommand(1);

  bool catalogJson = false;
  auto* catalog = app.add_subcommand("catalog", "list built-in surfaces and group presets");
  catalog->add_flag("--json", catalogJson, "machine-readable listing");

  Overrides runOpts;
  auto* run = app.add_subcommand("run", "run every invariant suite and write reports");
  add_experiment_flags(run, runOpts);

  Overrides renderOpts;
  std::string kind;
  auto* render = app.add_subcommand("render", "write one SVG diagram");
  render->add_option("kind", kind, "ideal-fan, horoballs, cylinders or path")->required();
  add_experiment_flags(render, renderOpts);

  CLI11_PARSE(app, argc, argv);

  if (*catalog) return cmd_catalog(catalogJson);
  if (*run) return cmd_run(runOpts);
  return cmd_render(kind, renderOpts);
}
