#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flatbundle.h"
#include "flatbundle/pipeline.hpp"
#include "json.hpp"

using namespace flatbundle;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({"surface": "octagon", "group": "octagon-cusped", "paths": 60, "fans": 60, "triangles": 12,
  "balance_triangles": 60, "decay_pairs": 20, "combo_pairs": 30, "gromov_points": 10})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("flatbundle-test-" + std::to_string(::getpid())) / name;
  fs::create_directories(p);
  return p;
}

struct Shell {
  int code;
  std::string out, err;
};

Shell cli(const std::string& args) {
  const fs::path dir = scratch("shell");
  const fs::path o = dir / "stdout", e = dir / "stderr";
  const std::string cmd = std::string(FLATBUNDLE_CLI) + " " + args + " > " + o.string() + " 2> " + e.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

fs::path small_config(const fs::path& out) {
  json j = json::parse(kSmall);
  j["out"] = out.string();
  const fs::path p = out.parent_path() / (out.filename().string() + ".json");
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  fb_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("config") {
  SUBCASE("round trip") {
    ExperimentConfig c;
    c.group = "octagon-schottky";
    c.maxLength = 3.25;
    c.seed = 0xfeedfacecafebeefULL;
    c.step = 0.0125;
    c.out = "somewhere/else";
    const std::string text = config_to_json(c);
    CHECK(config_to_json(config_from_json(text)) == text);
    CHECK(config_from_json(text).seed == c.seed);
  }

  SUBCASE("rejections") {
    auto code = [](const std::string& text) {
      try {
        validate_config(config_from_json(text));
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::Internal;
    };
    CHECK(code(R"({"max_trace": 0})") == ErrorCode::InvalidConfig);
    CHECK(code(R"({"step": -1})") == ErrorCode::InvalidConfig);
    CHECK(code(R"({"word_depth": 0})") == ErrorCode::InvalidConfig);
    CHECK(code(R"({"max_lenght": 3})") == ErrorCode::InvalidConfig);
    CHECK(code(R"({"seed": )") == ErrorCode::ParseError);
  }

  SUBCASE("zero trace cutoff fails before any work") {
    ExperimentConfig c;
    c.maxTrace = 0.0;
    CHECK_THROWS_AS(prepare_experiment(c), Error);
  }
}

TEST_CASE("shipped data files match the built-in catalog") {
  const fs::path data(FLATBUNDLE_DATA);
  for (const auto& id : catalog_surface_ids()) {
    CAPTURE(id);
    const fs::path p = data / "surfaces" / (id + ".json");
    REQUIRE(fs::exists(p));
    CHECK(json::parse(slurp(p)) == json::parse(surface_to_json(catalog_surface(id))));
    CHECK(surface_to_json(resolve_surface(p.string())) == surface_to_json(catalog_surface(id)));
  }
  for (const auto& id : catalog_group_ids()) {
    CAPTURE(id);
    const fs::path p = data / "groups" / (id + ".json");
    REQUIRE(fs::exists(p));
    CHECK(json::parse(slurp(p)) == json::parse(group_to_json(catalog_group(id))));
  }
}

TEST_CASE("C interface") {
  SUBCASE("catalog") {
    char* s = nullptr;
    REQUIRE(fb_catalog(1, &s) == FB_OK);
    const json j = json::parse(take(s));
    CHECK(j["surfaces"].size() >= 3);
    CHECK(j["groups"].size() >= 3);
    REQUIRE(fb_catalog(0, &s) == FB_OK);
    CHECK(take(s).find("octagon-lattice") != std::string::npos);
  }

  SUBCASE("config normalization") {
    char* s = nullptr;
    REQUIRE(fb_config_default(&s) == FB_OK);
    const json def = json::parse(take(s));
    REQUIRE(fb_config_normalize(R"({"seed": 7})", &s) == FB_OK);
    json seven = json::parse(take(s));
    CHECK(seven["seed"] == 7);
    seven["seed"] = def["seed"];
    CHECK(seven == def);
    CHECK(fb_config_normalize(R"({"bogus": 1})", &s) == FB_INVALID_CONFIG);
    CHECK(std::string(fb_last_error()).find("bogus") != std::string::npos);
    CHECK(fb_config_normalize("{", &s) == FB_PARSE_ERROR);
    CHECK(fb_config_normalize(nullptr, &s) == FB_MISSING_INPUT);
    CHECK(std::string(fb_status_name(FB_UNKNOWN_CATALOG_ID)) == "UnknownCatalogId");
  }

  SUBCASE("unknown ids suggest the nearest name") {
    fb_experiment* e = nullptr;
    CHECK(fb_experiment_open(R"({"group": "octagon-cuspd"})", &e) == FB_UNKNOWN_CATALOG_ID);
    CHECK(e == nullptr);
    CHECK(std::string(fb_last_error()).find("octagon-cusped") != std::string::npos);
  }

  SUBCASE("run, render and write") {
    fb_experiment* e = nullptr;
    REQUIRE(fb_experiment_open(kSmall, &e) == FB_OK);
    fb_report* r = nullptr;
    REQUIRE(fb_experiment_run(e, &r) == FB_OK);
    CHECK(fb_report_passed(r) == 1);
    CHECK(std::string(fb_report_first_failure(r)).empty());
    REQUIRE(fb_report_suite_count(r) >= 12);
    for (std::size_t i = 0; i < fb_report_suite_count(r); ++i) {
      const char* name = nullptr;
      const char* metrics = nullptr;
      int passed = 0;
      REQUIRE(fb_report_suite(r, i, &name, &passed, &metrics) == FB_OK);
      CAPTURE(name);
      CHECK(passed == 1);
      CHECK(json::parse(metrics).is_object());
    }
    CHECK(fb_report_suite(r, 1000, nullptr, nullptr, nullptr) == FB_MISSING_INPUT);
    const json report = json::parse(fb_report_json(r));
    CHECK(report["passed"] == true);
    CHECK(std::string(fb_report_deltas_csv(r)).rfind("triangle,delta,delta_half_step", 0) == 0);

    char* a = nullptr;
    char* b = nullptr;
    REQUIRE(fb_render(e, "ideal-fan", &a) == FB_OK);
    REQUIRE(fb_render(e, "ideal-fan", &b) == FB_OK);
    const std::string sa = take(a), sb = take(b);
    CHECK(sa == sb);
    CHECK(sa.find("<svg") != std::string::npos);
    CHECK(fb_render(e, "ideal-fann", &a) == FB_INVALID_CONFIG);
    CHECK(std::string(fb_last_error()).find("ideal-fan") != std::string::npos);

    const fs::path dir = scratch("capi");
    REQUIRE(fb_report_write(e, r, dir.string().c_str()) == FB_OK);
    for (const char* f : {"report.json", "deltas.csv", "ideal-fan.svg", "horoballs.svg", "cylinders.svg", "path.svg"})
      CHECK(fs::exists(dir / f));
    fb_report_free(r);
    fb_experiment_close(e);
  }
}

TEST_CASE("command line") {
  SUBCASE("catalog") {
    const Shell s = cli("catalog");
    CHECK(s.code == 0);
    CHECK(s.out.find("surfaces:") != std::string::npos);
    CHECK(s.out.find("L3-lattice") != std::string::npos);
    const Shell j = cli("catalog --json");
    CHECK(j.code == 0);
    const json listing = json::parse(j.out);
    CHECK(listing["surfaces"].size() >= 3);
    CHECK(listing["groups"].size() >= 3);
  }

  SUBCASE("errors exit with code 2") {
    const Shell u = cli("run --surface octogon");
    CHECK(u.code == 2);
    CHECK(u.err.find("UnknownCatalogId") != std::string::npos);
    CHECK(u.err.find("'octagon'") != std::string::npos);
    const Shell z = cli("run --max-trace 0");
    CHECK(z.code == 2);
    CHECK(z.err.find("max_trace") != std::string::npos);
    const Shell k = cli("render bogus --out " + scratch("bogus").string());
    CHECK(k.code == 2);
  }

  SUBCASE("run writes every output and passes") {
    const fs::path out = scratch("run");
    const Shell s = cli("run --config " + small_config(out).string());
    CHECK(s.code == 0);
    for (const char* f : {"report.json", "deltas.csv", "ideal-fan.svg", "horoballs.svg", "cylinders.svg", "path.svg"})
      CHECK(fs::exists(out / f));
    CHECK(json::parse(slurp(out / "report.json"))["passed"] == true);
  }

  SUBCASE("renders are byte-identical") {
    const fs::path out = scratch("render");
    const fs::path cfg = small_config(out);
    for (const auto& kind : render_kinds()) {
      CAPTURE(kind);
      const Shell a = cli("render " + kind + " --config " + cfg.string());
      REQUIRE(a.code == 0);
      const std::string first = slurp(out / (kind + ".svg"));
      const Shell b = cli("render " + kind + " --config " + cfg.string());
      REQUIRE(b.code == 0);
      CHECK(slurp(out / (kind + ".svg")) == first);
      CHECK(first.find("viewBox=\"0 0 1000 1000\"") != std::string::npos);
    }
  }
}
