#include "flatbundle.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "flatbundle/pipeline.hpp"

using namespace flatbundle;

struct fb_experiment {
  std::unique_ptr<Experiment> impl;
};

struct fb_report {
  RunReport impl;
};

namespace {

thread_local std::string last_error;

int fail(int code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <class F>
int guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return FB_OK;
  } catch (const Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FB_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FB_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

bool null_arg(const void* p, const char* name) {
  if (p) return false;
  last_error = std::string(error_code_name(ErrorCode::MissingInput)) + ": " + name + " is NULL";
  return true;
}

}  // namespace

extern "C" {

const char* fb_last_error(void) { return last_error.c_str(); }

const char* fb_status_name(int status) { return error_code_name(static_cast<ErrorCode>(status)); }

void fb_string_free(char* s) { std::free(s); }

int fb_catalog(int as_json, char** out) {
  if (null_arg(out, "out")) return FB_MISSING_INPUT;
  return guarded([&] { *out = dup(catalog_listing(as_json != 0)); });
}

int fb_config_default(char** out) {
  if (null_arg(out, "out")) return FB_MISSING_INPUT;
  return guarded([&] { *out = dup(config_to_json(ExperimentConfig{})); });
}

int fb_config_normalize(const char* config_json, char** out) {
  if (null_arg(config_json, "config_json") || null_arg(out, "out")) return FB_MISSING_INPUT;
  return guarded([&] {
    const ExperimentConfig c = config_from_json(config_json);
    validate_config(c);
    *out = dup(config_to_json(c));
  });
}

int fb_experiment_open(const char* config_json, fb_experiment** out) {
  if (null_arg(config_json, "config_json") || null_arg(out, "out")) return FB_MISSING_INPUT;
  *out = nullptr;
  return guarded([&] {
    auto e = std::make_unique<fb_experiment>();
    e->impl = prepare_experiment(config_from_json(config_json));
    *out = e.release();
  });
}

void fb_experiment_close(fb_experiment* e) { delete e; }

int fb_experiment_run(fb_experiment* e, fb_report** out) {
  if (null_arg(e, "experiment") || null_arg(out, "out")) return FB_MISSING_INPUT;
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<fb_report>();
    r->impl = run_experiment(*e->impl);
    *out = r.release();
  });
}

int fb_render(fb_experiment* e, const char* kind, char** svg_out) {
  if (null_arg(e, "experiment") || null_arg(kind, "kind") || null_arg(svg_out, "svg_out")) return FB_MISSING_INPUT;
  return guarded([&] { *svg_out = dup(render_kind(*e->impl, kind)); });
}

void fb_report_free(fb_report* r) { delete r; }

int fb_report_passed(const fb_report* r) { return r && r->impl.passed ? 1 : 0; }

size_t fb_report_suite_count(const fb_report* r) { return r ? r->impl.suites.size() : 0; }

int fb_report_suite(const fb_report* r, size_t i, const char** name, int* passed, const char** metrics_json) {
  if (null_arg(r, "report")) return FB_MISSING_INPUT;
  if (i >= r->impl.suites.size()) return fail(FB_MISSING_INPUT, "suite index out of range");
  const SuiteResult& s = r->impl.suites[i];
  if (name) *name = s.name.c_str();
  if (passed) *passed = s.passed ? 1 : 0;
  if (metrics_json) *metrics_json = s.metrics.c_str();
  return FB_OK;
}

const char* fb_report_first_failure(const fb_report* r) { return r ? r->impl.firstFailure.c_str() : ""; }

const char* fb_report_json(const fb_report* r) { return r ? r->impl.reportJson.c_str() : ""; }

const char* fb_report_deltas_csv(const fb_report* r) { return r ? r->impl.deltasCsv.c_str() : ""; }

int fb_report_write(fb_experiment* e, const fb_report* r, const char* dir) {
  if (null_arg(e, "experiment") || null_arg(r, "report") || null_arg(dir, "dir")) return FB_MISSING_INPUT;
  return guarded([&] { write_run_outputs(*e->impl, r->impl, dir); });
}

}  // extern "C"
