#ifndef FLATBUNDLE_H
#define FLATBUNDLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(FLATBUNDLE_BUILDING)
#define FB_API __attribute__((visibility("default")))
#else
#define FB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values match the C++ ErrorCode enum. */
typedef enum fb_status {
  FB_OK = 0,
  FB_MALFORMED_GLUING = 1,
  FB_GENUS_TOO_SMALL = 2,
  FB_NON_SIMPLE_POLYGON = 3,
  FB_CUTOFF_TOO_LARGE = 4,
  FB_BALL_EXCEEDED = 5,
  FB_ZERO_HOLONOMY = 6,
  FB_EMPTY_REGION = 7,
  FB_DEGENERATE_TRIANGLE = 8,
  FB_NOT_AN_AUTOMORPHISM = 9,
  FB_BAD_DETERMINANT = 10,
  FB_ELEMENTARY_GROUP = 11,
  FB_DIRECTION_INSIDE_HULL_NOT_PARABOLIC = 12,
  FB_POINT_NOT_IN_DECOMPOSITION = 13,
  FB_MISSING_HORO_REGION = 14,
  FB_NOT_REDUCIBLE = 15,
  FB_UNKNOWN_CATALOG_ID = 16,
  FB_INVALID_CONFIG = 17,
  FB_MISSING_INPUT = 18,
  FB_PARSE_ERROR = 19,
  FB_IO_ERROR = 20,
  FB_INVARIANT_FAILED = 21,
  FB_INTERNAL = 99
} fb_status;

typedef struct fb_experiment fb_experiment;
typedef struct fb_report fb_report;

/* Message of the last failed call on this thread, or "" if none. */
FB_API const char* fb_last_error(void);
FB_API const char* fb_status_name(int status);

/* Strings returned through char** out-parameters are owned by the caller. */
FB_API void fb_string_free(char* s);

FB_API int fb_catalog(int as_json, char** out);

/* Config as JSON text. Missing keys take their defaults. */
FB_API int fb_config_default(char** out);
FB_API int fb_config_normalize(const char* config_json, char** out);

FB_API int fb_experiment_open(const char* config_json, fb_experiment** out);
FB_API void fb_experiment_close(fb_experiment* e);
FB_API int fb_experiment_run(fb_experiment* e, fb_report** out);
FB_API int fb_render(fb_experiment* e, const char* kind, char** svg_out);

FB_API void fb_report_free(fb_report* r);
FB_API int fb_report_passed(const fb_report* r);
FB_API size_t fb_report_suite_count(const fb_report* r);
/* name and passed may be NULL. Borrowed pointers live as long as the report. */
FB_API int fb_report_suite(const fb_report* r, size_t i, const char** name, int* passed, const char** metrics_json);
FB_API const char* fb_report_first_failure(const fb_report* r);
FB_API const char* fb_report_json(const fb_report* r);
FB_API const char* fb_report_deltas_csv(const fb_report* r);
/* Writes report.json, deltas.csv and the SVG renderings into dir. */
FB_API int fb_report_write(fb_experiment* e, const fb_report* r, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
