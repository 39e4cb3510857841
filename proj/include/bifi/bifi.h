/* C interface to the bi-fidelity transport UQ library.
 *
 * All entry points are thread-compatible: distinct handles may be used from
 * distinct threads concurrently. Functions return bifi_status; on failure a
 * human-readable message is available from bifi_last_error() on the calling
 * thread.
 */
#ifndef BIFI_BIFI_H
#define BIFI_BIFI_H

#include <stddef.h>

#if defined(_WIN32)
#define BIFI_API __declspec(dllexport)
#else
#define BIFI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bifi_status {
  BIFI_OK = 0,
  BIFI_ERR_ARGUMENT = 1, /* bad configuration, key, or value */
  BIFI_ERR_DIVERGED = 2, /* a solver produced non-finite values */
  BIFI_ERR_IO = 3,       /* file could not be read or written */
  BIFI_ERR_SELFTEST = 4, /* selftest ran but some checks failed */
  BIFI_ERR_INTERNAL = 5
} bifi_status;

typedef struct bifi_config bifi_config; /* opaque run configuration */
typedef struct bifi_result bifi_result; /* opaque run outcome */

BIFI_API const char *bifi_version(void);

/* Message for the most recent failure on this thread ("" if none). */
BIFI_API const char *bifi_last_error(void);

/* --- configuration ------------------------------------------------------ */

BIFI_API bifi_status bifi_config_create(bifi_config **out);
BIFI_API void bifi_config_free(bifi_config *cfg);

/* Merges a config file into cfg (strict: unknown keys are errors). */
BIFI_API bifi_status bifi_config_load_file(bifi_config *cfg, const char *path);

/* Sets one "section.key" value with the same validation as the file parser,
 * e.g. bifi_config_set(cfg, "run.preset", "1"). */
BIFI_API bifi_status bifi_config_set(bifi_config *cfg, const char *key, const char *value);

/* Canonical text form of cfg. *out is malloc'd; free with bifi_text_free. */
BIFI_API bifi_status bifi_config_render(const bifi_config *cfg, char **out);
BIFI_API void bifi_text_free(char *text);

/* --- execution ----------------------------------------------------------- */

/* Runs the configured command (run-test, sweep, solve-hf, solve-lf,
 * reference, selftest); report files are written under the configured output
 * directory. On success *out holds the outcome. */
BIFI_API bifi_status bifi_execute(const bifi_config *cfg, bifi_result **out);
BIFI_API void bifi_result_free(bifi_result *res);

/* Human-readable summary (pass counts for selftest). Owned by the result. */
BIFI_API const char *bifi_result_summary(const bifi_result *res);

/* Number of failed selftest checks; -1 for other commands. */
BIFI_API int bifi_result_selftest_failures(const bifi_result *res);

/* Borrowed pointer to a named profile column; NULL if absent. Names:
 * "x", "qoi", "mean_bf", "std_bf", "mean_ref", "std_ref". */
BIFI_API const double *bifi_result_profile(const bifi_result *res, const char *name,
                                           size_t *len);

/* L2 errors of the bi-fidelity statistics against the reference (run-test and
 * sweep commands). */
BIFI_API bifi_status bifi_result_errors(const bifi_result *res, double *e_mean, double *e_std);

#ifdef __cplusplus
}
#endif

#endif /* BIFI_BIFI_H */
