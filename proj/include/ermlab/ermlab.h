#ifndef ERMLAB_ERMLAB_H
#define ERMLAB_ERMLAB_H

/* C interface to the reduction library. Handles are opaque; every call
 * returns a status code and, on failure, leaves a message retrievable with
 * ermlab_last_error() on the calling thread. Strings returned through
 * `char**` out-parameters are owned by the caller and released with
 * ermlab_string_free(). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ERMLAB_API __declspec(dllexport)
#else
#define ERMLAB_API __attribute__((visibility("default")))
#endif

typedef enum ermlab_status {
  ERMLAB_OK = 0,
  ERMLAB_INVALID_ARGUMENT = 1,
  ERMLAB_PARSE_ERROR = 2,
  ERMLAB_IO_ERROR = 3,
  ERMLAB_DOMAIN_ERROR = 4,
  ERMLAB_SOLVER_ERROR = 5,
  ERMLAB_INTERNAL_ERROR = 6
} ermlab_status;

typedef enum ermlab_answer { ERMLAB_NO = 0, ERMLAB_YES = 1, ERMLAB_UNDECIDABLE = 2 } ermlab_answer;

typedef struct ermlab_instance ermlab_instance;
typedef struct ermlab_report ermlab_report;

/* Message of the last failed call on this thread ("" if none). */
ERMLAB_API const char* ermlab_last_error(void);
ERMLAB_API const char* ermlab_version(void);
ERMLAB_API void ermlab_string_free(char* text);

/* kind: "ovp" or "bhcp"; planted: "yes", "no" or "random"; m = 0 means m = n;
 * d = 0 and t = 0 select the default dimension and threshold rules. */
ERMLAB_API ermlab_status ermlab_instance_generate(const char* kind, size_t n, size_t m, size_t d, int t,
                                                  const char* planted, uint64_t seed, ermlab_instance** out);
ERMLAB_API ermlab_status ermlab_instance_from_json(const char* json, ermlab_instance** out);
ERMLAB_API ermlab_status ermlab_instance_read(const char* path, ermlab_instance** out);
ERMLAB_API ermlab_status ermlab_instance_write(const ermlab_instance* inst, const char* path);
ERMLAB_API ermlab_status ermlab_instance_to_json(const ermlab_instance* inst, char** out);
ERMLAB_API ermlab_status ermlab_instance_normalize(const ermlab_instance* inst, ermlab_instance** out);
ERMLAB_API ermlab_status ermlab_instance_digest(const ermlab_instance* inst, uint64_t* out);
ERMLAB_API void ermlab_instance_free(ermlab_instance* inst);

/* Brute-force answer; `extremal` receives the orthogonal-pair count (OVP) or
 * the minimum distance (BHCP) and may be NULL. */
ERMLAB_API ermlab_status ermlab_oracle(const ermlab_instance* inst, ermlab_answer* answer, long* extremal);

/* Runs one distinguisher. options_json may be NULL or a JSON object with the
 * experiment-config option keys (c_multiplier, precision_start, ...).
 * verdict_json receives the full verdict and may be NULL. */
ERMLAB_API ermlab_status ermlab_decide(const ermlab_instance* inst, const char* reduction, const char* options_json,
                                       ermlab_answer* answer, char** verdict_json);

/* config_json NULL runs the default suite. */
ERMLAB_API ermlab_status ermlab_run_suite(const char* config_json, ermlab_report** out);
ERMLAB_API ermlab_status ermlab_bench(size_t n_start, int doublings, size_t d, uint64_t seed, ermlab_report** out);
ERMLAB_API ermlab_status ermlab_report_load(const char* json, ermlab_report** out);
/* format: "json", "csv" or "markdown". */
ERMLAB_API ermlab_status ermlab_report_emit(const ermlab_report* report, const char* format, char** out);
ERMLAB_API ermlab_status ermlab_report_write(const ermlab_report* report, const char* format, const char* path);
/* Report text without timing columns. */
ERMLAB_API ermlab_status ermlab_report_untimed(const ermlab_report* report, char** out);
/* Counts and the harness exit code (0 ok, 1 disagreement or failure, 2 undecidable). */
ERMLAB_API ermlab_status ermlab_report_summary(const ermlab_report* report, size_t* total, size_t* agreed,
                                               size_t* disagreed, size_t* undecidable, size_t* failed,
                                               int* exit_code);
ERMLAB_API void ermlab_report_free(ermlab_report* report);

#ifdef __cplusplus
}
#endif

#endif
