/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to libextinctd. Every function returns an extinctd_status
 * (0 on success); on failure extinctd_last_error() describes the problem for
 * the calling thread. Handles are opaque and owned by the caller.
 */
#ifndef EXTINCTD_H
#define EXTINCTD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int extinctd_status;

enum {
  EXTINCTD_OK = 0,
  EXTINCTD_MISSING_FIELD = 1,
  EXTINCTD_INVALID_RATE_MATRIX = 2,
  EXTINCTD_DIMENSION_MISMATCH = 3,
  EXTINCTD_NON_FINITE_STATE = 4,
  EXTINCTD_RATE_BOUND_VIOLATED = 5,
  EXTINCTD_NON_FINITE_OBSERVABLE = 6,
  EXTINCTD_EMPTY_WINDOW = 7,
  EXTINCTD_WINDOW_TOO_SHORT = 8,
  EXTINCTD_NON_SQUARE = 9,
  EXTINCTD_REDUCIBLE = 10,
  EXTINCTD_SINGULAR_SOLVE = 11,
  EXTINCTD_NO_CONVERGENCE = 12,
  EXTINCTD_LENGTH_MISMATCH = 13,
  EXTINCTD_INDEX_OUT_OF_RANGE = 14,
  EXTINCTD_INVALID_ADJACENCY = 15,
  EXTINCTD_NEGATIVE_RATE = 16,
  EXTINCTD_NEGATIVE_PARAMETER = 17,
  EXTINCTD_NON_POSITIVE_F = 18,
  EXTINCTD_PARSE_ERROR = 19,
  EXTINCTD_UNKNOWN_KEY = 20,
  EXTINCTD_UNKNOWN_MODEL = 21,
  EXTINCTD_INVALID_CONFIG = 22,
  EXTINCTD_IO_ERROR = 23,
  EXTINCTD_INVALID_ARGUMENT = 24,
  EXTINCTD_INTERNAL = 99
};

typedef struct extinctd_config extinctd_config;
typedef struct extinctd_result extinctd_result;

const char* extinctd_version(void);
/* Message of the last failed call on this thread ("" when none). */
const char* extinctd_last_error(void);
/* Symbolic name of a status code, e.g. "UnknownKey". */
const char* extinctd_status_name(extinctd_status code);

/* Parses a YAML config. Semantic checks are deferred to
 * extinctd_config_validate so that overrides can be applied first. */
extinctd_status extinctd_config_load(const char* path, extinctd_config** out);
extinctd_status extinctd_config_parse(const char* yaml_text, extinctd_config** out);
void extinctd_config_free(extinctd_config* cfg);

extinctd_status extinctd_config_set_seed(extinctd_config* cfg, uint64_t seed);
extinctd_status extinctd_config_set_replicas(extinctd_config* cfg, uint64_t replicas);
extinctd_status extinctd_config_set_output(extinctd_config* cfg, const char* dir);
extinctd_status extinctd_config_validate(const extinctd_config* cfg);
/* Canonical YAML for cfg; release with extinctd_string_free. */
extinctd_status extinctd_config_emit(const extinctd_config* cfg, char** yaml_out);

/* Runs the experiment and writes its files. threads = 0 reads
 * EXTINCTD_THREADS (default 1). */
extinctd_status extinctd_run(const extinctd_config* cfg, unsigned threads, extinctd_result** out);
const char* extinctd_result_report(const extinctd_result* result);
size_t extinctd_result_file_count(const extinctd_result* result);
const char* extinctd_result_file(const extinctd_result* result, size_t index);
void extinctd_result_free(extinctd_result* result);

size_t extinctd_model_count(void);
const char* extinctd_model_name(size_t index);
const char* extinctd_model_summary(size_t index);

void extinctd_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* EXTINCTD_H */
