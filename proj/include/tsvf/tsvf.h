#ifndef TSVF_TSVF_H
#define TSVF_TSVF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TSVF_BUILDING_LIBRARY)
#    define TSVF_API __declspec(dllexport)
#  else
#    define TSVF_API __declspec(dllimport)
#  endif
#else
#  define TSVF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsvf_status {
    TSVF_OK = 0,
    TSVF_INVALID_ARGUMENT = 1,
    TSVF_DIMENSION_MISMATCH = 2,
    TSVF_NOT_HERMITIAN = 3,
    TSVF_RESOURCE = 4,
    TSVF_NUMERICAL = 5,
    TSVF_UNKNOWN_SCENARIO = 6,
    TSVF_BAD_PARAM = 7,
    TSVF_INTERNAL = 99
} tsvf_status;

typedef enum tsvf_format { TSVF_FORMAT_CSV = 1, TSVF_FORMAT_JSON = 2, TSVF_FORMAT_BOTH = 3 } tsvf_format;

typedef struct tsvf_run tsvf_run;       /* scenario name, parameters, seed */
typedef struct tsvf_result tsvf_result; /* immutable output of one execution */

/* Strings returned through char** out-parameters are owned by the caller and
   released with tsvf_string_free. */
TSVF_API void tsvf_string_free(char* s);

/* Message for the most recent failure on the calling thread; never NULL. */
TSVF_API const char* tsvf_last_error_message(void);

TSVF_API const char* tsvf_version(void);
TSVF_API int tsvf_result_schema_version(void);

TSVF_API size_t tsvf_scenario_count(void);
/* Registry order is fixed. Returns NULL past the end. */
TSVF_API const char* tsvf_scenario_name(size_t index);
/* JSON: name, description, params (name, type, default, description), series. */
TSVF_API tsvf_status tsvf_scenario_describe(const char* name, char** json_out);

TSVF_API tsvf_status tsvf_run_create(const char* scenario, tsvf_run** out);
TSVF_API void tsvf_run_destroy(tsvf_run* run);
/* value is parsed according to the parameter's declared type. */
TSVF_API tsvf_status tsvf_run_set_param(tsvf_run* run, const char* key, const char* value);
/* Object of overrides; strings for non-string parameters are parsed as above. */
TSVF_API tsvf_status tsvf_run_set_params_json(tsvf_run* run, const char* json_object);
TSVF_API tsvf_status tsvf_run_set_seed(tsvf_run* run, uint64_t seed);
/* Resolved parameters (defaults merged with overrides) as JSON. */
TSVF_API tsvf_status tsvf_run_params_json(const tsvf_run* run, char** json_out);
TSVF_API tsvf_status tsvf_run_execute(const tsvf_run* run, tsvf_result** out);

TSVF_API void tsvf_result_destroy(tsvf_result* result);
TSVF_API tsvf_status tsvf_result_json(const tsvf_result* result, char** json_out);
TSVF_API tsvf_status tsvf_result_summary(const tsvf_result* result, char** text_out);
/* 1 when every embedded check passed, 0 otherwise, -1 on a NULL handle. */
TSVF_API int tsvf_result_all_checks_passed(const tsvf_result* result);
TSVF_API size_t tsvf_result_series_count(const tsvf_result* result);
TSVF_API const char* tsvf_result_series_name(const tsvf_result* result, size_t index);
TSVF_API tsvf_status tsvf_result_series_csv(const tsvf_result* result, size_t index, char** csv_out);
TSVF_API size_t tsvf_result_scalar_count(const tsvf_result* result);
TSVF_API tsvf_status tsvf_result_scalar(const tsvf_result* result, size_t index, const char** name, double* value);
/* Writes results.json and/or <series>.csv into out_dir, creating it if needed. */
TSVF_API tsvf_status tsvf_result_write(const tsvf_result* result, const char* out_dir, tsvf_format format);

#ifdef __cplusplus
}
#endif

#endif
