/* fairgen: adaptive coverage-driven design generation.
 *
 * C interface over the C++ core. Objects are opaque handles owned by the
 * caller and released with the matching *_destroy function. Every fallible
 * call returns an fg_status; on failure fg_last_error() describes the cause
 * (the message is thread-local and valid until the next call on the same
 * thread). */
#ifndef FAIRGEN_FAIRGEN_H
#define FAIRGEN_FAIRGEN_H

#include <stddef.h>
#include <stdint.h>

#if defined(FAIRGEN_BUILDING_LIBRARY)
#define FG_API __attribute__((visibility("default")))
#else
#define FG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fg_status {
  FG_OK = 0,
  FG_ERR_INVALID_ARGUMENT = 1,
  FG_ERR_DOMAIN = 2,
  FG_ERR_DEGENERATE_DATA = 3,
  FG_ERR_UNSUPPORTED = 4,
  FG_ERR_TRAINING = 5,
  FG_ERR_NUMERIC = 6,
  FG_ERR_IO = 7,
  FG_ERR_PARSE = 8,
  FG_ERR_INTERNAL = 100
} fg_status;

typedef enum fg_coverage_method { FG_COVERAGE_EXACT = 0, FG_COVERAGE_RASTER = 1 } fg_coverage_method;

typedef struct fg_config fg_config;
typedef struct fg_dataset fg_dataset;

/* Receives one JSON document per event (iteration record, table row). */
typedef void (*fg_json_callback)(const char* json, void* user);

FG_API const char* fg_version(void);
FG_API const char* fg_last_error(void);
FG_API const char* fg_status_name(fg_status status);

/* Run configuration. Keys are "section.name" (run.iterations, mdn.epochs,
 * bo.psi, coverage.rho, coverage.box, ...). */
FG_API fg_status fg_config_create(fg_config** out);
FG_API void fg_config_destroy(fg_config* config);
FG_API fg_status fg_config_load_toml(fg_config* config, const char* path);
FG_API fg_status fg_config_set(fg_config* config, const char* key, const char* value);
/* Copies the value (NUL-terminated) into buf when it fits; *needed receives
 * the required size including the terminator. */
FG_API fg_status fg_config_get(const fg_config* config, const char* key, char* buf, size_t cap, size_t* needed);
FG_API fg_status fg_config_validate(const fg_config* config);
/* Applies FAIRGEN_SEED when it is set. */
FG_API fg_status fg_config_apply_environment(fg_config* config);

/* Datasets. sampler is "grid" (levels = round(n^(1/d))) or "lhs". */
FG_API fg_status fg_dataset_init(const char* problem, const char* sampler, size_t n, uint64_t seed,
                                 fg_dataset** out);
FG_API fg_status fg_dataset_load(const char* csv_path, fg_dataset** out);
FG_API fg_status fg_dataset_save(const fg_dataset* data, const char* csv_path);
FG_API void fg_dataset_destroy(fg_dataset* data);
FG_API size_t fg_dataset_size(const fg_dataset* data);
FG_API size_t fg_dataset_feasible_count(const fg_dataset* data);
FG_API fg_status fg_dataset_dims(const fg_dataset* data, size_t* d, size_t* p);

/* Covered area of the dataset's feasible records under the configuration's
 * coverage settings. method may be NULL. */
FG_API fg_status fg_coverage(const fg_config* config, const fg_dataset* data, double* score,
                             fg_coverage_method* method);
FG_API fg_status fg_coverage_svg(const fg_config* config, const fg_dataset* data, const char* svg_path);

/* Runs the configured FairGen iterations into out_dir (resuming when it
 * holds a compatible run). initial may be NULL to build the dataset from the
 * configured sampler. on_iteration may be NULL. */
FG_API fg_status fg_run(const fg_config* config, const fg_dataset* initial, const char* out_dir,
                        fg_json_callback on_iteration, void* user);

/* Trains the ensemble on data and writes the S_U heatmap. svg_path may be
 * NULL. min/max may be NULL. */
FG_API fg_status fg_uncertainty_heatmap(const fg_config* config, const fg_dataset* data, size_t resolution,
                                        const char* csv_path, const char* svg_path, double* min_value,
                                        double* max_value);

/* Coverage curves for FairGen, grid and LHS sampling; writes curves.csv and
 * curves.svg into out_dir. Each curve point is reported to on_point. */
FG_API fg_status fg_compare(const fg_config* config, size_t budget, const char* out_dir, fg_json_callback on_point,
                            void* user);

/* Generative MAE evaluation of `count` datasets; writes mae.csv, errors.csv
 * and errors.svg into out_dir. Each table row is reported to on_row. */
FG_API fg_status fg_evaluate(const fg_config* config, const fg_dataset* const* datasets, const char* const* labels,
                             size_t count, size_t n_test, size_t shapes_per_test, uint64_t seed,
                             const char* out_dir, fg_json_callback on_row, void* user);

#ifdef __cplusplus
}
#endif

#endif /* FAIRGEN_FAIRGEN_H */
