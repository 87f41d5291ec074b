#ifndef TOKENSAT_H
#define TOKENSAT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TsatStatus {
  TSAT_STATUS_OK = 0,
  TSAT_STATUS_NULL_POINTER = 1,
  TSAT_STATUS_INVALID_ARGUMENT = 2,
  TSAT_STATUS_PARSE_ERROR = 3,
  TSAT_STATUS_FIT_FAILED = 4,
  TSAT_STATUS_NO_LANGUAGES = 5,
  TSAT_STATUS_IO_ERROR = 6,
  TSAT_STATUS_PANIC = 7,
} TsatStatus;

// Opaque pipeline state: accumulated inputs, configuration and the last
// result.
typedef struct TsatPipeline TsatPipeline;

typedef struct TsatSaturationFit {
  double amplitude;
  double rate;
  double offset;
  double r_squared;
  double t90_minutes;
  uint32_t iterations;
  bool converged;
} TsatSaturationFit;

typedef struct TsatRankFit {
  double zipf_c;
  double zipf_alpha;
  double zipf_aic;
  double zm_c;
  double zm_alpha;
  double zm_beta;
  double zm_aic;
  // AIC of Zipf minus AIC of Zipf-Mandelbrot.
  double delta_aic;
  // 1 when Zipf-Mandelbrot is preferred, 0 for plain Zipf.
  bool zm_preferred;
} TsatRankFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The
// pointer stays valid until the next call into this library on the same
// thread.
const char *tsat_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void tsat_string_free(char *s);

// # Safety
// `out` must be a valid pointer.
enum TsatStatus tsat_compute_t90(double rate, double *out);

// Fits `A(1 - exp(-k t)) + B` to `n` points.
//
// # Safety
// `t` and `y` must point to `n` doubles; `out` must be valid.
enum TsatStatus tsat_saturation_fit(const double *t,
                                    const double *y,
                                    size_t n,
                                    struct TsatSaturationFit *out);

// Fits both rank laws to frequencies listed in rank order (descending).
//
// # Safety
// `freqs` must point to `n` values; `out` must be valid.
enum TsatStatus tsat_rank_fit(const uint64_t *freqs, size_t n, struct TsatRankFit *out);

// Character error rate of `hypothesis` against `reference`.
//
// # Safety
// Both strings must be NUL-terminated UTF-8; `out` must be valid.
enum TsatStatus tsat_cer(const char *reference, const char *hypothesis, double *out);

// Pearson correlation and its two-tailed p-value.
//
// # Safety
// `x` and `y` must point to `n` doubles; `r` and `p` must be valid.
enum TsatStatus tsat_pearson(const double *x, const double *y, size_t n, double *r, double *p);

// New pipeline with default configuration. Free with
// [`tsat_pipeline_free`].
struct TsatPipeline *tsat_pipeline_new(void);

// # Safety
// `h` must be null or a handle from [`tsat_pipeline_new`], not yet freed.
void tsat_pipeline_free(struct TsatPipeline *h);

// # Safety
// `h` must be a live handle.
enum TsatStatus tsat_pipeline_set_grid(struct TsatPipeline *h,
                                       double step_minutes,
                                       double max_minutes);

// # Safety
// `h` must be a live handle.
enum TsatStatus tsat_pipeline_set_k(struct TsatPipeline *h, size_t k);

// Sets the rank-frequency horizon and the CER horizon, both in minutes.
//
// # Safety
// `h` must be a live handle.
enum TsatStatus tsat_pipeline_set_horizons(struct TsatPipeline *h,
                                           double horizon_minutes,
                                           double cer_horizon_minutes);

// # Safety
// `h` must be a live handle.
enum TsatStatus tsat_pipeline_set_cer_threshold(struct TsatPipeline *h, double threshold);

// # Safety
// `h` must be a live handle; `language` a NUL-terminated string.
enum TsatStatus tsat_pipeline_exclude_language(struct TsatPipeline *h, const char *language);

// Appends every record of a JSON Lines log file.
//
// # Safety
// `h` must be a live handle; `path` a NUL-terminated string.
enum TsatStatus tsat_pipeline_add_log(struct TsatPipeline *h, const char *path);

// Appends records from JSON Lines text held in memory.
//
// # Safety
// `h` must be a live handle; `text` a NUL-terminated string.
enum TsatStatus tsat_pipeline_add_log_text(struct TsatPipeline *h, const char *text);

// Loads language metadata from a CSV file, replacing any earlier table.
//
// # Safety
// `h` must be a live handle; `path` a NUL-terminated string.
enum TsatStatus tsat_pipeline_set_meta(struct TsatPipeline *h, const char *path);

// Same as [`tsat_pipeline_set_meta`] with the CSV held in memory.
//
// # Safety
// `h` must be a live handle; `text` a NUL-terminated string.
enum TsatStatus tsat_pipeline_set_meta_text(struct TsatPipeline *h, const char *text);

// Loads reference transcripts (`utt_id<TAB>text`), enabling the CER
// filter.
//
// # Safety
// `h` must be a live handle; `path` a NUL-terminated string.
enum TsatStatus tsat_pipeline_set_refs(struct TsatPipeline *h, const char *path);

// Runs the full analysis on everything added so far.
//
// # Safety
// `h` must be a live handle.
enum TsatStatus tsat_pipeline_run(struct TsatPipeline *h);

// Number of languages in the last result, or 0 before a successful run.
//
// # Safety
// `h` must be null or a live handle.
size_t tsat_pipeline_language_count(const struct TsatPipeline *h);

// The last result as a JSON document. Returns null before a successful
// run. Free with [`tsat_string_free`].
//
// # Safety
// `h` must be null or a live handle.
char *tsat_pipeline_summary_json(const struct TsatPipeline *h);

// Writes report files for the last result. `format` is `csv`, `json` or
// `svg`.
//
// # Safety
// `h` must be a live handle; `out_dir` and `format` NUL-terminated.
enum TsatStatus tsat_pipeline_write_report(struct TsatPipeline *h,
                                           const char *out_dir,
                                           const char *format);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOKENSAT_H */
