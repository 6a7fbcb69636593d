#ifndef HEATWAVE_H
#define HEATWAVE_H

/* C API for the Markov-switching extreme-value heat wave model.
 *
 * Conventions:
 *   - Functions returning hw_status report failure through the code and a
 *     thread-local message available from hw_last_error().
 *   - Density evaluators return log densities directly; -inf is a valid
 *     out-of-support sentinel, not an error.
 *   - Opaque handles are created and released by this library; passing NULL
 *     is an argument error.
 */

#include <stddef.h>

#if defined(_WIN32)
#  define HW_API __declspec(dllexport)
#else
#  define HW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hw_status {
  HW_OK = 0,
  HW_ERR_ARGUMENT = 1,
  HW_ERR_IO = 2,
  HW_ERR_PARSE = 3,
  HW_ERR_NUMERIC = 4,
  HW_ERR_INTERNAL = 5
} hw_status;

/* Message describing the most recent failure on this thread. */
HW_API const char* hw_last_error(void);

HW_API const char* hw_version(void);

typedef struct hw_params {
  double a0;       /* P(enter heat wave) */
  double a1;       /* P(remain in heat wave) */
  double u;        /* GPD threshold, degC */
  double sigma;    /* GPD scale */
  double xi;       /* GPD shape */
  double mu;       /* non-heat-wave mean */
  double sigma_n2; /* non-heat-wave variance */
  double phi;      /* AR(1) autocorrelation */
  double alpha;    /* within-heat-wave dependence, (0,1] */
  double alpha01;  /* transition-day dependence, (0,1] */
} hw_params;

HW_API hw_status hw_params_validate(const hw_params* p);

/* --- core density and transform evaluators --- */

HW_API double hw_gpd_log_density(double y, double u, double sigma, double xi);
HW_API double hw_frechet_from_gpd(double y, double u, double sigma, double xi);
HW_API double hw_frechet_from_normal(double y, double mu, double sigma_n2);
HW_API double hw_logistic_bivariate_cdf(double z1, double z2, double alpha);
HW_API double hw_bivariate_log_density(double y1, double y2, int s1, int s2,
                                       const hw_params* p);
HW_API double hw_conditional_log_density(double y_t, double y_prev, int s_t,
                                         int s_prev, const hw_params* p);
HW_API double hw_conditional_log_cdf(double y_t, double y_prev, int s_t,
                                     int s_prev, const hw_params* p);
HW_API hw_status hw_stationary_state_distribution(double a0, double a1,
                                                  double* pi0, double* pi1);

/* --- datasets (lists of summer segments) --- */

typedef struct hw_dataset hw_dataset;

HW_API hw_status hw_dataset_read_csv(const char* path, hw_dataset** out);
HW_API hw_status hw_dataset_from_arrays(const int* years, const double* values,
                                        const unsigned char* missing,
                                        int n_segments, int segment_length,
                                        hw_dataset** out);
HW_API void hw_dataset_free(hw_dataset* d);
HW_API int hw_dataset_segment_count(const hw_dataset* d);
HW_API int hw_dataset_segment_length(const hw_dataset* d, int segment);
HW_API int hw_dataset_segment_year(const hw_dataset* d, int segment);
HW_API hw_status hw_dataset_copy_segment(const hw_dataset* d, int segment,
                                         double* values,
                                         unsigned char* missing);

/* Full joint log f(y, s | theta) of one segment; states has one 0/1 entry
 * per day. The segment must be complete (no missing values). */
HW_API hw_status hw_segment_log_likelihood(const hw_dataset* d, int segment,
                                           const int* states,
                                           const hw_params* p, double* out);

/* --- pipeline stages ---
 * Each takes the resolved run configuration as a JSON document (the same
 * schema the CLI accepts via --config) and works through the filesystem. */

HW_API hw_status hw_run_preprocess(const char* config_json);
HW_API hw_status hw_run_fit(const char* config_json);
HW_API hw_status hw_run_simulate(const char* config_json);
HW_API hw_status hw_run_diagnose(const char* config_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HEATWAVE_H */
