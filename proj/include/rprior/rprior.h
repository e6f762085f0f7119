#ifndef RPRIOR_RPRIOR_H
#define RPRIOR_RPRIOR_H

/*
 * C interface to the rprior library. Objects are opaque handles released
 * with their *_free function; strings returned through char** are released
 * with rp_string_free. Every call returns an rp_status; on failure
 * rp_last_error() describes the problem for the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RPRIOR_BUILDING_LIBRARY)
#    define RPRIOR_API __declspec(dllexport)
#  else
#    define RPRIOR_API __declspec(dllimport)
#  endif
#else
#  define RPRIOR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rp_status {
  RP_OK = 0,
  RP_ERR_ARGUMENT = 1,    /* null pointer or bad enum value */
  RP_ERR_INPUT = 2,       /* malformed file, config or scheme token */
  RP_ERR_DOMAIN = 3,      /* argument outside the mathematical domain */
  RP_ERR_SINGULAR = 4,    /* rank-deficient design */
  RP_ERR_NUMERICAL = 5,   /* a series or integral missed its tolerance */
  RP_ERR_UNSUPPORTED = 6, /* combination not defined for the scheme */
  RP_ERR_IO = 7,          /* file could not be written */
  RP_ERR_INTERNAL = 8
} rp_status;

/* Message of the last failed call on this thread; empty after success. */
RPRIOR_API const char* rp_last_error(void);
RPRIOR_API const char* rp_status_name(rp_status status);
RPRIOR_API void rp_string_free(char* s);
RPRIOR_API const char* rp_version(void);

/* ---- special functions ------------------------------------------------ */

typedef enum rp_function { RP_FN_0F1 = 0, RP_FN_1F1 = 1, RP_FN_2F1 = 2, RP_FN_U = 3 } rp_function;

typedef struct rp_eval {
  double log_value;
  size_t terms;
  int converged;
  const char* branch; /* static string */
} rp_eval;

/* Log of 0F1(;b;z), 1F1(a;b;z), 2F1(a,b;c;z) or U(a,b,z); params holds the
 * arguments in that order. */
RPRIOR_API rp_status rp_specfun(rp_function fn, const double* params, size_t n_params,
                                rp_eval* out);
RPRIOR_API rp_status rp_function_from_name(const char* name, rp_function* out);

/* ---- datasets and statistics ------------------------------------------ */

typedef struct rp_dataset rp_dataset;

RPRIOR_API rp_status rp_dataset_load(const char* path, rp_dataset** out);
/* x is n-by-k column-major; sigma may be NULL. */
RPRIOR_API rp_status rp_dataset_from_arrays(size_t n, size_t k, const double* y, const double* x,
                                            const double* sigma, rp_dataset** out);
RPRIOR_API rp_status rp_dataset_shape(const rp_dataset* dataset, size_t* n, size_t* k,
                                      int* has_sigma);
RPRIOR_API void rp_dataset_free(rp_dataset* dataset);

typedef enum rp_scenario {
  RP_SCENARIO_AUTO = 0, /* fixed when the dataset has widths */
  RP_SCENARIO_FIXED = 1,
  RP_SCENARIO_VARIABLE = 2
} rp_scenario;

typedef struct rp_stats {
  size_t n;
  size_t k;
  double mean_sq;
  double bhat_sq;
  double q0;
  int fixed_sigma;
  double ln_c_sigma;
} rp_stats;

/* Statistics of the model on the given 0-based columns (all columns when
 * columns is NULL). */
RPRIOR_API rp_status rp_stats_compute(const rp_dataset* dataset, const size_t* columns,
                                      size_t n_columns, rp_scenario scenario, rp_stats* out);

/* ---- evidence and criteria -------------------------------------------- */

typedef struct rp_evidence {
  double log_evidence;
  const char* method; /* static string */
  size_t terms;
  double abs_err_estimate;
  int converged;
} rp_evidence;

/* Schemes are tokens: gprior:<g>, hyperg[:a], zs[:series|:asymptotic],
 * parabolic for evidences; criteria also take aic, aicc, bic, hr-asym,
 * hg-asym[:a], zs-asym. */
RPRIOR_API rp_status rp_log_evidence(const rp_stats* stats, const char* scheme, rp_evidence* out);

typedef enum rp_route { RP_ROUTE_R = 0, RP_ROUTE_G = 1 } rp_route;
RPRIOR_API rp_status rp_quadrature_log_evidence(const rp_stats* stats, const char* scheme,
                                                rp_route route, rp_evidence* out);

/* -2 ln p(y|H) up to K-independent constants. */
RPRIOR_API rp_status rp_criterion(const rp_stats* stats, const char* scheme, double* out);

/* ln p(r | sigma, K) for RP_ROUTE_R, ln p(g | K, N) for RP_ROUTE_G. */
RPRIOR_API rp_status rp_prior_density(const char* scheme, rp_route variable, double x,
                                      double sigma, size_t k, size_t n, double* out);

typedef struct rp_compare_options {
  const char* const* schemes; /* scheme tokens */
  size_t n_schemes;
  rp_scenario scenario;
  size_t nested_max; /* 0: all predictors */
  const char* columns; /* "x1,x3;x2" explicit candidates, or NULL for nested */
  double hyper_g_a;   /* default a for bare "hyperg"; 0 picks 3 */
  const char* source; /* label echoed in the report, may be NULL */
} rp_compare_options;

/* JSON report, schema "rprior.compare/1". Returns RP_ERR_NUMERICAL (with the
 * report still set) when an exact evidence missed its tolerance. */
RPRIOR_API rp_status rp_compare(const rp_dataset* dataset, const rp_compare_options* options,
                                char** json_out);

/* ---- simulation -------------------------------------------------------- */

typedef struct rp_experiment rp_experiment;

/* Validated config as canonical JSON with every key present. */
RPRIOR_API rp_status rp_config_load(const char* path, char** json_out);

/* Runs the study described by a JSON config; seed overrides base_seed when
 * non-NULL. */
RPRIOR_API rp_status rp_experiment_run(const char* config_json, const uint64_t* seed,
                                       rp_experiment** out);
RPRIOR_API void rp_experiment_free(rp_experiment* experiment);

typedef struct rp_report_row {
  size_t k_true;
  const char* scheme; /* valid while the experiment lives */
  double mean_mse;
  double std_err;
  size_t reps;
} rp_report_row;

RPRIOR_API rp_status rp_experiment_rows(const rp_experiment* experiment, size_t* count);
RPRIOR_API rp_status rp_experiment_row(const rp_experiment* experiment, size_t index,
                                       rp_report_row* out);
/* Replicates that failed in any scheme, summed over schemes. */
RPRIOR_API rp_status rp_experiment_failures(const rp_experiment* experiment, size_t* count);
RPRIOR_API rp_status rp_experiment_csv(const rp_experiment* experiment, char** out);
RPRIOR_API rp_status rp_experiment_metadata_json(const rp_experiment* experiment, char** out);
/* Writes mse_table.csv and metadata.json into dir. */
RPRIOR_API rp_status rp_experiment_write_csv(const rp_experiment* experiment, const char* dir);
/* Writes mse_vs_k.svg and mse_minus_oracle.svg into dir. */
RPRIOR_API rp_status rp_experiment_write_charts(const rp_experiment* experiment, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* RPRIOR_RPRIOR_H */
