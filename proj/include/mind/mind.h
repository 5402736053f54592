#ifndef MIND_MIND_H
#define MIND_MIND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MIND_BUILDING_LIBRARY)
#define MIND_API __declspec(dllexport)
#else
#define MIND_API __declspec(dllimport)
#endif
#else
#define MIND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mind_status {
  MIND_OK = 0,
  MIND_ERR_NULL = 1,       /* a required pointer argument was NULL */
  MIND_ERR_PARAMETER = 2,  /* numeric argument out of domain */
  MIND_ERR_STRUCTURAL = 3, /* mismatched sizes or kinds */
  MIND_ERR_CAPACITY = 4,   /* problem above a desk-scale cap */
  MIND_ERR_CONFIG = 5,     /* estimator or threshold configuration rejected */
  MIND_ERR_IO = 6,         /* file missing, unreadable or malformed */
  MIND_ERR_INTERNAL = 7
} mind_status;

/* Opaque handles. Every *_create / producing call hands ownership to the
 * caller, who releases it with the matching *_free. Strings returned through
 * char** are released with mind_string_free. */
typedef struct mind_signal mind_signal;
typedef struct mind_system mind_system;
typedef struct mind_config mind_config;
typedef struct mind_report mind_report;

MIND_API const char* mind_version(void);
/* Message of the last failed call on this thread, "" if none. */
MIND_API const char* mind_last_error(void);
MIND_API const char* mind_status_name(mind_status status);
MIND_API void mind_string_free(char* s);

/* Signals on the periodic grid i/n. */
MIND_API mind_status mind_signal_create(const double* values, size_t n, mind_signal** out);
/* .csv (header `value`), .json (array) or .bin/.f64 (little-endian float64). */
MIND_API mind_status mind_signal_read(const char* path, mind_signal** out);
/* blocks, bumps, heavisine, doppler, sine[:freq]; l2_norm <= 0 keeps the
 * raw amplitude. */
MIND_API mind_status mind_signal_generate(const char* name, size_t n, double l2_norm, mind_signal** out);
/* y = s + sigma * stream `stream` of `seed`. */
MIND_API mind_status mind_signal_add_noise(const mind_signal* s, double sigma, uint64_t seed, uint64_t stream,
                                           mind_signal** out);
MIND_API mind_status mind_signal_write(const mind_signal* s, const char* path);
MIND_API size_t mind_signal_size(const mind_signal* s);
MIND_API mind_status mind_signal_values(const mind_signal* s, double* out, size_t capacity);
MIND_API mind_status mind_lq_norm(const mind_signal* s, double q, double* out);
MIND_API mind_status mind_sobolev_seminorm(const mind_signal* s, int k, double* out);
MIND_API mind_status mind_estimate_sigma(const mind_signal* s, double* out);
MIND_API void mind_signal_free(mind_signal* s);

/* Interval systems: "all", "dyadic", "partition" or "partition:m". */
MIND_API mind_status mind_system_create(const char* descriptor, size_t n, mind_system** out);
MIND_API size_t mind_system_count(const mind_system* sys);
MIND_API mind_status mind_system_json(const mind_system* sys, char** out);
MIND_API mind_status mind_mr_norm(const mind_signal* s, const mind_system* sys, double* out);
/* Dual norm by linear programming; certificate_json may be NULL. */
MIND_API mind_status mind_dual_norm(const mind_signal* omega, const mind_system* sys, double* value,
                                    char** certificate_json);
MIND_API void mind_system_free(mind_system* sys);

/* Thresholds. */
MIND_API double mind_tail_bound(size_t n, double sigma, double t);
MIND_API mind_status mind_universal_gamma(double C, double r, double sigma, size_t n, int k, double* out);

typedef struct mind_quantile_params {
  size_t n;
  const char* system;
  double sigma;
  double alpha;
  size_t mc_runs;
  uint64_t seed;
  const char* cache_dir; /* NULL or "" disables caching */
  unsigned threads;
} mind_quantile_params;

/* record_json may be NULL; cache_hit may be NULL. */
MIND_API mind_status mind_quantile_gamma(const mind_quantile_params* p, double* gamma, int* cache_hit,
                                         char** record_json);

/* Estimator configuration. Defaults: k = 1, partition:2, quantile rule with
 * alpha 0.1, 10000 runs, seed 1, sigma 1. */
MIND_API mind_status mind_config_create(mind_config** out);
MIND_API mind_status mind_config_set_k(mind_config* c, int k);
MIND_API mind_status mind_config_set_system(mind_config* c, const char* descriptor);
MIND_API mind_status mind_config_set_sigma(mind_config* c, double sigma);
MIND_API mind_status mind_config_set_quantile(mind_config* c, double alpha, size_t mc_runs, uint64_t seed);
MIND_API mind_status mind_config_set_universal(mind_config* c, double C, double r);
/* gamma > 0 fixes the radius; gamma == 0 returns to the threshold rule. */
MIND_API mind_status mind_config_set_gamma(mind_config* c, double gamma);
MIND_API mind_status mind_config_set_admm(mind_config* c, double rho, size_t max_iter, double tol_primal,
                                          double tol_dual);
/* Exact active-set polishing of ADMM iterates; on by default. */
MIND_API mind_status mind_config_set_polish(mind_config* c, int enabled);
MIND_API mind_status mind_config_set_threads(mind_config* c, unsigned threads);
MIND_API mind_status mind_config_set_cache_dir(mind_config* c, const char* dir);
MIND_API mind_status mind_config_json(const mind_config* c, char** out);
MIND_API void mind_config_free(mind_config* c);

/* MIND estimate. A solve that stops at the iteration limit still returns
 * MIND_OK; check mind_report_converged. */
MIND_API mind_status mind_solve(const mind_signal* y, const mind_config* c, mind_report** out);
MIND_API mind_status mind_report_estimate(const mind_report* r, mind_signal** out);
MIND_API int mind_report_converged(const mind_report* r);
MIND_API double mind_report_gamma(const mind_report* r);
MIND_API double mind_report_objective(const mind_report* r);
MIND_API double mind_report_violation(const mind_report* r);
/* JSON with "schema": 1; the estimate is inlined when estimate_path is NULL. */
MIND_API mind_status mind_report_json(const mind_report* r, const char* estimate_path, char** out);
MIND_API void mind_report_free(mind_report* r);

/* Baselines. */
MIND_API mind_status mind_smoothing_spline(const mind_signal* y, int k, double lambda, mind_signal** out);
/* report_json may be NULL. */
MIND_API mind_status mind_nemirovski(const mind_signal* y, int k, double eta, const mind_system* sys,
                                     mind_signal** out, char** report_json);

/* Rates. out[4] = {vartheta, vartheta_prime, mu, overall}; p, q may be +inf. */
MIND_API mind_status mind_rate_exponent(int k, double q, double s, double p, double out[4]);
MIND_API mind_status mind_minimax_exponent(double s, double p, double q, double* beta, int* log_factor);
/* Exact comparison of MIND and minimax exponents over the adaptation region. */
MIND_API mind_status mind_adaptation_table(int k, char** json, int* all_equal);

/* Monte-Carlo risk study of MIND; gamma follows the config's threshold rule
 * at each n with sigma set to the noise level. svg may be NULL. */
typedef struct mind_study_params {
  const char* signal;
  double signal_l2_norm; /* <= 0 keeps the raw amplitude */
  const size_t* n_list;
  size_t n_count;
  size_t replicates;
  double sigma;
  uint64_t seed;
  const double* q_list;
  size_t q_count;
  double rate_s;
  double rate_p;
} mind_study_params;

MIND_API mind_status mind_risk_study(const mind_config* c, const mind_study_params* p, char** json, char** csv,
                                     char** svg);

typedef struct mind_compare_params {
  const char* const* signals;
  size_t signal_count;
  size_t n;
  double relative_sigma;
  size_t replicates;
  uint64_t seed;
  double lambda_min;
  double lambda_max;
  size_t lambda_grid_size;
} mind_compare_params;

/* all_mind_best may be NULL. */
MIND_API mind_status mind_compare(const mind_config* c, const mind_compare_params* p, char** json, char** csv,
                                  int* all_mind_best);

/* Distance function of f sampled at fine_count = refine * n points. t must be
 * ascending. svg may be NULL. */
MIND_API mind_status mind_distance_function(const double* fine_values, size_t fine_count, size_t n, int k,
                                            const char* system, const double* t, size_t t_count, double gamma,
                                            char** csv, char** json, char** svg);

/* Line chart of several signals over the grid. */
MIND_API mind_status mind_svg_signals(const mind_signal* const* signals, const char* const* labels, size_t count,
                                      const char* title, char** out);

#ifdef __cplusplus
}
#endif

#endif
