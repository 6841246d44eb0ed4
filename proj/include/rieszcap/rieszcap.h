/* rieszcap C interface.
 *
 * Every fallible call returns an rc_status; on failure the message is
 * available from rc_last_error() on the same thread until the next call.
 * Objects are opaque handles released with their *_free function. Strings
 * returned through char** are owned by the caller and released with
 * rc_string_free. Windows use r_out = INFINITY for "no outer cutoff".
 */
#ifndef RIESZCAP_H
#define RIESZCAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(RIESZCAP_BUILDING_LIBRARY)
#define RC_API __attribute__((visibility("default")))
#else
#define RC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rc_status {
  RC_OK = 0,
  RC_ERR_DOMAIN = 1,
  RC_ERR_ARGUMENT = 2,
  RC_ERR_SIZE = 3,
  RC_ERR_PARSE = 4,
  RC_ERR_IO = 5,
  RC_ERR_UNSUPPORTED_EXPONENT = 6,
  RC_ERR_EMPTY_RESTRICTION = 7,
  RC_ERR_TOLERANCE = 8,
  RC_ERR_INTERNAL = 9
} rc_status;

RC_API const char* rc_version(void);
RC_API const char* rc_status_name(rc_status status);
RC_API const char* rc_last_error(void);
RC_API void rc_string_free(char* s);

/* Worker threads for parallel reductions; 0 = hardware default. Results do
 * not depend on this value. */
RC_API void rc_set_thread_limit(unsigned limit);
RC_API unsigned rc_thread_limit(void);

/* Mutation hook: multiplies every pointwise p_alpha by `scale` (1 = off). */
RC_API void rc_set_p_alpha_fault_scale(double scale);

/* ---- measures ---------------------------------------------------------- */

typedef struct rc_measure rc_measure;

/* coords: atoms * n values, atom-major. delta <= 0 selects the minimum
 * pairwise distance (1 for a single atom). */
RC_API rc_status rc_measure_create(size_t n, size_t atoms, const double* coords,
                                   const double* weights, double delta, rc_measure** out);
RC_API void rc_measure_free(rc_measure* mu);
RC_API size_t rc_measure_dim(const rc_measure* mu);
RC_API size_t rc_measure_size(const rc_measure* mu);
RC_API double rc_measure_delta(const rc_measure* mu);
RC_API double rc_measure_total_mass(const rc_measure* mu);
RC_API double rc_measure_diameter(const rc_measure* mu);
/* coords_out receives dim() values; either output may be NULL. */
RC_API rc_status rc_measure_atom(const rc_measure* mu, size_t i, double* coords_out,
                                 double* weight_out);
RC_API rc_status rc_measure_dilate(const rc_measure* mu, double lambda, rc_measure** out);
RC_API rc_status rc_measure_normalize(const rc_measure* mu, rc_measure** out);

/* JSON schema {"n", "delta", "atoms", "weights"}; ".csv" files hold rows
 * x1..xn,w with an optional header. */
RC_API rc_status rc_measure_load(const char* path, rc_measure** out);
RC_API rc_status rc_measure_from_json(const char* text, rc_measure** out);
RC_API rc_status rc_measure_to_json(const rc_measure* mu, char** out);
RC_API rc_status rc_measure_save_json(const rc_measure* mu, const char* path);

typedef struct rc_cantor_spec {
  size_t n;
  double lambda;
  unsigned depth;
  double base;
  size_t max_atoms;
} rc_cantor_spec;

RC_API void rc_cantor_spec_default(rc_cantor_spec* spec);
RC_API rc_status rc_cantor_ratio_for_dimension(size_t n, double dim, double* out);
RC_API rc_status rc_cantor_similarity_dimension(const rc_cantor_spec* spec, double* out);
/* RC_ERR_SIZE when 2^(n*depth) exceeds max_atoms. */
RC_API rc_status rc_generate_cantor(const rc_cantor_spec* spec, rc_measure** out);

/* ---- energies ---------------------------------------------------------- */

typedef struct rc_window {
  double eps;
  double r_out;
} rc_window;

RC_API rc_status rc_p_alpha_triple(size_t n, const double* x1, const double* x2,
                                   const double* x3, double alpha, double* out);
RC_API rc_status rc_p_alpha_energy(const rc_measure* mu, double alpha, rc_window w, double* out);
RC_API rc_status rc_riesz_l2_energy(const rc_measure* mu, double alpha, rc_window w,
                                    double* out);
RC_API rc_status rc_pointwise_p_potential(const rc_measure* mu, const double* x, double alpha,
                                          rc_window w, double* out);
/* Default exponents when s <= 0: s = (2/3)(n - alpha), p = 3/2. */
RC_API rc_status rc_wolff_potential(const rc_measure* mu, const double* x, double s, double p,
                                    double alpha, rc_window w, double* out);
RC_API rc_status rc_wolff_energy(const rc_measure* mu, double alpha, rc_window w, double* out);
RC_API rc_status rc_tolsa_energy(const rc_measure* mu, double alpha, rc_window w, double* out);

typedef struct rc_energy_report {
  size_t n;
  size_t atoms;
  double alpha;
  double eps;
  double r_out;
  double p_alpha;
  double riesz_l2;
  double sup_riesz_l2;
  double wolff;
  double m_alpha_max;
  double e_alpha;
} rc_energy_report;

RC_API rc_status rc_energy_report_compute(const rc_measure* mu, double alpha, rc_window w,
                                          rc_energy_report* out);
RC_API const char* rc_energy_csv_header(void);
RC_API rc_status rc_energy_report_csv_row(const rc_energy_report* r, char** out);
RC_API rc_status rc_energy_report_json(const rc_energy_report* r, char** out);

/* ---- capacity ---------------------------------------------------------- */

typedef struct rc_optimizer_config {
  unsigned max_iters;
  int backtracking; /* 0: fixed step */
  double fixed_step;
  double tolerance;
  uint64_t seed;
  int random_init;
  unsigned refine_iters;
  double stationarity; /* gradient-mapping norm stop */
} rc_optimizer_config;

RC_API void rc_optimizer_config_default(rc_optimizer_config* cfg);

typedef struct rc_capacity rc_capacity;

RC_API rc_status rc_minimize_wolff_energy(const rc_measure* support, double alpha, rc_window w,
                                          const rc_optimizer_config* cfg, rc_capacity** out);
RC_API rc_status rc_estimate_gamma_plus(const rc_measure* support, double alpha, rc_window w,
                                        const rc_optimizer_config* cfg, rc_capacity** out);
RC_API rc_status rc_admissible_lower_bound(const rc_measure* mu, double alpha, rc_window w,
                                           rc_capacity** out);
RC_API void rc_capacity_free(rc_capacity* c);
RC_API double rc_capacity_value(const rc_capacity* c);
RC_API const char* rc_capacity_method(const rc_capacity* c);
/* RC_ERR_ARGUMENT when the label is absent. */
RC_API rc_status rc_capacity_diagnostic(const rc_capacity* c, const char* label, double* out);
RC_API rc_status rc_capacity_witness(const rc_capacity* c, rc_measure** out);
RC_API rc_status rc_capacity_to_json(const rc_capacity* c, char** out);

typedef struct rc_comparability {
  double gamma_plus_proxy;
  double csp_proxy;
  double ratio;
  double gamma_plus_energy;
  double csp_energy;
  double csp_iterations;
  int csp_converged;
} rc_comparability;

RC_API rc_status rc_comparability_report(const rc_measure* support, double alpha, rc_window w,
                                         const rc_optimizer_config* cfg, rc_comparability* out);

/* Keeps the atoms of the probability measure mu with potential <= t.
 * `restricted` (renormalized) may be NULL. */
RC_API rc_status rc_chebyshev_restrict(const rc_measure* mu, const double* potentials, double t,
                                       double* retained_mass, rc_measure** restricted);

RC_API size_t rc_bilipschitz_map_count(void);
RC_API const char* rc_bilipschitz_map_id(size_t i);

typedef struct rc_bilipschitz {
  double before;
  double after;
  double ratio;
  double csp_before;
  double csp_after;
  double bound;
  int within_bound;
} rc_bilipschitz;

/* bound <= 0 selects the default from the thresholds file. */
RC_API rc_status rc_bilipschitz_experiment(const rc_measure* support, const char* map_id,
                                           double alpha, rc_window w,
                                           const rc_optimizer_config* cfg, double bound,
                                           rc_bilipschitz* out);

typedef struct rc_capacity_row {
  const char* set_id;
  size_t n;
  double alpha;
  double dim;   /* NaN: not a Cantor set */
  int depth;    /* -1: not a Cantor set */
  double eps;
  const char* method;
  double value;
  double energy;
  double iters;
  const char* status;
  double csp_value;  /* NaN: empty cell */
  double csp_energy;
  double ratio;
} rc_capacity_row;

RC_API const char* rc_capacity_csv_header(void);
RC_API rc_status rc_capacity_csv_row(const rc_capacity_row* row, char** out);

/* ---- verification battery --------------------------------------------- */

typedef struct rc_verify_config {
  uint64_t seed;
  int quick;
  const char* ratio_csv_path; /* NULL: not written */
  double p_alpha_fault_scale;
  const char* suites;         /* comma-separated names, NULL: all */
} rc_verify_config;

typedef struct rc_suite_info {
  const char* name;
  int criterion;
  int passed;
  size_t checks;
  size_t failures;
  const char* message;
  double seconds;
} rc_suite_info;

typedef struct rc_verify_report rc_verify_report;

RC_API void rc_verify_config_default(rc_verify_config* cfg);
RC_API size_t rc_verify_suite_name_count(void);
RC_API const char* rc_verify_suite_name(size_t i);
RC_API rc_status rc_verify_run(const rc_verify_config* cfg, rc_verify_report** out);
RC_API void rc_verify_report_free(rc_verify_report* r);
RC_API int rc_verify_passed(const rc_verify_report* r);
RC_API size_t rc_verify_suite_count(const rc_verify_report* r);
/* Strings stay valid until the report is freed. */
RC_API rc_status rc_verify_suite(const rc_verify_report* r, size_t i, rc_suite_info* out);
/* Deterministic summary (no timings). */
RC_API rc_status rc_verify_summary_json(const rc_verify_report* r, char** out);
RC_API rc_status rc_verify_timings_json(const rc_verify_report* r, char** out);

#ifdef __cplusplus
}
#endif

#endif /* RIESZCAP_H */
