/*
 * swcons C API.
 *
 * Opaque handles are created by *_create / *_load / *_parse functions and
 * released with the matching *_free. Every fallible call returns an
 * swc_status; on failure swc_last_error() describes the problem (the message
 * is thread-local and valid until the next failing call on that thread).
 *
 * Arrays are caller-allocated. Matrices are row-major n*n.
 */
#ifndef SWCONS_SWCONS_H
#define SWCONS_SWCONS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SWC_BUILDING_LIBRARY)
#    define SWC_API __declspec(dllexport)
#  else
#    define SWC_API __declspec(dllimport)
#  endif
#else
#  define SWC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values match the CLI exit codes. */
typedef enum swc_status {
  SWC_OK = 0,
  SWC_ERR_INPUT = 1,
  SWC_ERR_HYPOTHESIS = 2,
  SWC_ERR_NUMERICAL = 3,
  SWC_ERR_INTERNAL = 4
} swc_status;

typedef enum swc_regime {
  SWC_REGIME_AUTO = -1,
  SWC_REGIME_UNDIRECTED_FIXED = 0,
  SWC_REGIME_DIRECTED_FIXED = 1,
  SWC_REGIME_UNDIRECTED_SWITCHING = 2,
  SWC_REGIME_NONLINEAR_SWITCHING = 3
} swc_regime;

typedef enum swc_protocol_kind { SWC_PROTOCOL_LINEAR = 0, SWC_PROTOCOL_NONLINEAR = 1 } swc_protocol_kind;

typedef enum swc_mode { SWC_MODE_CT = 0, SWC_MODE_DT = 1 } swc_mode;

typedef struct swc_graph swc_graph;
typedef struct swc_topology_set swc_topology_set;
typedef struct swc_schedule swc_schedule;
typedef struct swc_trajectory swc_trajectory;

/* Coupling f for the nonlinear protocol. */
typedef double (*swc_coupling_fn)(double x, void* user);

typedef struct swc_protocol {
  swc_protocol_kind kind;
  /* Sampling period; a value <= 0 means "auto": 0.9 times the certified bound. */
  double h;
  /* Sector constants (nonlinear only). */
  double gamma1;
  double gamma2;
  /* Nonlinear coupling; NULL selects f(x) = g1*x + (g2-g1)*x/(1+|x|). */
  swc_coupling_fn coupling;
  void* coupling_user;
} swc_protocol;

typedef struct swc_certificate {
  swc_regime regime;
  double h_max;
  int has_gershgorin_h;
  double gershgorin_h;
  double h;
  int has_ct_rate;
  double ct_rate;
  int has_dt_contraction;
  double dt_contraction;
  int has_lambda2_step_factor;
  double lambda2_step_factor;
  int has_lambda2_step_factor_worst;
  double lambda2_step_factor_worst;
  int has_decay_rate;
  double decay_rate;
  /* Rate for sizing horizons; certified only when equal to decay_rate. */
  int has_horizon_rate;
  double horizon_rate;
  double gamma1; /* 0 unless nonlinear */
  double gamma2;
  int w_weighted; /* 0: average rule, 1: w-weighted rule */
} swc_certificate;

typedef struct swc_verdict {
  int reached;
  double final_spread;
  int has_predicted_value;
  double predicted_value;
  int has_achieved_value;
  double achieved_value;
  int has_estimated_rate;
  double estimated_rate;
  int rate_infinite;
} swc_verdict;

typedef struct swc_random_schedule_params {
  size_t segments;
  double ct_min;
  double ct_max;
  uint64_t dt_min;
  uint64_t dt_max;
} swc_random_schedule_params;

SWC_API const char* swc_version(void);
SWC_API const char* swc_last_error(void);
/* Fills params with the library defaults. */
SWC_API void swc_random_schedule_defaults(swc_random_schedule_params* params);

/* ---- graphs ---------------------------------------------------------- */
SWC_API swc_status swc_graph_create(size_t n, const double* weights, int undirected, swc_graph** out);
SWC_API swc_status swc_graph_parse(const char* text, swc_graph** out);
SWC_API swc_status swc_graph_load(const char* path, swc_graph** out);
SWC_API void swc_graph_free(swc_graph* g);
SWC_API size_t swc_graph_order(const swc_graph* g);
SWC_API int swc_graph_is_undirected(const swc_graph* g);
SWC_API swc_status swc_graph_is_connected(const swc_graph* g, int* out);
SWC_API swc_status swc_graph_has_spanning_tree(const swc_graph* g, int* out);
SWC_API swc_status swc_graph_laplacian(const swc_graph* g, double* out);
/* Eigenvalues sorted by real part then imaginary part; arrays of length n. */
SWC_API swc_status swc_graph_spectrum(const swc_graph* g, double* re, double* im);
SWC_API swc_status swc_graph_left_eigenvector(const swc_graph* g, double* w);

/* ---- topology sets --------------------------------------------------- */
SWC_API swc_status swc_topology_set_create(swc_topology_set** out);
SWC_API void swc_topology_set_free(swc_topology_set* set);
/* Copies g under id; ids are whitespace-free tokens and must be unique. */
SWC_API swc_status swc_topology_set_add(swc_topology_set* set, const char* id, const swc_graph* g);
SWC_API size_t swc_topology_set_size(const swc_topology_set* set);
/* Agent count shared by all members (0 when empty). */
SWC_API size_t swc_topology_set_order(const swc_topology_set* set);
/* Pointer valid until the set is modified or freed. */
SWC_API const char* swc_topology_set_id(const swc_topology_set* set, size_t index);

/* ---- schedules ------------------------------------------------------- */
SWC_API swc_status swc_schedule_create(swc_schedule** out);
SWC_API swc_status swc_schedule_parse(const char* text, swc_schedule** out);
SWC_API swc_status swc_schedule_load(const char* path, swc_schedule** out);
SWC_API swc_status swc_schedule_random(uint64_t seed, const swc_random_schedule_params* params,
                                       const char* const* ids, size_t id_count, swc_schedule** out);
SWC_API void swc_schedule_free(swc_schedule* s);
SWC_API swc_status swc_schedule_add_ct(swc_schedule* s, double duration, const char* id);
SWC_API swc_status swc_schedule_add_dt(swc_schedule* s, uint64_t steps, const char* id);
SWC_API size_t swc_schedule_segment_count(const swc_schedule* s);
SWC_API double swc_schedule_total_ct(const swc_schedule* s);
SWC_API uint64_t swc_schedule_total_dt(const swc_schedule* s);
/* Writes the text form into buf (NUL-terminated when cap > 0); *len receives
 * the full length excluding the terminator. buf may be NULL to query length. */
SWC_API swc_status swc_schedule_format(const swc_schedule* s, char* buf, size_t cap, size_t* len);
SWC_API swc_status swc_schedule_save(const swc_schedule* s, const char* path);

/* ---- certification --------------------------------------------------- */
SWC_API swc_status swc_certify(const swc_topology_set* set, swc_regime regime, const swc_protocol* protocol,
                               swc_certificate* out);
/* json != 0 selects the single-line JSON object, otherwise key = value text. */
SWC_API swc_status swc_certificate_format(const swc_certificate* c, int json, char* buf, size_t cap, size_t* len);
SWC_API const char* swc_regime_name(swc_regime regime);

/* ---- simulation and analysis ----------------------------------------- */
SWC_API swc_status swc_simulate(const double* x0, size_t n, const swc_schedule* s, const swc_topology_set* set,
                                const swc_protocol* protocol, double output_resolution, swc_trajectory** out);
SWC_API void swc_trajectory_free(swc_trajectory* t);
SWC_API size_t swc_trajectory_sample_count(const swc_trajectory* t);
SWC_API size_t swc_trajectory_order(const swc_trajectory* t);
SWC_API double swc_trajectory_h(const swc_trajectory* t);
/* x receives n values; mode may be NULL. */
SWC_API swc_status swc_trajectory_sample(const swc_trajectory* t, size_t index, double* time, double* x,
                                         swc_mode* mode);
SWC_API swc_status swc_trajectory_write_csv(const swc_trajectory* t, const char* path);
SWC_API swc_status swc_trajectory_write_series_csv(const swc_trajectory* t, const char* path);

SWC_API swc_status swc_predict_consensus(const swc_topology_set* set, const swc_schedule* s, const double* x0,
                                         size_t n, double* out);
/* predicted may be NULL. */
SWC_API swc_status swc_check_consensus(const swc_trajectory* t, double tol, const double* predicted,
                                       swc_verdict* out);
SWC_API swc_status swc_verdict_format(const swc_verdict* v, char* buf, size_t cap, size_t* len);

/* Time horizon after which a run certified at `rate` has spread below tol. */
SWC_API swc_status swc_sufficient_horizon(const double* x0, size_t n, double tol, double rate, double* out);
/* Uniform draws in [lo, hi) from the library generator (mt19937_64). */
SWC_API swc_status swc_random_state(uint64_t seed, size_t n, double lo, double hi, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SWCONS_SWCONS_H */
