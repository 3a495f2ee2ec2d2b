#ifndef KMSLAB_KMSLAB_H
#define KMSLAB_KMSLAB_H

/*
 * C interface to kmslab. Objects are opaque handles released with their
 * *_free function. Every function returns a kmslab_status; on failure the
 * message is available from kmslab_last_error() on the calling thread.
 * Strings returned through char** are owned by the caller and released
 * with kmslab_string_free(). Output arguments are written only on success.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KMSLAB_API __declspec(dllexport)
#else
#define KMSLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kmslab_status {
  KMSLAB_OK = 0,
  KMSLAB_INVALID_ARGUMENT = 1,
  KMSLAB_PARSE = 2,
  KMSLAB_DOMAIN = 3,
  KMSLAB_NUMERICAL = 4,
  KMSLAB_IO = 5,
  KMSLAB_INTERNAL = 6
} kmslab_status;

typedef struct kmslab_flow kmslab_flow;
typedef struct kmslab_state kmslab_state;
typedef struct kmslab_dimgroup kmslab_dimgroup;
typedef struct kmslab_cocycle kmslab_cocycle;

KMSLAB_API const char* kmslab_version(void);
KMSLAB_API const char* kmslab_schema_version(void);
KMSLAB_API const char* kmslab_last_error(void);
KMSLAB_API const char* kmslab_status_name(kmslab_status s);
KMSLAB_API void kmslab_string_free(char* s);

/* Flows: {"algebra": {"blocks": [...]}, "generator": {"blocks": [...]}} */
KMSLAB_API kmslab_status kmslab_flow_from_json(const char* json, kmslab_flow** out);
KMSLAB_API kmslab_status kmslab_flow_to_json(const kmslab_flow* flow, char** json);
KMSLAB_API void kmslab_flow_free(kmslab_flow* flow);

/* States: {"algebra": ..., "density": ..., "beta": optional} */
KMSLAB_API kmslab_status kmslab_state_from_json(const char* json, kmslab_state** out);
KMSLAB_API kmslab_status kmslab_state_to_json(const kmslab_state* state, char** json);
KMSLAB_API void kmslab_state_free(kmslab_state* state);

KMSLAB_API kmslab_status kmslab_gibbs(const kmslab_flow* flow, double beta, kmslab_state** out);
KMSLAB_API kmslab_status kmslab_verify_kms(const kmslab_flow* flow, const kmslab_state* state,
                                           double beta, double tol, uint64_t seed, int* passed,
                                           char** verdict_json);
KMSLAB_API kmslab_status kmslab_simplex(const kmslab_flow* flow, double beta, char** json);
/* β-sweep of the KMS simplex; betas need not be sorted. */
KMSLAB_API kmslab_status kmslab_simplex_sweep(const kmslab_flow* flow, const double* betas,
                                              size_t count, int threads, char** csv,
                                              char** svg, char** certificate_json);

KMSLAB_API kmslab_status kmslab_modular_report(const kmslab_flow* flow, double beta, int* passed,
                                               char** json);

/* period <= 0 selects the minimal period of the flow. */
KMSLAB_API kmslab_status kmslab_fejer_mean(const kmslab_flow* flow, const char* element_json,
                                           int n_terms, double period, char** json);
KMSLAB_API kmslab_status kmslab_decompose_csv(const kmslab_flow* flow, const char* element_json,
                                              double period, char** csv);

/* site_json: a Hermitian matrix (array of rows) or {"generator": matrix}. */
KMSLAB_API kmslab_status kmslab_factor_type(const char* site_json, double beta, char** json);
KMSLAB_API kmslab_status kmslab_gamma(const char* site_json, double beta, char** json);

KMSLAB_API kmslab_status kmslab_matroid(const char* spec_json, double beta, char** json);
KMSLAB_API kmslab_status kmslab_trace_window(const char* family_json, char** json);

/* Dimension groups: {"rank": r, "rho": [[...]], "unit": [...]}, entries numbers or "p/q". */
KMSLAB_API kmslab_status kmslab_dimgroup_from_json(const char* json, kmslab_dimgroup** out);
KMSLAB_API void kmslab_dimgroup_free(kmslab_dimgroup* g);
KMSLAB_API kmslab_status kmslab_beta_spectrum(const kmslab_dimgroup* g, char** json);
KMSLAB_API kmslab_status kmslab_fiber(const kmslab_dimgroup* g, double beta, char** json);
/* Rows for the β-spectrum plus any extra grid points. */
KMSLAB_API kmslab_status kmslab_bundle_csv(const kmslab_dimgroup* g, const double* extra_betas,
                                           size_t count, char** csv);
KMSLAB_API kmslab_status kmslab_bundle_svg(const kmslab_dimgroup* g, char** svg);

KMSLAB_API kmslab_status kmslab_point_bundle(const char* spec_json, double t, char** json);

/* {"kind": "atomic"|"density", "lambda", "beta", "x", "truncation", "sets": [[lo, hi], ...]} */
KMSLAB_API kmslab_status kmslab_scaling_measure(const char* params_json, int* passed, char** json);

/* Cocycle grids: {"step", "half_range", "values": row-major phases (radians)} */
KMSLAB_API kmslab_status kmslab_cocycle_from_json(const char* json, kmslab_cocycle** out);
KMSLAB_API void kmslab_cocycle_free(kmslab_cocycle* c);
KMSLAB_API kmslab_status kmslab_cocycle_check(const kmslab_cocycle* c, char** json);
KMSLAB_API kmslab_status kmslab_cocycle_trivialize(const kmslab_cocycle* c, char** mu_json,
                                                   char** report_json);

/* Words are letter arrays over {1, ..., m}. rho == 0 omits the gauge β. */
KMSLAB_API kmslab_status kmslab_cuntz(int m, double rho, const int* a, size_t a_len, const int* b,
                                      size_t b_len, char** json);

#ifdef __cplusplus
}
#endif

#endif
