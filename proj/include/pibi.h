/* C API for the PIBI toolkit: permutationally invariant Bell inequalities,
 * symmetric-sector Bell operators, OAT-state violations, the moment-matrix
 * membership SDP and non-Gaussianity diagnostics.
 *
 * All functions return pibi_status; outputs go through pointers. Opaque
 * handles are freed with their matching *_free function. Strings returned
 * through char** are owned by the caller and freed with pibi_string_free.
 */
#ifndef PIBI_H
#define PIBI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pibi_status {
  PIBI_OK = 0,
  PIBI_ERR_INVALID_ARG = 1,
  PIBI_ERR_MISSING_CORRELATOR = 2,
  PIBI_ERR_SIZE_LIMIT = 3,
  PIBI_ERR_OVERFLOW = 4,
  PIBI_ERR_SOLVER_FAILURE = 5,
  PIBI_ERR_NO_VIOLATION = 6,
  PIBI_ERR_NON_CONVERGENCE = 7,
  PIBI_ERR_INVALID_CERTIFICATE = 8,
  PIBI_ERR_DEGREE_OVERFLOW = 9,
  PIBI_ERR_DEGENERATE_VARIANCE = 10,
  PIBI_ERR_JSON = 11,
  PIBI_ERR_INTERNAL = 12
} pibi_status;

const char* pibi_status_name(pibi_status s);
/* Detail message of the most recent failure on this thread. */
const char* pibi_last_error(void);
void pibi_string_free(char* s);

/* ---- inequality catalog ---- */

typedef struct pibi_catalog pibi_catalog;
typedef struct pibi_family pibi_family;

pibi_status pibi_catalog_create(pibi_catalog** out);
void pibi_catalog_free(pibi_catalog* cat);
int pibi_catalog_size(const pibi_catalog* cat);
/* Borrowed pointer, valid while the catalog lives. */
pibi_status pibi_catalog_at(const pibi_catalog* cat, int index, const pibi_family** out);
pibi_status pibi_catalog_find(const pibi_catalog* cat, const char* name, const pibi_family** out);

pibi_status pibi_family_from_json(const char* json, pibi_family** out); /* owned by caller */
void pibi_family_free(pibi_family* f);
pibi_status pibi_family_to_json(const pibi_family* f, char** out_json);
const char* pibi_family_name(const pibi_family* f);
int pibi_family_order(const pibi_family* f);

/* ---- classical side ---- */

typedef struct pibi_classical_report {
  int pass;
  int64_t min_value;
  int64_t min_n;
  int64_t argmin[4];
} pibi_classical_report;

pibi_status pibi_verify_classical(const pibi_family* f, int64_t n_lo, int64_t n_hi,
                                  pibi_classical_report* out);
pibi_status pibi_eval_partition(const pibi_family* f, int64_t a, int64_t b, int64_t c, int64_t d,
                                int64_t* out_value);

typedef struct pibi_vertexset pibi_vertexset;

pibi_status pibi_vertices(int64_t n, int max_order, pibi_vertexset** out);
void pibi_vertexset_free(pibi_vertexset* vs);
int64_t pibi_vertexset_count(const pibi_vertexset* vs);
int pibi_vertexset_dim(const pibi_vertexset* vs);
pibi_status pibi_vertexset_point(const pibi_vertexset* vs, int64_t index, int64_t* out_coords);

typedef struct pibi_facet_report {
  int valid;
  int64_t min_value;
  int64_t tight_count;
  int tight_affine_rank;
  int ambient_affine_dim;
  int is_facet;
} pibi_facet_report;

pibi_status pibi_facet_check(const pibi_family* f, int64_t n, pibi_facet_report* out);

/* ---- quantum side ---- */

pibi_status pibi_optimize_theta(const pibi_family* f, int64_t n, double* out_theta, double* out_qv,
                                double* out_ratio);

/* OAT state amplitudes (out_re/out_im of length n+1). */
pibi_status pibi_oat_state(int64_t n, double mu, double* out_re, double* out_im);

/* Minimal-eigenvalue state of the Bell operator at its optimal planar angle. */
pibi_status pibi_min_eig_state(const pibi_family* f, int64_t n, double* out_theta, double* out_ratio,
                               double* out_re, double* out_im);

pibi_status pibi_oat_optimize_angles(const pibi_family* f, int64_t n, double mu, double eta, int starts,
                                     double out_angles[4], double* out_value, double* out_ratio);

/* PIBI_ERR_NO_VIOLATION when even the pure state does not violate. */
pibi_status pibi_oat_min_purity(const pibi_family* f, int64_t n, double mu, double* out_eta);

/* Expectation of the four-angle Bell operator on a caller-supplied symmetric
 * state mixed with white noise of purity eta. */
pibi_status pibi_state_bell_value(const pibi_family* f, int64_t n, const double* re, const double* im,
                                  double eta, const double angles[4], double* out_value);
pibi_status pibi_state_optimize_angles(const pibi_family* f, int64_t n, const double* re, const double* im,
                                       double eta, int starts, double out_angles[4], double* out_value,
                                       double* out_ratio);

/* ---- moment-matrix SDP ---- */

typedef struct pibi_sdp_options {
  double lambda_cap;    /* default 2.0 when <= 0 */
  double tolerance;     /* default 1e-10 when <= 0 */
  int direction_starts; /* default 8 when <= 0 */
  int alpha_beta_grid;  /* default 180 when <= 0 */
} pibi_sdp_options;

/* Membership of an explicit 9-component K=3 correlator point
 * (S_0, S_1, S_00, S_01, S_11, S_000, S_001, S_011, S_111). */
pibi_status pibi_sdp_membership_point(int64_t n, const double point9[9], int constrained, double alpha,
                                      double beta, const pibi_sdp_options* opts, double* out_lambda);

/* Full detection pipeline on the OAT state: direction optimization, optional
 * (alpha, beta) optimization under the one-third-moment constraint, dual
 * certificate extraction and exhaustive vertex validation. Returns the
 * certificate (with metadata) as JSON. */
pibi_status pibi_sdp_detect(int64_t n, double mu, int constrain_one_third_moment,
                            const pibi_sdp_options* opts, char** out_certificate_json);

/* ---- non-Gaussianity ---- */

pibi_status pibi_excess_kurtosis(int64_t n, const double* re, const double* im, int optimize,
                                 double* out_value, double out_direction[3]);
pibi_status pibi_wigner_negativity(int64_t n, const double* re, const double* im, double tol,
                                   double* out_value);
/* Wigner field on an n_theta x n_phi Gauss-Legendre x uniform grid;
 * out_theta (n_theta), out_phi (n_phi), out_w (n_theta * n_phi row-major). */
pibi_status pibi_wigner_field(int64_t n, const double* re, const double* im, int n_theta, int n_phi,
                              double* out_theta, double* out_phi, double* out_w);

pibi_status pibi_clebsch_gordan(double j1, double m1, double j2, double m2, double jj, double mm,
                                double* out_value);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PIBI_H */
