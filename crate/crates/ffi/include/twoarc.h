#ifndef TWOARC_H
#define TWOARC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TwoarcStatus {
  TWOARC_STATUS_OK = 0,
  TWOARC_STATUS_MALFORMED = 1,
  TWOARC_STATUS_DOMAIN = 2,
  TWOARC_STATUS_NUMERIC = 3,
} TwoarcStatus;

typedef struct TwoarcModulus TwoarcModulus;

typedef struct TwoarcPair TwoarcPair;

typedef struct TwoarcTuple TwoarcTuple;

typedef struct TwoarcComplex {
  double re;
  double im;
} TwoarcComplex;

// Outcome of the lattice test for one degree.
typedef struct TwoarcCertificate {
  uint32_t n;
  int64_t m;
  int64_t m_prime;
  double lambda;
  double lambda_prime;
  double lambda_residual;
  double lambda_prime_residual;
  double tolerance;
  bool accepted;
} TwoarcCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *twoarc_last_error(void);

// Builds a tuple from four points.
//
// # Safety
// `points` must point to four readable `TwoarcComplex` values.
enum TwoarcStatus twoarc_tuple_new(const struct TwoarcComplex *points, struct TwoarcTuple **out);

// # Safety
// `tuple` must be null or come from `twoarc_tuple_new`, and is not used afterwards.
void twoarc_tuple_free(struct TwoarcTuple *tuple);

// Lattice test of `tuple` for degree `n`.
//
// # Safety
// `tuple` must be a live handle and `out` writable.
enum TwoarcStatus twoarc_tuple_check(const struct TwoarcTuple *tuple,
                                     uint32_t n,
                                     double tol,
                                     struct TwoarcCertificate *out);

// Snaps `tuple` to the nearest T_n-tuple; writes `a2~`, `a3~` and the certificate
// of the snapped tuple.
//
// # Safety
// `tuple` must be a live handle and the outputs writable.
enum TwoarcStatus twoarc_tuple_approximate(const struct TwoarcTuple *tuple,
                                           uint32_t n,
                                           struct TwoarcComplex *a2,
                                           struct TwoarcComplex *a3,
                                           struct TwoarcCertificate *cert);

// Modulus with the given `k`.
//
// # Safety
// `out` must be writable.
enum TwoarcStatus twoarc_modulus_new(struct TwoarcComplex k, struct TwoarcModulus **out);

// Modulus of the canonical ordering of `tuple`.
//
// # Safety
// `tuple` must be a live handle and `out` writable.
enum TwoarcStatus twoarc_modulus_from_tuple(const struct TwoarcTuple *tuple,
                                            struct TwoarcModulus **out);

// # Safety
// `modulus` must be null or a handle not used afterwards.
void twoarc_modulus_free(struct TwoarcModulus *modulus);

// Writes `k`, `K` and `K'`.
//
// # Safety
// `modulus` must be a live handle and the outputs writable.
enum TwoarcStatus twoarc_modulus_periods(const struct TwoarcModulus *modulus,
                                         struct TwoarcComplex *k,
                                         struct TwoarcComplex *big_k,
                                         struct TwoarcComplex *big_k_prime);

// `sn`, `cn`, `dn` at `u`.
//
// # Safety
// `modulus` must be a live handle and the outputs writable.
enum TwoarcStatus twoarc_modulus_jacobi(const struct TwoarcModulus *modulus,
                                        struct TwoarcComplex u,
                                        struct TwoarcComplex *sn,
                                        struct TwoarcComplex *cn,
                                        struct TwoarcComplex *dn);

// Builds the Pell pair of a tuple certified at degree `n` with tolerance `tol`.
//
// # Safety
// `tuple` must be a live handle and `out` writable.
enum TwoarcStatus twoarc_pair_construct(const struct TwoarcTuple *tuple,
                                        uint32_t n,
                                        double tol,
                                        struct TwoarcPair **out);

// # Safety
// `pair` must be null or a handle not used afterwards.
void twoarc_pair_free(struct TwoarcPair *pair);

// Degree of `T`, or 0 for a null handle.
//
// # Safety
// `pair` must be null or a live handle.
size_t twoarc_pair_degree(const struct TwoarcPair *pair);

// `max |T^2 - 1 - H U^2| / |tau|^2` on the generating tuple.
//
// # Safety
// `pair` must be a live handle and `out` writable.
enum TwoarcStatus twoarc_pair_residual(const struct TwoarcPair *pair, double *out);

// Copies the `degree + 1` coefficients of `T`, constant term first.
//
// # Safety
// `buf` must have room for `len` values.
enum TwoarcStatus twoarc_pair_t_coeffs(const struct TwoarcPair *pair,
                                       struct TwoarcComplex *buf,
                                       size_t len);

// Copies the `degree - 1` coefficients of `U`, constant term first.
//
// # Safety
// `buf` must have room for `len` values.
enum TwoarcStatus twoarc_pair_u_coeffs(const struct TwoarcPair *pair,
                                       struct TwoarcComplex *buf,
                                       size_t len);

// The four simple zeros of `T^2 - 1`, sorted by real then imaginary part.
//
// # Safety
// `out` must have room for four values.
enum TwoarcStatus twoarc_pair_endpoints(const struct TwoarcPair *pair, struct TwoarcComplex *out);

// Runs a JSON request (or re-runs an earlier report) exactly as the command
// line does. On success and on job failure `*report` receives the JSON
// report, to be released with `twoarc_string_free`.
//
// # Safety
// `request` must be a NUL-terminated string and `report` writable.
enum TwoarcStatus twoarc_run_json(const char *request, char **report);

// # Safety
// `s` must be null or a string returned by this library.
void twoarc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWOARC_H */
