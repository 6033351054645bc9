#ifndef NFTSOLITON_H
#define NFTSOLITON_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>

// Result codes returned by every fallible function.
typedef enum NftStatus {
  NFT_STATUS_OK = 0,
  NFT_STATUS_NULL_POINTER = 1,
  NFT_STATUS_INVALID_ARGUMENT = 2,
  NFT_STATUS_BUFFER_TOO_SMALL = 3,
  NFT_STATUS_NOT_POWER_OF_TWO = 4,
  NFT_STATUS_INVALID_PAIR = 5,
  NFT_STATUS_SINGULAR = 6,
  NFT_STATUS_NUMERICAL_FAILURE = 7,
  NFT_STATUS_PANIC = 8,
} NftStatus;

// Opaque scattering pair `(a, b)`.
typedef struct NftPair NftPair;

// Opaque signal of `D` scaled samples.
typedef struct NftSignal NftSignal;

// Complex number with the layout of C99 `double _Complex`.
typedef struct NftComplex {
  double re;
  double im;
} NftComplex;

// Message describing the last failure on this thread, or NULL. The string
// stays valid until the next failing call on the same thread.
const char *nft_last_error_message(void);

// Builds the pair `(a, b)` for `k` eigenvalues in the upper half-plane and
// a truncated-sinc continuous spectrum of gain `delta` and cutoff
// `omega_c`, with `d` coefficients each.
//
// # Safety
// `lambdas` must point to `k` readable values (or be NULL when `k == 0`)
// and `out` must be a valid pointer to a handle slot.
enum NftStatus nft_synthesize(const struct NftComplex *lambdas,
                              size_t k,
                              double delta,
                              size_t d,
                              double omega_c,
                              struct NftPair **out);

// Wraps caller-provided coefficients of `a(z)` and `b(z)`, `d` each,
// ordered by increasing power of `1/z`.
//
// # Safety
// `a` and `b` must each point to `d` readable values and `out` must be a
// valid pointer to a handle slot.
enum NftStatus nft_pair_from_coeffs(const struct NftComplex *a,
                                    const struct NftComplex *b,
                                    size_t d,
                                    struct NftPair **out);

// Number of coefficients `D` of each polynomial, or 0 for NULL.
//
// # Safety
// `pair` must be NULL or a live handle.
size_t nft_pair_len(const struct NftPair *pair);

// Copies the coefficients of `a` and `b` into arrays of `capacity` values.
//
// # Safety
// `pair` must be a live handle; `a_out` and `b_out` must each point to
// `capacity` writable values.
enum NftStatus nft_pair_coeffs(const struct NftPair *pair,
                               struct NftComplex *a_out,
                               struct NftComplex *b_out,
                               size_t capacity);

// Releases a pair. NULL is ignored.
//
// # Safety
// `pair` must be NULL or a handle not yet freed.
void nft_pair_free(struct NftPair *pair);

// Fast inversion of a pair; `D` must be a power of two.
//
// # Safety
// `pair` must be a live handle and `out` a valid pointer to a handle slot.
enum NftStatus nft_invert_fast(const struct NftPair *pair, struct NftSignal **out);

// Sample-by-sample inversion of a pair.
//
// # Safety
// `pair` must be a live handle and `out` a valid pointer to a handle slot.
enum NftStatus nft_invert_sequential(const struct NftPair *pair, struct NftSignal **out);

// Wraps `d` caller-provided scaled samples.
//
// # Safety
// `samples` must point to `d` readable values and `out` must be a valid
// pointer to a handle slot.
enum NftStatus nft_signal_from_samples(const struct NftComplex *samples,
                                       size_t d,
                                       struct NftSignal **out);

// Number of samples, or 0 for NULL.
//
// # Safety
// `signal` must be NULL or a live handle.
size_t nft_signal_len(const struct NftSignal *signal);

// Sample spacing `1/D`, or 0 for NULL.
//
// # Safety
// `signal` must be NULL or a live handle.
double nft_signal_eps(const struct NftSignal *signal);

// Copies the samples into an array of `capacity` values.
//
// # Safety
// `signal` must be a live handle and `out` must point to `capacity`
// writable values.
enum NftStatus nft_signal_samples(const struct NftSignal *signal,
                                  struct NftComplex *out,
                                  size_t capacity);

// Releases a signal. NULL is ignored.
//
// # Safety
// `signal` must be NULL or a handle not yet freed.
void nft_signal_free(struct NftSignal *signal);

// Forward transform of a signal to its pair `(a, b)`; `D` must be a power
// of two.
//
// # Safety
// `signal` must be a live handle and `out` a valid pointer to a handle slot.
enum NftStatus nft_forward(const struct NftSignal *signal, struct NftPair **out);

// Eigenvalues `lambda_k` of the pair, from the roots of `a(z)` outside the
// unit circle. `count` always receives the number found; the values are
// written only when `capacity` is large enough.
//
// # Safety
// `pair` must be a live handle, `count` a valid pointer, and `out` must
// point to `capacity` writable values (or be NULL when `capacity == 0`).
enum NftStatus nft_find_eigenvalues(const struct NftPair *pair,
                                    struct NftComplex *out,
                                    size_t capacity,
                                    size_t *count);

#endif /* NFTSOLITON_H */
