#ifndef DFRELAY_H
#define DFRELAY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DfrelayStatus {
  DFRELAY_STATUS_OK = 0,
  DFRELAY_STATUS_NULL_POINTER = 1,
  DFRELAY_STATUS_INVALID_PARAMETER = 2,
  DFRELAY_STATUS_NUMERICAL = 3,
  DFRELAY_STATUS_THRESHOLD_TOO_HIGH = 4,
  DFRELAY_STATUS_INVALID_SIMULATION = 5,
  DFRELAY_STATUS_PANIC = 6,
} DfrelayStatus;

/**
 * Opaque system configuration.
 */
typedef struct DfrelayConfig DfrelayConfig;

/**
 * A BER value with its 95 % confidence half-width (zero for analytic
 * values).
 */
typedef struct DfrelayEstimate {
  double value;
  double ci_halfwidth;
  uint64_t trials;
} DfrelayEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a configuration from dB quantities with `N0 = 1`; the total SNR
 * `(P_s + P_r)/N0` is split `ps_share : pr_share`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one pointer.
 */
enum DfrelayStatus dfrelay_config_new(size_t m_relays,
                                      double threshold_db,
                                      double total_snr_db,
                                      double ps_share,
                                      double pr_share,
                                      double sigma2_sd_db,
                                      double sigma2_sr_db,
                                      double sigma2_rd_db,
                                      struct DfrelayConfig **out);

/**
 * Releases a configuration. NULL is ignored.
 *
 * # Safety
 * `config` must be NULL or a handle from [`dfrelay_config_new`] that has
 * not been freed.
 */
void dfrelay_config_free(struct DfrelayConfig *config);

/**
 * Changes the selection threshold.
 *
 * # Safety
 * `config` must be NULL or a live handle.
 */
enum DfrelayStatus dfrelay_config_set_threshold_db(struct DfrelayConfig *config,
                                                   double threshold_db);

/**
 * Rescales both powers to a new total SNR, keeping their ratio.
 *
 * # Safety
 * `config` must be NULL or a live handle.
 */
enum DfrelayStatus dfrelay_config_set_total_snr_db(struct DfrelayConfig *config,
                                                   double total_snr_db);

/**
 * Analytic end-to-end BER.
 *
 * # Safety
 * `config` must be NULL or a live handle; `out` NULL or writable.
 */
enum DfrelayStatus dfrelay_p_e2e(const struct DfrelayConfig *config, double *out);

/**
 * Direct-link BER at mean SNR `gamma_bar` (linear).
 *
 * # Safety
 * `out` must be NULL or writable.
 */
enum DfrelayStatus dfrelay_p_non_coop(double gamma_bar, double *out);

/**
 * Monte Carlo BER over `trials` trials. A nonzero `perfect_decoding`
 * makes the selected relay always forward the transmitted symbol.
 * Results depend only on `seed` and `trials`.
 *
 * # Safety
 * `config` must be NULL or a live handle; `out` NULL or writable.
 */
enum DfrelayStatus dfrelay_simulate(const struct DfrelayConfig *config,
                                    uint64_t seed,
                                    uint64_t trials,
                                    int32_t perfect_decoding,
                                    struct DfrelayEstimate *out);

/**
 * Threshold (dB) minimizing the analytic BER at `total_snr_db`, and that
 * BER. The configuration's own threshold and SNR are ignored.
 *
 * # Safety
 * `config` must be NULL or a live handle; the out-pointers NULL or
 * writable.
 */
enum DfrelayStatus dfrelay_find_gamma_opt(const struct DfrelayConfig *config,
                                          double total_snr_db,
                                          double *gamma_opt_db,
                                          double *ber);

/**
 * Message of the last failure on this thread, or an empty string. The
 * pointer stays valid until the next call into this library on the same
 * thread.
 */
const char *dfrelay_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DFRELAY_H */
