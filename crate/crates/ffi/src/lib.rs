//! C interface to `dfrelay`.
//!
//! Configurations live behind an opaque [`DfrelayConfig`] handle created by
//! [`dfrelay_config_new`] and released by [`dfrelay_config_free`]. Every
//! other function returns a [`DfrelayStatus`] and writes results through
//! out-pointers, which are left untouched on failure. The message for the
//! most recent failure on the calling thread is available from
//! [`dfrelay_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dfrelay::analytic::{p_e2e, p_non_coop};
use dfrelay::montecarlo::{run_sim, DecodingMode, SimRun};
use dfrelay::optimizer::find_gamma_opt;
use dfrelay::{Error, SystemConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfrelayStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Numerical = 3,
    ThresholdTooHigh = 4,
    InvalidSimulation = 5,
    Panic = 6,
}

/// Opaque system configuration.
pub struct DfrelayConfig {
    inner: SystemConfig,
}

/// A BER value with its 95 % confidence half-width (zero for analytic
/// values).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DfrelayEstimate {
    pub value: f64,
    pub ci_halfwidth: f64,
    pub trials: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DfrelayStatus {
    match e {
        Error::InvalidParameter { .. } | Error::OutOfRange { .. } => {
            DfrelayStatus::InvalidParameter
        }
        Error::Quadrature { .. } | Error::ModelInconsistency { .. } => DfrelayStatus::Numerical,
        Error::ThresholdTooHigh { .. } => DfrelayStatus::ThresholdTooHigh,
        Error::InvalidSimulation(_) => DfrelayStatus::InvalidSimulation,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), (DfrelayStatus, String)>>(f: F) -> DfrelayStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DfrelayStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            DfrelayStatus::Panic
        }
    }
}

fn lift<T>(r: dfrelay::Result<T>) -> Result<T, (DfrelayStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), (DfrelayStatus, String)> {
    if p.is_null() {
        Err((DfrelayStatus::NullPointer, format!("`{name}` is NULL")))
    } else {
        Ok(())
    }
}

/// Creates a configuration from dB quantities with `N0 = 1`; the total SNR
/// `(P_s + P_r)/N0` is split `ps_share : pr_share`.
///
/// # Safety
/// `out` must be NULL or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_config_new(
    m_relays: usize,
    threshold_db: f64,
    total_snr_db: f64,
    ps_share: f64,
    pr_share: f64,
    sigma2_sd_db: f64,
    sigma2_sr_db: f64,
    sigma2_rd_db: f64,
    out: *mut *mut DfrelayConfig,
) -> DfrelayStatus {
    guard(|| {
        non_null(out, "out")?;
        let inner = lift(SystemConfig::from_db(
            m_relays,
            threshold_db,
            total_snr_db,
            (ps_share, pr_share),
            sigma2_sd_db,
            sigma2_sr_db,
            sigma2_rd_db,
        ))?;
        *out = Box::into_raw(Box::new(DfrelayConfig { inner }));
        Ok(())
    })
}

/// Releases a configuration. NULL is ignored.
///
/// # Safety
/// `config` must be NULL or a handle from [`dfrelay_config_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_config_free(config: *mut DfrelayConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Changes the selection threshold.
///
/// # Safety
/// `config` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_config_set_threshold_db(
    config: *mut DfrelayConfig,
    threshold_db: f64,
) -> DfrelayStatus {
    guard(|| {
        non_null(config, "config")?;
        let c = &mut *config;
        c.inner = lift(c.inner.with_threshold_db(threshold_db))?;
        Ok(())
    })
}

/// Rescales both powers to a new total SNR, keeping their ratio.
///
/// # Safety
/// `config` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_config_set_total_snr_db(
    config: *mut DfrelayConfig,
    total_snr_db: f64,
) -> DfrelayStatus {
    guard(|| {
        non_null(config, "config")?;
        let c = &mut *config;
        c.inner = lift(c.inner.with_total_snr_db(total_snr_db))?;
        Ok(())
    })
}

/// Analytic end-to-end BER.
///
/// # Safety
/// `config` must be NULL or a live handle; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_p_e2e(
    config: *const DfrelayConfig,
    out: *mut f64,
) -> DfrelayStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        *out = lift(p_e2e(&(*config).inner))?.value;
        Ok(())
    })
}

/// Direct-link BER at mean SNR `gamma_bar` (linear).
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_p_non_coop(gamma_bar: f64, out: *mut f64) -> DfrelayStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(p_non_coop(gamma_bar))?;
        Ok(())
    })
}

/// Monte Carlo BER over `trials` trials. A nonzero `perfect_decoding`
/// makes the selected relay always forward the transmitted symbol.
/// Results depend only on `seed` and `trials`.
///
/// # Safety
/// `config` must be NULL or a live handle; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_simulate(
    config: *const DfrelayConfig,
    seed: u64,
    trials: u64,
    perfect_decoding: i32,
    out: *mut DfrelayEstimate,
) -> DfrelayStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        let mode = if perfect_decoding != 0 {
            DecodingMode::PerfectDecoding
        } else {
            DecodingMode::ErrorPropagation
        };
        let est = lift(run_sim(&SimRun::new((*config).inner, seed, trials, mode)))?;
        *out = DfrelayEstimate {
            value: est.value,
            ci_halfwidth: est.ci_halfwidth,
            trials: est.trials,
        };
        Ok(())
    })
}

/// Threshold (dB) minimizing the analytic BER at `total_snr_db`, and that
/// BER. The configuration's own threshold and SNR are ignored.
///
/// # Safety
/// `config` must be NULL or a live handle; the out-pointers NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dfrelay_find_gamma_opt(
    config: *const DfrelayConfig,
    total_snr_db: f64,
    gamma_opt_db: *mut f64,
    ber: *mut f64,
) -> DfrelayStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(gamma_opt_db, "gamma_opt_db")?;
        non_null(ber, "ber")?;
        let p = lift(find_gamma_opt(total_snr_db, &(*config).inner))?;
        *gamma_opt_db = p.gamma_opt_db;
        *ber = p.ber_at_opt;
        Ok(())
    })
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn dfrelay_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
