//! Moment generating functions `E[e^{−sγ}]` of Rayleigh-faded SNRs.

use crate::error::{Error, Result};

/// MGF of an exponentially distributed SNR with mean `gamma_bar`:
/// `1/(1 + γ̄·s)`.
pub fn mgf_rayleigh(gamma_bar: f64, s: f64) -> Result<f64> {
    let denom = 1.0 + gamma_bar * s;
    if denom.is_nan() || denom <= 0.0 || denom.is_infinite() {
        return Err(Error::param(
            "gamma_bar * s",
            gamma_bar * s,
            "MGF undefined for gamma_bar * s <= -1",
        ));
    }
    Ok(denom.recip())
}

/// MGF of the largest of `n_r` i.i.d. exponential SNRs with mean
/// `gamma_bar`.
///
/// Evaluated as the telescoped product `∏_{j=1}^{n_r} j/(j + γ̄s)`, which
/// equals the alternating binomial sum of [`mgf_best_relay_series`] but
/// does not lose digits to cancellation when `γ̄s` is large.
pub fn mgf_best_relay(n_r: usize, gamma_bar: f64, s: f64) -> Result<f64> {
    if n_r == 0 {
        return Err(Error::param(
            "n_r",
            0.0,
            "best-relay MGF needs at least one relay in the selection set",
        ));
    }
    mgf_rayleigh(gamma_bar, s)?;
    Ok(best_of_product(n_r, gamma_bar * s))
}

#[inline]
pub(crate) fn best_of_product(n_r: usize, c: f64) -> f64 {
    (1..=n_r).fold(1.0, |acc, j| {
        let j = j as f64;
        acc * j / (j + c)
    })
}

/// The same MGF as the order-statistic series
/// `N_r Σ_{k=0}^{N_r−1} (−1)^k C(N_r−1, k) / (k + 1 + γ̄s)`.
pub fn mgf_best_relay_series(n_r: usize, gamma_bar: f64, s: f64) -> Result<f64> {
    if n_r == 0 {
        return Err(Error::param(
            "n_r",
            0.0,
            "best-relay MGF needs at least one relay in the selection set",
        ));
    }
    mgf_rayleigh(gamma_bar, s)?;
    let c = gamma_bar * s;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..n_r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom / (k as f64 + 1.0 + c);
        binom *= (n_r - 1 - k) as f64 / (k + 1) as f64;
    }
    Ok(n_r as f64 * sum)
}
