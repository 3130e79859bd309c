//! Destination error probability when the selected relay forwards a flipped
//! symbol.
//!
//! With `x = +1` sent and `−1` forwarded, the MRC statistic is
//! `(γ_sd − γ_best) + ñ` with `ñ ~ N(0, (γ_sd + γ_best)/2)`. Dropping the
//! noise gives the tractable approximation `P(γ_sd < γ_best)`, available as
//! a finite series ([`p_prop_closed`]) and as a direct double integral
//! ([`p_prop_oracle`]). [`p_prop_gaussian_oracle`] keeps the noise term.

use super::terms::binomial;
use super::{check_positive, clamp_probability};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, adaptive_semi_infinite, Tolerance};
use crate::special::q_function;

/// Which finite series to evaluate for `P(γ_sd < γ_best)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagationSeries {
    /// Expansion of the best-of-`N_r` density:
    /// `Σ_{k=0}^{N_r−1} N_r C(N_r−1,k) (−1)^k (1/(k+1) − γ̄_sd/(γ̄_rd + (k+1)γ̄_sd))`.
    /// Agrees with the double integral for every `(M, N_r)`.
    #[default]
    BestOfSelected,
    /// Coefficient `M·C(M−1, N_r−1)` with `Σ_{k=0}^{M−N_r} (−1)^k C(M−N_r, k)`.
    /// Coincides with [`Self::BestOfSelected`] only when `N_r = M = 1`; kept
    /// for comparison.
    MixedPoolIndices,
}

fn check_counts(m: usize, n_r: usize) -> Result<()> {
    if n_r == 0 {
        return Err(Error::param(
            "n_r",
            0.0,
            "error propagation needs at least one admitted relay",
        ));
    }
    if n_r > m {
        return Err(Error::OutOfRange { index: n_r, max: m });
    }
    Ok(())
}

/// `P(γ_sd < γ_best)` with `γ_best` the largest of `n_r` relay → destination
/// SNRs, by the [`PropagationSeries::BestOfSelected`] series.
pub fn p_prop_closed(m: usize, n_r: usize, gamma_sd_bar: f64, gamma_rd_bar: f64) -> Result<f64> {
    p_prop_series(
        PropagationSeries::BestOfSelected,
        m,
        n_r,
        gamma_sd_bar,
        gamma_rd_bar,
    )
}

/// Evaluates the chosen series. Results are clamped only within rounding
/// slack; a series leaving `[0, 1]` by more is reported.
pub fn p_prop_series(
    series: PropagationSeries,
    m: usize,
    n_r: usize,
    gamma_sd_bar: f64,
    gamma_rd_bar: f64,
) -> Result<f64> {
    check_counts(m, n_r)?;
    let a = check_positive("gamma_sd_bar", gamma_sd_bar)?;
    let b = check_positive("gamma_rd_bar", gamma_rd_bar)?;
    let term = |k: usize| {
        let k1 = (k + 1) as f64;
        1.0 / k1 - a / (b + k1 * a)
    };
    let (lead, upper) = match series {
        PropagationSeries::BestOfSelected => (n_r as f64, n_r - 1),
        PropagationSeries::MixedPoolIndices => (m as f64 * binomial(m - 1, n_r - 1), m - n_r),
    };
    let sum: f64 = (0..=upper)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(upper, k) * term(k)
        })
        .sum();
    clamp_probability("P_prop", lead * sum)
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Density of the largest of `n` i.i.d. exponentials with mean `b`.
fn best_of_density(n: usize, b: f64, y: f64) -> f64 {
    let u = -(-y / b).exp_m1();
    n as f64 * u.powi(n as i32 - 1) * (-y / b).exp() / b
}

/// `∫₀^∞ ∫₀^{γ_best} f_sd(x) f_best(y) dx dy`, both integrals numerical.
pub fn p_prop_oracle(n_r: usize, gamma_sd_bar: f64, gamma_rd_bar: f64) -> Result<f64> {
    check_counts(n_r, n_r)?;
    let a = check_positive("gamma_sd_bar", gamma_sd_bar)?;
    let b = check_positive("gamma_rd_bar", gamma_rd_bar)?;
    let inner_tol = Tolerance {
        abs: 1e-15,
        rel: 1e-12,
        max_panels: 2000,
    };
    let outer_tol = Tolerance {
        abs: 1e-13,
        rel: 1e-11,
        max_panels: 4000,
    };
    let failure = std::cell::Cell::new(None);
    let outer = |y: f64| {
        let fy = best_of_density(n_r, b, y);
        if fy == 0.0 || y == 0.0 {
            return 0.0;
        }
        match adaptive(|x: f64| (-x / a).exp() / a, 0.0, y, inner_tol) {
            Ok(inner) => fy * inner,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let v = adaptive_semi_infinite(outer, 0.0, b * harmonic(n_r), outer_tol)
        .map_err(|e| e.in_term("P_prop oracle"))?;
    if let Some(e) = failure.take() {
        return Err(e.in_term("P_prop oracle (inner)"));
    }
    clamp_probability("P_prop oracle", v)
}

/// `E[Q((γ_sd − γ_best)/√((γ_sd + γ_best)/2))]` over both fading densities:
/// the exact destination error probability under a flipped relay symbol.
/// The integrand at `γ_sd = γ_best = 0` is taken as `Q(0) = 1/2`.
pub fn p_prop_gaussian_oracle(n_r: usize, gamma_sd_bar: f64, gamma_rd_bar: f64) -> Result<f64> {
    check_counts(n_r, n_r)?;
    let a = check_positive("gamma_sd_bar", gamma_sd_bar)?;
    let b = check_positive("gamma_rd_bar", gamma_rd_bar)?;
    let inner_tol = Tolerance {
        abs: 1e-13,
        rel: 1e-10,
        max_panels: 2000,
    };
    let outer_tol = Tolerance {
        abs: 1e-11,
        rel: 1e-9,
        max_panels: 4000,
    };
    let failure = std::cell::Cell::new(None);
    let outer = |y: f64| {
        let fy = best_of_density(n_r, b, y);
        if fy == 0.0 {
            return 0.0;
        }
        let conditional = |x: f64| {
            let sum = x + y;
            let q = if sum > 0.0 {
                q_function((x - y) / (0.5 * sum).sqrt())
            } else {
                0.5
            };
            q * (-x / a).exp() / a
        };
        match adaptive_semi_infinite(conditional, 0.0, a, inner_tol) {
            Ok(inner) => fy * inner,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let v = adaptive_semi_infinite(outer, 0.0, b * harmonic(n_r), outer_tol)
        .map_err(|e| e.in_term("P_prop Gaussian oracle"))?;
    if let Some(e) = failure.take() {
        return Err(e.in_term("P_prop Gaussian oracle (inner)"));
    }
    clamp_probability("P_prop Gaussian oracle", v)
}
