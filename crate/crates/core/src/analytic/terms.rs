//! Per-branch building blocks of the end-to-end BER.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_2};

use super::mgf::best_of_product;
use super::{check_non_negative, check_positive, clamp_probability};
use crate::error::{Error, Result};
use crate::quadrature::refine_gauss_legendre;
use crate::special::q_scaled;

/// Probability that a relay's instantaneous SNR clears the threshold:
/// `exp(−γ_th/γ̄_sr)`.
pub fn p_dec(gamma_th: f64, gamma_sr_bar: f64) -> Result<f64> {
    check_non_negative("gamma_th", gamma_th)?;
    check_positive("gamma_sr_bar", gamma_sr_bar)?;
    Ok((-gamma_th / gamma_sr_bar).exp())
}

/// Binomial probability that exactly `i` of `m` relays enter the selection
/// set.
pub fn p_num_relays(m: usize, i: usize, p_dec: f64) -> Result<f64> {
    if i > m {
        return Err(Error::OutOfRange { index: i, max: m });
    }
    if !(0.0..=1.0).contains(&p_dec) {
        return Err(Error::param("p_dec", p_dec, "must be a probability"));
    }
    Ok(binomial(m, i) * p_dec.powi(i as i32) * (1.0 - p_dec).powi((m - i) as i32))
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Direct-link BER when no relay is admitted:
/// `(1/π) ∫₀^{π/2} M_sd(1/sin²θ) dθ`.
pub fn p_non_coop(gamma_sd_bar: f64) -> Result<f64> {
    check_positive("gamma_sd_bar", gamma_sd_bar)?;
    let integrand = |theta: f64| {
        let s2 = theta.sin().powi(2);
        s2 / (s2 + gamma_sd_bar)
    };
    let v =
        refine_gauss_legendre(integrand, 0.0, FRAC_PI_2).map_err(|e| e.in_term("P_non-coop"))?;
    clamp_probability("P_non-coop", FRAC_1_PI * v)
}

/// BER of MRC combining the direct link with the best of `n_r` relay links,
/// all relays having decoded correctly:
/// `(1/π) ∫₀^{π/2} M_sd(1/sin²θ)·M_best(1/sin²θ) dθ`.
pub fn p_coop(gamma_sd_bar: f64, gamma_rd_bar: f64, n_r: usize) -> Result<f64> {
    check_positive("gamma_sd_bar", gamma_sd_bar)?;
    check_positive("gamma_rd_bar", gamma_rd_bar)?;
    if n_r == 0 {
        return Err(Error::param(
            "n_r",
            0.0,
            "cooperative branch needs at least one admitted relay",
        ));
    }
    let integrand = |theta: f64| {
        let s = theta.sin().powi(2).recip();
        best_of_product(n_r, gamma_rd_bar * s) / (1.0 + gamma_sd_bar * s)
    };
    let v = refine_gauss_legendre(integrand, 0.0, FRAC_PI_2).map_err(|e| e.in_term("P_coop"))?;
    clamp_probability("P_coop", FRAC_1_PI * v)
}

/// BPSK error probability at a relay given that its instantaneous SNR
/// exceeded `gamma_th`:
///
/// `Q(√(2γ_th)) − e^{γ_th/γ̄_sr} √(1/(1+1/γ̄_sr)) Q(√(2γ_th(1+1/γ̄_sr)))`.
///
/// Both terms carry a factor `e^{−γ_th}` once the Gaussian tails are
/// written as `Q(x) = e^{−x²/2}·Q̃(x)`; evaluating in that form keeps the
/// expression finite when `γ_th/γ̄_sr` is large enough for the exponential
/// to overflow.
pub fn p_sr(gamma_th: f64, gamma_sr_bar: f64) -> Result<f64> {
    check_non_negative("gamma_th", gamma_th)?;
    check_positive("gamma_sr_bar", gamma_sr_bar)?;
    let c = 1.0 + gamma_sr_bar.recip();
    let scaled =
        q_scaled((2.0 * gamma_th).sqrt()) - q_scaled((2.0 * gamma_th * c).sqrt()) / c.sqrt();
    let value = (-gamma_th).exp() * scaled;
    // Averaging Q(√(2γ)) over γ > γ_th cannot exceed Q(√(2γ_th)) ≤ 1/2.
    if value > 0.5 + super::CLAMP_SLACK {
        return Err(Error::ModelInconsistency {
            term: "P_SR",
            value,
        });
    }
    clamp_probability("P_SR", value)
}

/// `P_SR·P_prop + (1 − P_SR)·P_coop`.
pub fn p_div(p_sr: f64, p_prop: f64, p_coop: f64) -> Result<f64> {
    for (name, v) in [("p_sr", p_sr), ("p_prop", p_prop), ("p_coop", p_coop)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::param(name, v, "must be a probability"));
        }
    }
    clamp_probability("P_div", p_sr * p_prop + (1.0 - p_sr) * p_coop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::reference::{mrc_two_branch, rayleigh_bpsk};
    use crate::special::q_function;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Exp1;

    #[test]
    fn p_dec_examples() {
        assert_eq!(p_dec(0.0, 3.0).unwrap(), 1.0);
        assert!((p_dec(2.5, 2.5).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        let v = p_dec(10f64.powf(0.5), 10f64.powf(1.2)).unwrap();
        assert!((v - 0.8191).abs() < 5e-5, "v = {v}");
        assert!(p_dec(-1.0, 1.0).is_err());
        assert!(p_dec(1.0, 0.0).is_err());
    }

    #[test]
    fn p_dec_matches_exponential_draws() {
        let (th, mean) = (10f64.powf(0.5), 10f64.powf(1.2));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let pass = (0..n)
            .filter(|_| mean * rng.sample::<f64, _>(Exp1) > th)
            .count() as f64
            / n as f64;
        let p = p_dec(th, mean).unwrap();
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((pass - p).abs() < 5.0 * sigma);
    }

    #[test]
    fn p_num_relays_examples() {
        assert_eq!(p_num_relays(4, 0, 1.0).unwrap(), 0.0);
        assert_eq!(p_num_relays(4, 4, 1.0).unwrap(), 1.0);
        assert_eq!(p_num_relays(4, 2, 0.5).unwrap(), 0.375);
        assert_eq!(p_num_relays(0, 0, 0.3).unwrap(), 1.0);
        assert!(matches!(
            p_num_relays(4, 5, 0.5),
            Err(Error::OutOfRange { index: 5, max: 4 })
        ));
        assert!(p_num_relays(4, 1, 1.5).is_err());
    }

    #[test]
    fn p_num_relays_sums_to_one_exhaustive() {
        for m in 0..=16 {
            for step in 0..=100 {
                let p = step as f64 / 100.0;
                let s: f64 = (0..=m).map(|i| p_num_relays(m, i, p).unwrap()).sum();
                assert!((s - 1.0).abs() < 1e-13, "m = {m}, p = {p}, sum = {s}");
            }
        }
    }

    #[test]
    fn p_non_coop_examples() {
        let v = p_non_coop(1.0).unwrap();
        assert!((v - 0.146_447).abs() < 1e-6);
        assert!((v - rayleigh_bpsk(1.0)).abs() < 1e-12);
        let huge = p_non_coop(1e12).unwrap();
        assert!((huge - 2.5e-13).abs() < 1e-17, "huge = {huge:e}");
        assert!(p_non_coop(0.0).is_err());
    }

    #[test]
    fn p_non_coop_matches_closed_form_on_log_grid() {
        // γ̄ from 1e-3 to 1e6, 20 points per decade.
        for i in 0..=180 {
            let g = 10f64.powf(-3.0 + i as f64 / 20.0);
            let q = p_non_coop(g).unwrap();
            assert!((q - rayleigh_bpsk(g)).abs() <= 1e-10, "γ̄ = {g}");
        }
    }

    #[test]
    fn p_coop_examples() {
        assert!(p_coop(1e12, 1.0, 1).unwrap() < 1e-6);
        let one = p_coop(1.0, 1.0, 1).unwrap();
        assert!(
            (one - mrc_two_branch(1.0, 1.0)).abs() < 1e-12,
            "one = {one}"
        );
        let two = p_coop(1.0, 1.0, 2).unwrap();
        assert!(two < one);
        assert!(p_coop(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn p_coop_single_relay_matches_partial_fractions() {
        for &(a, b) in &[(0.5, 1.0), (3.0, 0.2), (100.0, 250.0), (1e-2, 1e3)] {
            let q = p_coop(a, b, 1).unwrap();
            assert!((q - mrc_two_branch(a, b)).abs() < 1e-11, "({a}, {b})");
        }
    }

    #[test]
    fn p_coop_monotone() {
        let grid = [0.1, 0.5, 1.0, 4.0, 30.0, 200.0];
        for &a in &grid {
            for &b in &grid {
                let mut prev = 0.5;
                for n in 1..=8 {
                    let v = p_coop(a, b, n).unwrap();
                    assert!(v > 0.0 && v < 0.5);
                    assert!(v <= prev);
                    prev = v;
                }
            }
        }
        for n in [1, 3] {
            for w in grid.windows(2) {
                assert!(p_coop(w[1], 1.0, n).unwrap() <= p_coop(w[0], 1.0, n).unwrap());
                assert!(p_coop(1.0, w[1], n).unwrap() <= p_coop(1.0, w[0], n).unwrap());
            }
        }
    }

    #[test]
    fn p_sr_examples() {
        assert!(p_sr(100.0, 10.0).unwrap() < 1e-12);
        let free = p_sr(0.0, 1.0).unwrap();
        assert!((free - rayleigh_bpsk(1.0)).abs() < 1e-15);
        // Thresholds far past overflow of e^{γ_th/γ̄}.
        assert_eq!(p_sr(1e12, 1.0).unwrap(), 0.0);
        assert!(p_sr(3.0, 1e-3).unwrap() >= 0.0);
    }

    #[test]
    fn p_sr_equals_direct_reading_where_finite() {
        for &(th, g) in &[(0.5f64, 2.0f64), (3.1623, 10.0), (10.0, 100.0), (1.0, 0.3)] {
            let c = 1.0 + 1.0 / g;
            let direct = q_function((2.0 * th).sqrt())
                - (th / g).exp() * (1.0 / c).sqrt() * q_function((2.0 * th * c).sqrt());
            let v = p_sr(th, g).unwrap();
            assert!((v - direct).abs() <= 1e-14, "({th}, {g}): {v} vs {direct}");
        }
    }

    /// Conditional-error oracle: average Q(√(2γ)) over exponential γ > γ_th.
    fn conditional_error_oracle(th: f64, mean: f64, kept: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut sum, mut sum2, mut n) = (0.0, 0.0, 0usize);
        while n < kept {
            let g = mean * rng.sample::<f64, _>(Exp1);
            if g > th {
                let q = q_function((2.0 * g).sqrt());
                sum += q;
                sum2 += q * q;
                n += 1;
            }
        }
        let m = sum / n as f64;
        let var = sum2 / n as f64 - m * m;
        (m, (var / n as f64).sqrt())
    }

    #[test]
    fn p_sr_matches_conditional_oracle() {
        let (th, g) = (3.1623f64, 10.0f64);
        let (mean, sigma) = conditional_error_oracle(th, g, 2_000_000, 3);
        let v = p_sr(th, g).unwrap();
        assert!((v - mean).abs() < 4.0 * sigma, "{v} vs {mean} ± {sigma}");
    }

    #[test]
    fn radical_over_tail_reading_disagrees_with_oracle() {
        // Placing the second Q(·) under the square root gives a value that
        // is far from the conditional error (it is even negative here).
        let (th, g) = (3.1623f64, 10.0f64);
        let c = 1.0 + 1.0 / g;
        let alt = q_function((2.0 * th).sqrt())
            - (th / g).exp() * ((1.0 / c) * q_function((2.0 * th * c).sqrt())).sqrt();
        let (mean, sigma) = conditional_error_oracle(th, g, 200_000, 5);
        assert!((alt - mean).abs() > 100.0 * sigma);
    }

    #[test]
    fn p_div_examples() {
        assert_eq!(p_div(0.0, 0.7, 0.01).unwrap(), 0.01);
        assert_eq!(p_div(1.0, 0.3, 0.9).unwrap(), 0.3);
        assert!((p_div(0.1, 0.3, 0.01).unwrap() - 0.039).abs() < 1e-15);
        assert!(p_div(-0.1, 0.3, 0.01).is_err());
    }

    proptest! {
        #[test]
        fn p_sr_bounded_and_decreasing(g in 1e-2f64..1e4, th in 0.0f64..50.0, dth in 1e-3f64..5.0) {
            let a = p_sr(th, g).unwrap();
            let b = p_sr(th + dth, g).unwrap();
            prop_assert!((0.0..=0.5).contains(&a));
            prop_assert!(b <= a + 1e-15);
        }

        #[test]
        fn p_div_is_convex_combination(s in 0.0f64..=1.0, p in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            let d = p_div(s, p, c).unwrap();
            prop_assert!(d >= p.min(c) - 1e-15 && d <= p.max(c) + 1e-15);
        }
    }
}
