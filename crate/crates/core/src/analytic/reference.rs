//! Textbook closed forms for BPSK over Rayleigh fading. They share no code
//! with the MGF integrals and serve as oracles for them and for the
//! simulator.

/// Average BPSK BER over one Rayleigh branch with mean SNR `gamma_bar`.
pub fn rayleigh_bpsk(gamma_bar: f64) -> f64 {
    0.5 * (1.0 - (gamma_bar / (1.0 + gamma_bar)).sqrt())
}

/// Average BPSK BER with two-branch MRC over independent Rayleigh branches.
///
/// Distinct means use the partial-fraction split of the MGF product; equal
/// means use `((1−μ)/2)²(2+μ)` with `μ = √(γ̄/(1+γ̄))`.
pub fn mrc_two_branch(gamma_a: f64, gamma_b: f64) -> f64 {
    if (gamma_a - gamma_b).abs() <= 1e-6 * gamma_a.max(gamma_b) {
        let g = 0.5 * (gamma_a + gamma_b);
        let mu = (g / (1.0 + g)).sqrt();
        let h = 0.5 * (1.0 - mu);
        h * h * (2.0 + mu)
    } else {
        (gamma_a * rayleigh_bpsk(gamma_a) - gamma_b * rayleigh_bpsk(gamma_b)) / (gamma_a - gamma_b)
    }
}
