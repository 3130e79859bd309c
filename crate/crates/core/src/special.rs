//! Gaussian tail function.

/// Gaussian Q-function, `Q(x) = P(N(0,1) > x) = erfc(x/√2)/2`.
///
/// Results below the smallest normal `f64` are flushed to zero, so the far
/// tail (x ≳ 37.5) returns exactly `0.0`.
pub fn q_function(x: f64) -> f64 {
    let q = 0.5 * libm::erfc(x / std::f64::consts::SQRT_2);
    if q < f64::MIN_POSITIVE {
        0.0
    } else {
        q
    }
}

/// Scaled tail `Q(x)·exp(x²/2)`, finite for large `x` where `Q` underflows.
///
/// Direct evaluation below `x = 26`; above it the Laplace continued
/// fraction `Q(x) = φ(x) / (x + 1/(x + 2/(x + 3/(x + …))))`, evaluated
/// bottom-up, is accurate to rounding.
pub fn q_scaled(x: f64) -> f64 {
    const CROSSOVER: f64 = 26.0;
    if x < CROSSOVER {
        return 0.5 * libm::erfc(x / std::f64::consts::SQRT_2) * (0.5 * x * x).exp();
    }
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + k as f64 / tail;
    }
    1.0 / ((2.0 * std::f64::consts::PI).sqrt() * tail)
}
