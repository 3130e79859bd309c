//! Diversity order from the high-SNR slope of a BER curve.

use crate::error::{Error, Result};

/// Least-squares line through `(snr_db/10, log10 ber)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    /// Decades of BER per decade of SNR; negative for a falling curve.
    pub slope: f64,
    pub intercept: f64,
}

impl SlopeFit {
    /// Estimated diversity order, `-slope`.
    pub fn diversity(&self) -> f64 {
        -self.slope
    }
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::InvalidSimulation(
            "slope fit needs at least two points".into(),
        ));
    }
    let mut xy = Vec::with_capacity(points.len());
    for &(snr_db, ber) in points {
        if !(ber > 0.0 && ber.is_finite()) {
            return Err(Error::param(
                "ber",
                ber,
                "slope fit needs positive BER values",
            ));
        }
        xy.push((snr_db / 10.0, ber.log10()));
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidSimulation(
            "slope fit needs distinct SNR values".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
    })
}
