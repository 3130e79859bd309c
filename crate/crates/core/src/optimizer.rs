//! Threshold optimization: the selection threshold that minimizes the
//! analytic end-to-end BER at a given total SNR.

use rayon::prelude::*;

use crate::analytic::{AnalyticChain, AnalyticModel, SystemConfig};
use crate::error::{Error, Result};
use crate::units::db_to_linear;

pub const GRID_START_DB: f64 = -20.0;
pub const GRID_STOP_DB: f64 = 20.0;
pub const GRID_STEP_DB: f64 = 0.5;
/// Width of the final golden-section bracket.
pub const REFINE_WIDTH_DB: f64 = 0.01;

/// Reference optimal thresholds for the default four-relay scenario, as
/// `(total_snr_db, gamma_opt_db)`.
pub const REFERENCE_GAMMA_OPT_DB: [(f64, f64); 9] = [
    (0.0, -7.9),
    (3.0, -3.9),
    (6.0, -0.7),
    (9.0, 1.9),
    (12.0, 4.0),
    (15.0, 5.7),
    (18.0, 7.25),
    (21.0, 8.4),
    (24.0, 9.5),
];

/// Reference threshold at `total_snr_db`, if tabulated.
pub fn reference_gamma_opt_db(total_snr_db: f64) -> Option<f64> {
    REFERENCE_GAMMA_OPT_DB
        .iter()
        .find(|(s, _)| (s - total_snr_db).abs() < 1e-9)
        .map(|&(_, g)| g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPoint {
    pub total_snr_db: f64,
    pub gamma_opt_db: f64,
    pub ber_at_opt: f64,
    /// The coarse grid showed more than one local minimum; the point is the
    /// global one.
    pub multimodal: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThresholdCurve {
    pub points: Vec<ThresholdPoint>,
}

impl ThresholdCurve {
    /// Whether the optimal threshold never decreases with SNR.
    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].gamma_opt_db >= w[0].gamma_opt_db)
    }

    pub fn any_multimodal(&self) -> bool {
        self.points.iter().any(|p| p.multimodal)
    }
}

/// The objective `γ_th (dB) ↦ BER` at one total SNR.
pub struct Objective {
    chain: AnalyticChain,
}

impl Objective {
    pub fn new(total_snr_db: f64, template: &SystemConfig) -> Result<Self> {
        let config = template.with_total_snr_db(total_snr_db)?;
        Ok(Self {
            chain: AnalyticChain::new(&config, AnalyticModel::default())?,
        })
    }

    pub fn ber_at_db(&self, threshold_db: f64) -> Result<f64> {
        self.chain.ber(db_to_linear(threshold_db))
    }
}

fn coarse_grid() -> Vec<f64> {
    let n = ((GRID_STOP_DB - GRID_START_DB) / GRID_STEP_DB).round() as usize;
    (0..=n)
        .map(|i| GRID_START_DB + GRID_STEP_DB * i as f64)
        .collect()
}

/// Interior strict local minima of a sampled curve, ignoring differences at
/// rounding level.
fn count_local_minima(values: &[f64]) -> usize {
    let below = |a: f64, b: f64| a < b * (1.0 - 1e-12);
    // Collapse flat runs so plateaus count once.
    let mut runs: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if runs
            .last()
            .is_none_or(|&last| below(v, last) || below(last, v))
        {
            runs.push(v);
        }
    }
    (1..runs.len().saturating_sub(1))
        .filter(|&i| below(runs[i], runs[i - 1]) && below(runs[i], runs[i + 1]))
        .count()
}

/// Optimal threshold at one total SNR: coarse scan, then golden-section
/// refinement inside the bracket around the best grid point.
pub fn find_gamma_opt(total_snr_db: f64, template: &SystemConfig) -> Result<ThresholdPoint> {
    if !total_snr_db.is_finite() {
        return Err(Error::param("total_snr_db", total_snr_db, "must be finite"));
    }
    let objective = Objective::new(total_snr_db, template)?;
    let grid = coarse_grid();
    let values = grid
        .iter()
        .map(|&g| objective.ber_at_db(g))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..grid.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("grid is nonempty");
    let multimodal = count_local_minima(&values) > 1;

    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = objective.ber_at_db(x1)?;
    let mut f2 = objective.ber_at_db(x2)?;
    while hi - lo > REFINE_WIDTH_DB {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective.ber_at_db(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective.ber_at_db(x2)?;
        }
    }
    let (mut gamma_opt_db, mut ber_at_opt) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if values[best] < ber_at_opt {
        gamma_opt_db = grid[best];
        ber_at_opt = values[best];
    }
    Ok(ThresholdPoint {
        total_snr_db,
        gamma_opt_db,
        ber_at_opt,
        multimodal,
    })
}

/// [`find_gamma_opt`] at each SNR, evaluated in parallel.
pub fn sweep(template: &SystemConfig, snr_list: &[f64]) -> Result<ThresholdCurve> {
    if snr_list.is_empty() {
        return Err(Error::InvalidSimulation("empty SNR list".into()));
    }
    if snr_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSimulation(
            "SNR list must be strictly increasing".into(),
        ));
    }
    let points = snr_list
        .par_iter()
        .map(|&s| find_gamma_opt(s, template))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve { points })
}
