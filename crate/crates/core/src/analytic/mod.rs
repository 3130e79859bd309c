//! Analytic end-to-end BER of threshold-based best-relay selection with
//! decode-and-forward relays that may forward wrong decisions.
//!
//! The total error probability is decomposed over the number `N_r` of
//! relays admitted to the selection set: with no admitted relay the
//! destination relies on the direct link alone; otherwise the best relay
//! either decoded correctly (two-branch MRC with the best-of-`N_r` relay
//! link) or forwarded a flipped symbol (error propagation).
//!
//! All inputs here are linear. Decibel handling lives in [`crate::units`]
//! and the `*_db` helpers on [`SystemConfig`].

mod e2e;
mod mgf;
mod propagation;
pub mod reference;
mod terms;

pub use e2e::{p_e2e, AnalyticChain, AnalyticModel, Breakdown, PropagationModel};
pub use mgf::{mgf_best_relay, mgf_best_relay_series, mgf_rayleigh};
pub use propagation::{p_prop_closed, p_prop_gaussian_oracle, p_prop_oracle, PropagationSeries};
pub use terms::{p_coop, p_dec, p_div, p_non_coop, p_num_relays, p_sr};

use crate::error::{Error, Result};
use crate::units::db_to_linear;

/// Largest relay count accepted; selection sets are stored as 64-bit masks.
pub const MAX_RELAYS: usize = 64;

/// Composed probabilities may leave `[0, 1]` by at most this much before it
/// counts as a formula error rather than rounding.
pub const CLAMP_SLACK: f64 = 1e-9;

pub(crate) fn clamp_probability(term: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if (-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&value) {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(Error::ModelInconsistency { term, value })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::param(name, value, "must be positive and finite"))
    }
}

fn check_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::param(name, value, "must be non-negative and finite"))
    }
}

/// Mean per-link SNRs (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Source → destination.
    pub gamma_sd_bar: f64,
    /// Source → relay (identical for every relay).
    pub gamma_sr_bar: f64,
    /// Relay → destination (identical for every relay).
    pub gamma_rd_bar: f64,
}

impl LinkBudget {
    pub fn new(gamma_sd_bar: f64, gamma_sr_bar: f64, gamma_rd_bar: f64) -> Result<Self> {
        Ok(Self {
            gamma_sd_bar: check_positive("gamma_sd_bar", gamma_sd_bar)?,
            gamma_sr_bar: check_positive("gamma_sr_bar", gamma_sr_bar)?,
            gamma_rd_bar: check_positive("gamma_rd_bar", gamma_rd_bar)?,
        })
    }

    /// `γ̄ = P·σ²/N₀` per link; the source power drives the source links and
    /// the relay power the relay → destination link.
    pub fn from_physical(
        p_s: f64,
        p_r: f64,
        sigma2_sd: f64,
        sigma2_sr: f64,
        sigma2_rd: f64,
        n0: f64,
    ) -> Result<Self> {
        Self::new(
            p_s * sigma2_sd / n0,
            p_s * sigma2_sr / n0,
            p_r * sigma2_rd / n0,
        )
    }
}

/// One operating point of the cooperative link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Number of candidate relays `M`.
    pub m_relays: usize,
    /// Selection threshold on the instantaneous source → relay SNR (linear).
    pub gamma_th: f64,
    pub p_s: f64,
    pub p_r: f64,
    pub n0: f64,
    pub sigma2_sd: f64,
    pub sigma2_sr: f64,
    pub sigma2_rd: f64,
}

impl SystemConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m_relays: usize,
        gamma_th: f64,
        p_s: f64,
        p_r: f64,
        n0: f64,
        sigma2_sd: f64,
        sigma2_sr: f64,
        sigma2_rd: f64,
    ) -> Result<Self> {
        let config = Self {
            m_relays,
            gamma_th,
            p_s,
            p_r,
            n0,
            sigma2_sd,
            sigma2_sr,
            sigma2_rd,
        };
        config.validate()?;
        Ok(config)
    }

    /// Builds a configuration from the quantities usually quoted in dB.
    /// `N₀ = 1` and the powers are split `power_split.0 : power_split.1`
    /// so that `(P_s + P_r)/N₀` equals the total SNR.
    pub fn from_db(
        m_relays: usize,
        threshold_db: f64,
        total_snr_db: f64,
        power_split: (f64, f64),
        sigma2_sd_db: f64,
        sigma2_sr_db: f64,
        sigma2_rd_db: f64,
    ) -> Result<Self> {
        let (ws, wr) = power_split;
        check_positive("power_split source share", ws)?;
        check_positive("power_split relay share", wr)?;
        let total = db_to_linear(total_snr_db);
        Self::new(
            m_relays,
            db_to_linear(threshold_db),
            total * ws / (ws + wr),
            total * wr / (ws + wr),
            1.0,
            db_to_linear(sigma2_sd_db),
            db_to_linear(sigma2_sr_db),
            db_to_linear(sigma2_rd_db),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_relays > MAX_RELAYS {
            return Err(Error::param(
                "m_relays",
                self.m_relays as f64,
                "at most 64 relays are supported",
            ));
        }
        check_non_negative("gamma_th", self.gamma_th)?;
        check_positive("p_s", self.p_s)?;
        check_positive("p_r", self.p_r)?;
        check_positive("n0", self.n0)?;
        check_positive("sigma2_sd", self.sigma2_sd)?;
        check_positive("sigma2_sr", self.sigma2_sr)?;
        check_positive("sigma2_rd", self.sigma2_rd)?;
        check_positive("total SNR", self.total_snr())?;
        self.link_budget().map(|_| ())
    }

    /// `(P_s + P_r)/N₀`, linear.
    pub fn total_snr(&self) -> f64 {
        (self.p_s + self.p_r) / self.n0
    }

    pub fn link_budget(&self) -> Result<LinkBudget> {
        LinkBudget::from_physical(
            self.p_s,
            self.p_r,
            self.sigma2_sd,
            self.sigma2_sr,
            self.sigma2_rd,
            self.n0,
        )
    }

    /// Same configuration at another total SNR, keeping `N₀` and the power
    /// ratio.
    pub fn with_total_snr_db(&self, total_snr_db: f64) -> Result<Self> {
        let scale = db_to_linear(total_snr_db) / self.total_snr();
        Self::new(
            self.m_relays,
            self.gamma_th,
            self.p_s * scale,
            self.p_r * scale,
            self.n0,
            self.sigma2_sd,
            self.sigma2_sr,
            self.sigma2_rd,
        )
    }

    pub fn with_threshold(&self, gamma_th: f64) -> Result<Self> {
        let mut next = *self;
        next.gamma_th = gamma_th;
        next.validate()?;
        Ok(next)
    }

    pub fn with_threshold_db(&self, threshold_db: f64) -> Result<Self> {
        self.with_threshold(db_to_linear(threshold_db))
    }

    pub fn with_relays(&self, m_relays: usize) -> Result<Self> {
        let mut next = *self;
        next.m_relays = m_relays;
        next.validate()?;
        Ok(next)
    }
}

/// Where a BER value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateKind {
    Analytic,
    Simulated,
    PerfectDecodingSimulated,
}

/// A BER value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    /// Number of simulated trials; 0 for analytic values.
    pub trials: u64,
    /// 95 % confidence half-width; 0 for analytic values.
    pub ci_halfwidth: f64,
}

impl BerEstimate {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            kind: EstimateKind::Analytic,
            trials: 0,
            ci_halfwidth: 0.0,
        }
    }

    /// Standard deviation implied by the 95 % half-width.
    pub fn sigma(&self) -> f64 {
        self.ci_halfwidth / 1.96
    }
}
