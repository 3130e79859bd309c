use super::propagation::{p_prop_gaussian_oracle, p_prop_series, PropagationSeries};
use super::terms::{p_coop, p_dec, p_div, p_non_coop, p_num_relays, p_sr};
use super::{clamp_probability, BerEstimate, LinkBudget, SystemConfig};
use crate::error::Result;

/// How the flipped-relay error probability is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationModel {
    /// Noise-free approximation `P(γ_sd < γ_best)` by a finite series.
    Series(PropagationSeries),
    /// Exact Gaussian decision statistic, by double quadrature. Slow; meant
    /// for diagnostics.
    Gaussian,
}

impl Default for PropagationModel {
    fn default() -> Self {
        Self::Series(PropagationSeries::BestOfSelected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AnalyticModel {
    pub propagation: PropagationModel,
    /// Admitted relays never forward a wrong symbol.
    pub perfect_decoding: bool,
}

/// Contribution of one selection-set size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetTerm {
    pub n_r: usize,
    /// Probability that exactly `n_r` relays are admitted.
    pub weight: f64,
    pub p_coop: f64,
    pub p_prop: f64,
    pub p_div: f64,
}

/// Every intermediate of one end-to-end evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakdown {
    pub p_dec: f64,
    pub p_sr: f64,
    pub p_non_coop: f64,
    pub sets: Vec<SetTerm>,
    pub total: f64,
}

/// The threshold-independent part of the BER for one link budget.
///
/// `P_coop` and `P_prop` depend only on the mean SNRs and the set size, so
/// they are computed once here; [`AnalyticChain::ber`] then costs only the
/// binomial weights and the relay error term for each threshold.
#[derive(Debug, Clone)]
pub struct AnalyticChain {
    m_relays: usize,
    budget: LinkBudget,
    model: AnalyticModel,
    p_non_coop: f64,
    p_coop: Vec<f64>,
    p_prop: Vec<f64>,
}

impl AnalyticChain {
    pub fn new(config: &SystemConfig, model: AnalyticModel) -> Result<Self> {
        config.validate()?;
        let budget = config.link_budget()?;
        let m = config.m_relays;
        let pnc = p_non_coop(budget.gamma_sd_bar)?;
        let p_coop = (1..=m)
            .map(|n| p_coop(budget.gamma_sd_bar, budget.gamma_rd_bar, n))
            .collect::<Result<Vec<_>>>()?;
        let p_prop = if model.perfect_decoding {
            vec![0.0; m]
        } else {
            (1..=m)
                .map(|n| match model.propagation {
                    PropagationModel::Series(series) => {
                        p_prop_series(series, m, n, budget.gamma_sd_bar, budget.gamma_rd_bar)
                    }
                    PropagationModel::Gaussian => {
                        p_prop_gaussian_oracle(n, budget.gamma_sd_bar, budget.gamma_rd_bar)
                    }
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Self {
            m_relays: m,
            budget,
            model,
            p_non_coop: pnc,
            p_coop,
            p_prop,
        })
    }

    pub fn link_budget(&self) -> &LinkBudget {
        &self.budget
    }

    /// End-to-end BER at selection threshold `gamma_th` (linear).
    pub fn ber(&self, gamma_th: f64) -> Result<f64> {
        self.breakdown(gamma_th).map(|b| b.total)
    }

    pub fn breakdown(&self, gamma_th: f64) -> Result<Breakdown> {
        let pd = p_dec(gamma_th, self.budget.gamma_sr_bar)?;
        let psr = if self.model.perfect_decoding {
            0.0
        } else {
            p_sr(gamma_th, self.budget.gamma_sr_bar)?
        };
        let m = self.m_relays;
        let mut total = p_num_relays(m, 0, pd)? * self.p_non_coop;
        let mut sets = Vec::with_capacity(m);
        for n_r in 1..=m {
            let weight = p_num_relays(m, n_r, pd)?;
            let p_coop = self.p_coop[n_r - 1];
            let p_prop = self.p_prop[n_r - 1];
            let div = p_div(psr, p_prop, p_coop)?;
            total += weight * div;
            sets.push(SetTerm {
                n_r,
                weight,
                p_coop,
                p_prop,
                p_div: div,
            });
        }
        Ok(Breakdown {
            p_dec: pd,
            p_sr: psr,
            p_non_coop: self.p_non_coop,
            sets,
            total: clamp_probability("P_e2e", total)?,
        })
    }
}

/// End-to-end BER of the configuration with the default model.
pub fn p_e2e(config: &SystemConfig) -> Result<BerEstimate> {
    let chain = AnalyticChain::new(config, AnalyticModel::default())?;
    chain.ber(config.gamma_th).map(BerEstimate::analytic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::reference::rayleigh_bpsk;
    use crate::analytic::EstimateKind;
    use crate::units::db_to_linear;

    fn fig2(m: usize, snr_db: f64) -> SystemConfig {
        SystemConfig::from_db(m, 5.0, snr_db, (1.0, 1.0), -3.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn no_relays_is_direct_link() {
        let mut c = fig2(0, 0.0);
        c.p_s = 1.0 / c.sigma2_sd; // γ̄_sd = 1
        let e = p_e2e(&c).unwrap();
        assert_eq!(e.kind, EstimateKind::Analytic);
        assert_eq!(e.trials, 0);
        assert_eq!(e.ci_halfwidth, 0.0);
        assert_eq!(e.value, p_non_coop(1.0).unwrap());
        assert!((e.value - 0.146_447).abs() < 1e-6);
    }

    #[test]
    fn huge_threshold_falls_back_to_direct_link() {
        let c = fig2(4, 12.0).with_threshold(1e12).unwrap();
        let e = p_e2e(&c).unwrap().value;
        let direct = rayleigh_bpsk(c.link_budget().unwrap().gamma_sd_bar);
        assert!((e - direct).abs() < 1e-12);
    }

    #[test]
    fn zero_threshold_collapses_to_all_relays_admitted() {
        let c = fig2(4, 9.0).with_threshold(0.0).unwrap();
        let lb = c.link_budget().unwrap();
        let e = p_e2e(&c).unwrap().value;
        let psr = p_sr(0.0, lb.gamma_sr_bar).unwrap();
        let all = p_div(
            psr,
            p_prop_series(
                PropagationSeries::BestOfSelected,
                4,
                4,
                lb.gamma_sd_bar,
                lb.gamma_rd_bar,
            )
            .unwrap(),
            p_coop(lb.gamma_sd_bar, lb.gamma_rd_bar, 4).unwrap(),
        )
        .unwrap();
        assert!((e - all).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_total_snr_at_reference_points() {
        let reference = [-7.9, -3.9, -0.7, 1.9, 4.0, 5.7, 7.25, 8.4, 9.5];
        let mut prev = 1.0;
        for (i, th) in reference.iter().enumerate() {
            let c = fig2(4, 3.0 * i as f64).with_threshold_db(*th).unwrap();
            let v = p_e2e(&c).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
        // And along the fixed-threshold sweep.
        let mut prev = 1.0;
        for i in 0..=8 {
            let v = p_e2e(&fig2(4, 3.0 * i as f64)).unwrap().value;
            assert!(v <= prev && v <= 0.5);
            prev = v;
        }
    }

    #[test]
    fn perfect_decoding_is_never_worse() {
        for m in 1..=5 {
            for snr in [0.0, 9.0, 18.0] {
                let c = fig2(m, snr);
                let ep = p_e2e(&c).unwrap().value;
                let pd = AnalyticChain::new(
                    &c,
                    AnalyticModel {
                        perfect_decoding: true,
                        ..Default::default()
                    },
                )
                .unwrap()
                .ber(c.gamma_th)
                .unwrap();
                assert!(pd <= ep);
            }
        }
    }

    #[test]
    fn breakdown_weights_sum_to_one() {
        let c = fig2(5, 6.0);
        let chain = AnalyticChain::new(&c, AnalyticModel::default()).unwrap();
        let b = chain.breakdown(db_to_linear(2.0)).unwrap();
        let w0 = (1.0 - b.p_dec).powi(5);
        let s: f64 = w0 + b.sets.iter().map(|t| t.weight).sum::<f64>();
        assert!((s - 1.0).abs() < 1e-14);
        assert_eq!(b.sets.len(), 5);
        assert!(b.total > 0.0 && b.total < 0.5);
    }

    #[test]
    fn gaussian_model_close_to_series_at_fig2_point() {
        let c = fig2(4, 12.0);
        let series = p_e2e(&c).unwrap().value;
        let gauss = AnalyticChain::new(
            &c,
            AnalyticModel {
                propagation: PropagationModel::Gaussian,
                perfect_decoding: false,
            },
        )
        .unwrap()
        .ber(c.gamma_th)
        .unwrap();
        assert!((series - gauss).abs() < 0.1 * series, "{series} vs {gauss}");
    }
}
