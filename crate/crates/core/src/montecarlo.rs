//! Link-level Monte Carlo simulation of the two-phase protocol.
//!
//! Every trial sends `x = +1` over independently drawn Rayleigh channels:
//!
//! 1. the source broadcasts; each relay measures `γ_sr,i = P_s|h_sr,i|²/N₀`
//!    and joins the selection set when it exceeds the threshold;
//! 2. the admitted relay with the strongest relay → destination channel
//!    coherently decodes its copy, re-modulates the hard decision and
//!    forwards it;
//! 3. the destination MRC-combines both phases and decides on the sign
//!    (a zero statistic decides `+1`).
//!
//! With an empty selection set the destination decides on the direct
//! observation alone.
//!
//! Trials are split into fixed-size chunks. Chunk `k` draws from the ChaCha8
//! stream `k` of the master seed and reports integer counts, so results are
//! bit-identical for any degree of parallelism.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::analytic::{p_dec, BerEstimate, EstimateKind, SystemConfig};
use crate::error::{Error, Result};

/// Default number of trials per RNG stream.
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// Trials are aborted by [`measure_conditional_psr`] when fewer than this
/// fraction of source → relay draws clear the threshold.
pub const MIN_ACCEPTANCE: f64 = 1e-6;
const ACCEPTANCE_PROBE: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodingMode {
    /// The selected relay decodes its noisy observation and may forward a
    /// wrong symbol.
    ErrorPropagation,
    /// The selected relay always forwards the transmitted symbol.
    PerfectDecoding,
}

/// Indices of the relays admitted by the threshold test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct RelaySet(u64);

impl RelaySet {
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(|&i| self.contains(i))
    }
}

/// Fading coefficients of one trial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelDraw {
    pub h_sd: Complex64,
    pub h_sr: Vec<Complex64>,
    pub h_rd: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub selection_set: RelaySet,
    pub selected_relay: Option<usize>,
    /// `None` when no relay was selected.
    pub relay_bit_correct: Option<bool>,
    pub destination_bit_correct: bool,
}

/// Importance sampling of the fading draws.
///
/// The direct link and the relay → destination links of admitted relays are
/// drawn with their mean SNR lowered to `target_mean_snr` (links already
/// weaker are left alone). Each relay's admission is drawn with probability
/// `admit_probability` whenever the true admission probability is larger,
/// the SNR then following its true conditional law. Every trial carries the
/// likelihood ratio of the true to the sampling density.
///
/// Only valid with [`DecodingMode::PerfectDecoding`]: under error
/// propagation, errors occur on strong relay links and the weights of the
/// lowered-mean draws have unbounded variance there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedFading {
    pub target_mean_snr: f64,
    pub admit_probability: f64,
}

impl Default for TiltedFading {
    fn default() -> Self {
        Self {
            target_mean_snr: 1.0,
            admit_probability: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Sampling {
    /// Draw fading from its true distribution and count errors.
    #[default]
    Direct,
    Tilted(TiltedFading),
}

/// Parameters of one simulated operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRun {
    pub config: SystemConfig,
    pub seed: u64,
    pub n_trials: u64,
    pub mode: DecodingMode,
    pub chunk_size: u64,
    pub sampling: Sampling,
}

impl SimRun {
    pub fn new(config: SystemConfig, seed: u64, n_trials: u64, mode: DecodingMode) -> Self {
        Self {
            config,
            seed,
            n_trials,
            mode,
            chunk_size: DEFAULT_CHUNK_SIZE,
            sampling: Sampling::Direct,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.n_trials == 0 {
            return Err(Error::InvalidSimulation(
                "n_trials must be at least 1".into(),
            ));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidSimulation(
                "chunk_size must be at least 1".into(),
            ));
        }
        if let Sampling::Tilted(t) = self.sampling {
            if self.mode != DecodingMode::PerfectDecoding {
                return Err(Error::InvalidSimulation(
                    "tilted fading requires perfect-decoding mode".into(),
                ));
            }
            if !(t.target_mean_snr > 0.0 && t.target_mean_snr.is_finite()) {
                return Err(Error::InvalidSimulation(
                    "tilt target SNR must be positive".into(),
                ));
            }
            if !(t.admit_probability > 0.0 && t.admit_probability < 1.0) {
                return Err(Error::InvalidSimulation(
                    "tilted admission probability must lie in (0, 1)".into(),
                ));
            }
        }
        Ok(())
    }

    fn n_chunks(&self) -> u64 {
        self.n_trials.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, chunk: u64) -> u64 {
        let start = chunk * self.chunk_size;
        self.chunk_size.min(self.n_trials - start)
    }
}

/// The RNG used for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[inline]
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

#[inline]
fn decide(statistic: f64) -> f64 {
    if statistic >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Lowered-mean exponential draw: returns the coefficient and the log of the
/// likelihood ratio of `|h|²`.
#[inline]
fn tilted_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64, scale: f64) -> (Complex64, f64) {
    let h = complex_gaussian(rng, variance * scale);
    let x = h.norm_sqr();
    (h, scale.ln() + x * (1.0 / scale - 1.0) / variance)
}

#[derive(Debug, Clone, Copy)]
struct TiltPlan {
    sd_scale: f64,
    rd_scale: f64,
    /// Sampling admission probability, when it differs from the true one.
    admit: Option<f64>,
    p_dec: f64,
}

/// Per-trial engine: holds the scaled constants of one configuration and a
/// reusable channel buffer.
#[derive(Debug, Clone)]
pub struct LinkSimulator {
    m: usize,
    sqrt_ps: f64,
    sqrt_pr: f64,
    ps_over_n0: f64,
    pr_over_n0: f64,
    n0: f64,
    gamma_th: f64,
    sigma2_sd: f64,
    sigma2_sr: f64,
    sigma2_rd: f64,
    tilt: Option<TiltPlan>,
    draw: ChannelDraw,
}

impl LinkSimulator {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        config.validate()?;
        let m = config.m_relays;
        Ok(Self {
            m,
            sqrt_ps: config.p_s.sqrt(),
            sqrt_pr: config.p_r.sqrt(),
            ps_over_n0: config.p_s / config.n0,
            pr_over_n0: config.p_r / config.n0,
            n0: config.n0,
            gamma_th: config.gamma_th,
            sigma2_sd: config.sigma2_sd,
            sigma2_sr: config.sigma2_sr,
            sigma2_rd: config.sigma2_rd,
            tilt: None,
            draw: ChannelDraw {
                h_sd: Complex64::default(),
                h_sr: vec![Complex64::default(); m],
                h_rd: vec![Complex64::default(); m],
            },
        })
    }

    fn with_tilt(config: &SystemConfig, tilt: TiltedFading) -> Result<Self> {
        let mut sim = Self::new(config)?;
        let lb = config.link_budget()?;
        let pd = p_dec(config.gamma_th, lb.gamma_sr_bar)?;
        sim.tilt = Some(TiltPlan {
            sd_scale: (tilt.target_mean_snr / lb.gamma_sd_bar).min(1.0),
            rd_scale: (tilt.target_mean_snr / lb.gamma_rd_bar).min(1.0),
            admit: (pd > tilt.admit_probability && pd < 1.0).then_some(tilt.admit_probability),
            p_dec: pd,
        });
        Ok(sim)
    }

    /// Channels of the most recent trial.
    pub fn channel(&self) -> &ChannelDraw {
        &self.draw
    }

    /// Instantaneous SNRs `(γ_sd, γ_sr[i], γ_rd[i])` of the most recent trial.
    pub fn snrs(&self) -> (f64, Vec<f64>, Vec<f64>) {
        (
            self.ps_over_n0 * self.draw.h_sd.norm_sqr(),
            self.draw
                .h_sr
                .iter()
                .map(|h| self.ps_over_n0 * h.norm_sqr())
                .collect(),
            self.draw
                .h_rd
                .iter()
                .map(|h| self.pr_over_n0 * h.norm_sqr())
                .collect(),
        )
    }

    pub fn run_trial<R: Rng + ?Sized>(&mut self, mode: DecodingMode, rng: &mut R) -> TrialOutcome {
        self.run_weighted(mode, rng).0
    }

    /// Runs one trial and returns its outcome with the importance weight
    /// (exactly 1 without tilting).
    fn run_weighted<R: Rng + ?Sized>(
        &mut self,
        mode: DecodingMode,
        rng: &mut R,
    ) -> (TrialOutcome, f64) {
        let mut log_w = 0.0;
        let tilt = self.tilt;

        // Phase 1 channels.
        self.draw.h_sd = match tilt {
            Some(t) => {
                let (h, lw) = tilted_gaussian(rng, self.sigma2_sd, t.sd_scale);
                log_w += lw;
                h
            }
            None => complex_gaussian(rng, self.sigma2_sd),
        };
        let mut set = RelaySet::default();
        for i in 0..self.m {
            let h = match tilt.and_then(|t| t.admit.map(|q| (q, t.p_dec))) {
                Some((q, pd)) => {
                    let admitted = rng.random::<f64>() < q;
                    let mean = self.ps_over_n0 * self.sigma2_sr;
                    let gamma = if admitted {
                        log_w += (pd / q).ln();
                        self.gamma_th + mean * rng.sample::<f64, _>(Exp1)
                    } else {
                        log_w += ((1.0 - pd) / (1.0 - q)).ln();
                        let u: f64 = rng.random();
                        -mean * (u * (-self.gamma_th / mean).exp_m1()).ln_1p()
                    };
                    let phase = std::f64::consts::TAU * rng.random::<f64>();
                    Complex64::from_polar((gamma / self.ps_over_n0).sqrt(), phase)
                }
                None => complex_gaussian(rng, self.sigma2_sr),
            };
            self.draw.h_sr[i] = h;
            if self.ps_over_n0 * h.norm_sqr() > self.gamma_th {
                set.insert(i);
            }
        }
        let mut selected: Option<usize> = None;
        let mut best = f64::NEG_INFINITY;
        for i in 0..self.m {
            let h = match tilt {
                Some(t) if set.contains(i) => {
                    let (h, lw) = tilted_gaussian(rng, self.sigma2_rd, t.rd_scale);
                    log_w += lw;
                    h
                }
                _ => complex_gaussian(rng, self.sigma2_rd),
            };
            self.draw.h_rd[i] = h;
            if set.contains(i) && h.norm_sqr() > best {
                best = h.norm_sqr();
                selected = Some(i);
            }
        }

        let h_sd = self.draw.h_sd;
        let y_sd = self.sqrt_ps * h_sd + complex_gaussian(rng, self.n0);
        let outcome = match selected {
            None => TrialOutcome {
                selection_set: set,
                selected_relay: None,
                relay_bit_correct: None,
                destination_bit_correct: decide((h_sd.conj() * y_sd).re) > 0.0,
            },
            Some(r) => {
                let h_sr = self.draw.h_sr[r];
                let y_sr = self.sqrt_ps * h_sr + complex_gaussian(rng, self.n0);
                let decoded = decide((h_sr.conj() * y_sr).re);
                let x_r = match mode {
                    DecodingMode::ErrorPropagation => decoded,
                    DecodingMode::PerfectDecoding => 1.0,
                };
                let h_rd = self.draw.h_rd[r];
                let y_rd = self.sqrt_pr * h_rd * x_r + complex_gaussian(rng, self.n0);
                let a1 = self.sqrt_ps * h_sd.conj() / self.n0;
                let a2 = self.sqrt_pr * h_rd.conj() / self.n0;
                TrialOutcome {
                    selection_set: set,
                    selected_relay: Some(r),
                    relay_bit_correct: Some(decoded > 0.0),
                    destination_bit_correct: decide((a1 * y_sd + a2 * y_rd).re) > 0.0,
                }
            }
        };
        (outcome, log_w.exp())
    }
}

/// One trial drawn from `rng`.
pub fn run_trial<R: Rng + ?Sized>(
    config: &SystemConfig,
    mode: DecodingMode,
    rng: &mut R,
) -> Result<TrialOutcome> {
    Ok(LinkSimulator::new(config)?.run_trial(mode, rng))
}

/// Merged counts of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTally {
    pub trials: u64,
    pub errors: u64,
    /// Σ weight over erroneous trials (equals `errors` without tilting).
    pub weight_sum: f64,
    pub weight_sq_sum: f64,
    /// `set_sizes[i]` counts trials whose selection set had `i` members.
    pub set_sizes: Vec<u64>,
    pub relay_errors: u64,
}

impl SimTally {
    fn new(m: usize) -> Self {
        Self {
            set_sizes: vec![0; m + 1],
            ..Default::default()
        }
    }

    fn merge(mut self, other: &SimTally) -> Self {
        self.trials += other.trials;
        self.errors += other.errors;
        self.weight_sum += other.weight_sum;
        self.weight_sq_sum += other.weight_sq_sum;
        self.relay_errors += other.relay_errors;
        for (a, b) in self.set_sizes.iter_mut().zip(&other.set_sizes) {
            *a += b;
        }
        self
    }
}

fn run_chunk(sim: &SimRun, chunk: u64) -> Result<SimTally> {
    let mut engine = match sim.sampling {
        Sampling::Direct => LinkSimulator::new(&sim.config)?,
        Sampling::Tilted(t) => LinkSimulator::with_tilt(&sim.config, t)?,
    };
    let mut rng = chunk_rng(sim.seed, chunk);
    let mut tally = SimTally::new(sim.config.m_relays);
    for _ in 0..sim.chunk_len(chunk) {
        let (outcome, w) = engine.run_weighted(sim.mode, &mut rng);
        tally.trials += 1;
        tally.set_sizes[outcome.selection_set.len()] += 1;
        if outcome.relay_bit_correct == Some(false) {
            tally.relay_errors += 1;
        }
        if !outcome.destination_bit_correct {
            tally.errors += 1;
            tally.weight_sum += w;
            tally.weight_sq_sum += w * w;
        }
    }
    Ok(tally)
}

/// Runs every chunk (in parallel on the current rayon pool) and merges the
/// counts in chunk order.
pub fn run_tally(sim: &SimRun) -> Result<SimTally> {
    sim.validate()?;
    let chunks = (0..sim.n_chunks())
        .into_par_iter()
        .map(|k| run_chunk(sim, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks
        .iter()
        .fold(SimTally::new(sim.config.m_relays), SimTally::merge))
}

/// Simulated BER with a 95 % normal-approximation confidence half-width.
pub fn run_sim(sim: &SimRun) -> Result<BerEstimate> {
    let tally = run_tally(sim)?;
    let n = tally.trials as f64;
    let kind = match sim.mode {
        DecodingMode::ErrorPropagation => EstimateKind::Simulated,
        DecodingMode::PerfectDecoding => EstimateKind::PerfectDecodingSimulated,
    };
    let (value, variance) = match sim.sampling {
        Sampling::Direct => {
            let p = tally.errors as f64 / n;
            (p, p * (1.0 - p))
        }
        Sampling::Tilted(_) => {
            let mean = tally.weight_sum / n;
            (mean, (tally.weight_sq_sum / n - mean * mean).max(0.0))
        }
    };
    Ok(BerEstimate {
        value,
        kind,
        trials: tally.trials,
        ci_halfwidth: 1.96 * (variance / n).sqrt(),
    })
}

/// One logged trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub outcome: TrialOutcome,
    pub gamma_sd: f64,
    pub gamma_sr: Vec<f64>,
    pub gamma_rd: Vec<f64>,
}

/// Replays the first `max_records` trials of `sim` (same streams as
/// [`run_sim`]) on the calling thread and returns them in order.
pub fn log_trials(sim: &SimRun, max_records: usize) -> Result<Vec<TrialRecord>> {
    sim.validate()?;
    if sim.sampling != Sampling::Direct {
        return Err(Error::InvalidSimulation(
            "trial logging supports direct sampling only".into(),
        ));
    }
    let mut engine = LinkSimulator::new(&sim.config)?;
    let limit = (max_records as u64).min(sim.n_trials) as usize;
    let mut records = Vec::with_capacity(limit);
    'chunks: for chunk in 0..sim.n_chunks() {
        let mut rng = chunk_rng(sim.seed, chunk);
        for _ in 0..sim.chunk_len(chunk) {
            if records.len() == limit {
                break 'chunks;
            }
            let outcome = engine.run_trial(sim.mode, &mut rng);
            let (gamma_sd, gamma_sr, gamma_rd) = engine.snrs();
            records.push(TrialRecord {
                outcome,
                gamma_sd,
                gamma_sr,
                gamma_rd,
            });
        }
    }
    Ok(records)
}

/// Fraction of relay decoding errors among source → relay transmissions
/// whose SNR cleared the threshold, measured on `n_kept` such
/// transmissions.
pub fn measure_conditional_psr(
    config: &SystemConfig,
    n_kept: u64,
    seed: u64,
) -> Result<BerEstimate> {
    config.validate()?;
    if n_kept < 100_000 {
        return Err(Error::InvalidSimulation(
            "conditional relay error needs at least 1e5 kept samples".into(),
        ));
    }
    let sqrt_ps = config.p_s.sqrt();
    let snr_scale = config.p_s / config.n0;
    let mut rng = chunk_rng(seed, 0);
    let (mut drawn, mut kept, mut errors) = (0u64, 0u64, 0u64);
    while kept < n_kept {
        if drawn == ACCEPTANCE_PROBE && (kept as f64) < MIN_ACCEPTANCE * drawn as f64 {
            return Err(Error::ThresholdTooHigh {
                fraction: kept as f64 / drawn as f64,
            });
        }
        drawn += 1;
        let h = complex_gaussian(&mut rng, config.sigma2_sr);
        if snr_scale * h.norm_sqr() <= config.gamma_th {
            continue;
        }
        kept += 1;
        let y = sqrt_ps * h + complex_gaussian(&mut rng, config.n0);
        if decide((h.conj() * y).re) < 0.0 {
            errors += 1;
        }
    }
    let p = errors as f64 / kept as f64;
    Ok(BerEstimate {
        value: p,
        kind: EstimateKind::Simulated,
        trials: kept,
        ci_halfwidth: 1.96 * (p * (1.0 - p) / kept as f64).sqrt(),
    })
}
