//! The `dfrelay` command line: SNR sweeps, threshold tables and diversity
//! slopes, written as CSV.
//!
//! Every subcommand accepts the same scenario flags. `--scenario FILE` reads
//! `key = value` lines whose keys are the flag names without dashes; flags
//! given on the command line override the file.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{p_e2e, SystemConfig};
use crate::error::Error;
use crate::montecarlo::{run_sim, DecodingMode, Sampling, SimRun, TiltedFading};
use crate::optimizer::{reference_gamma_opt_db, sweep};
use crate::slope::fit_slope;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "dfrelay",
    version,
    about = "BER of decode-and-forward relaying with threshold-based relay selection",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BER versus total SNR, one column pair (value, ci) per mode.
    Sweep(ScenarioArgs),
    /// Optimal selection threshold versus total SNR.
    Table1(ScenarioArgs),
    /// Diversity order from the least-squares slope over the SNR window.
    Slope(ScenarioArgs),
}

impl Command {
    pub fn args(&self) -> &ScenarioArgs {
        match self {
            Command::Sweep(a) | Command::Table1(a) | Command::Slope(a) => a,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Sweep(_) => "sweep",
            Command::Table1(_) => "table1",
            Command::Slope(_) => "slope",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long, value_name = "FILE")]
    pub scenario: Option<PathBuf>,
    /// Relay counts, comma separated [default: 4].
    #[arg(long, value_name = "M[,M...]")]
    pub relays: Option<RelayList>,
    /// Selection threshold in dB [default: 5].
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub threshold_db: Option<f64>,
    /// Total SNR grid `start:stop:step` or a single value in dB
    /// [default: 0:24:3, slope: 15:24:3].
    #[arg(long, value_name = "RANGE", allow_negative_numbers = true)]
    pub snr_db: Option<SnrRange>,
    /// Source → destination channel variance in dB [default: -3].
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub sigma2_sd_db: Option<f64>,
    /// Source → relay channel variance in dB [default: 0].
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub sigma2_sr_db: Option<f64>,
    /// Relay → destination channel variance in dB [default: 0].
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub sigma2_rd_db: Option<f64>,
    /// Power ratio `P_s:P_r` [default: 1:1].
    #[arg(long, value_name = "PS:PR")]
    pub power_split: Option<PowerSplit>,
    /// Monte Carlo trials per point [default: 10000000].
    #[arg(long, value_name = "N")]
    pub trials: Option<u64>,
    /// Master seed [default: 1].
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Estimators, comma separated: analytic, sim, perfect-sim
    /// [default: analytic].
    #[arg(long, value_name = "MODE[,MODE...]")]
    pub mode: Option<ModeList>,
    /// Fading draws for perfect-sim: direct or tilted [default: direct].
    #[arg(long, value_name = "KIND")]
    pub sampling: Option<SamplingKind>,
    /// Output CSV path; stdout when absent. With several relay counts,
    /// `sweep` and `table1` write `<stem>_m<M>.<ext>` per count.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelayList(pub Vec<usize>);

impl FromStr for RelayList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let list = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad relay count `{t}`: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self(list))
    }
}

/// Evenly spaced SNR points, inclusive of `stop` when it falls on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrRange {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + self.step * i as f64).collect()
    }
}

impl FromStr for SnrRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(':')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad number `{t}`: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let range = match parts[..] {
            [v] => SnrRange {
                start: v,
                stop: v,
                step: 1.0,
            },
            [start, stop, step] => SnrRange { start, stop, step },
            _ => return Err("expected start:stop:step or a single value".into()),
        };
        if !(range.start.is_finite() && range.stop.is_finite()) {
            return Err("range ends must be finite".into());
        }
        if range.start > range.stop {
            return Err("start must not exceed stop".into());
        }
        if !(range.step > 0.0 && range.step.is_finite()) {
            return Err("step must be positive".into());
        }
        Ok(range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit(pub f64, pub f64);

impl FromStr for PowerSplit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or("expected PS:PR")?;
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|e| format!("bad P_s share: {e}"))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|e| format!("bad P_r share: {e}"))?;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err("power shares must be positive".into());
        }
        Ok(Self(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Sim,
    PerfectSim,
}

impl Mode {
    pub fn column(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Sim => "sim",
            Mode::PerfectSim => "perfect_sim",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(
            self.to_possible_value()
                .expect("no skipped variants")
                .get_name(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeList(pub Vec<Mode>);

impl FromStr for ModeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let modes = s
            .split(',')
            .map(|t| Mode::from_str(t.trim(), true))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self(modes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum SamplingKind {
    #[default]
    Direct,
    Tilted,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::OutOfRange { .. }
            | Error::InvalidSimulation(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// A fully resolved command configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub relays: Vec<usize>,
    pub threshold_db: f64,
    pub snr_db: SnrRange,
    pub sigma2_db: (f64, f64, f64),
    pub power_split: PowerSplit,
    pub modes: Vec<Mode>,
    pub trials: u64,
    pub seed: u64,
    pub sampling: SamplingKind,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SNR: SnrRange = SnrRange {
    start: 0.0,
    stop: 24.0,
    step: 3.0,
};
pub const DEFAULT_SLOPE_SNR: SnrRange = SnrRange {
    start: 15.0,
    stop: 24.0,
    step: 3.0,
};
pub const DEFAULT_TRIALS: u64 = 10_000_000;

impl SweepSpec {
    pub fn resolve(args: &ScenarioArgs, default_snr: SnrRange) -> Result<Self, CliError> {
        let spec = Self {
            relays: args.relays.clone().map_or(vec![4], |r| r.0),
            threshold_db: args.threshold_db.unwrap_or(5.0),
            snr_db: args.snr_db.unwrap_or(default_snr),
            sigma2_db: (
                args.sigma2_sd_db.unwrap_or(-3.0),
                args.sigma2_sr_db.unwrap_or(0.0),
                args.sigma2_rd_db.unwrap_or(0.0),
            ),
            power_split: args.power_split.unwrap_or(PowerSplit(1.0, 1.0)),
            modes: args.mode.clone().map_or(vec![Mode::Analytic], |m| m.0),
            trials: args.trials.unwrap_or(DEFAULT_TRIALS),
            seed: args.seed.unwrap_or(1),
            sampling: args.sampling.unwrap_or_default(),
            out: args.out.clone(),
        };
        if spec.relays.is_empty() {
            return Err(CliError::Usage("no relay counts given".into()));
        }
        if spec.modes.is_empty() {
            return Err(CliError::Usage("no modes given".into()));
        }
        if spec.trials == 0 {
            return Err(CliError::Usage("--trials must be positive".into()));
        }
        // Validate every configuration up front so bad input is a usage error.
        for &m in &spec.relays {
            for snr in spec.snr_db.points() {
                spec.config(m, snr)?;
            }
        }
        Ok(spec)
    }

    pub fn config(&self, m_relays: usize, total_snr_db: f64) -> Result<SystemConfig, CliError> {
        let (sd, sr, rd) = self.sigma2_db;
        Ok(SystemConfig::from_db(
            m_relays,
            self.threshold_db,
            total_snr_db,
            (self.power_split.0, self.power_split.1),
            sd,
            sr,
            rd,
        )?)
    }

    /// Whether the reference threshold table applies to this scenario.
    pub fn is_reference_scenario(&self, m_relays: usize) -> bool {
        let PowerSplit(a, b) = self.power_split;
        m_relays == 4 && self.sigma2_db == (-3.0, 0.0, 0.0) && a == b
    }

    pub fn estimate(&self, mode: Mode, config: &SystemConfig) -> Result<(f64, f64), CliError> {
        let sim = |decoding, sampling| {
            run_sim(&SimRun::new(*config, self.seed, self.trials, decoding).with_sampling(sampling))
        };
        let est = match mode {
            Mode::Analytic => p_e2e(config)?,
            Mode::Sim => sim(DecodingMode::ErrorPropagation, Sampling::Direct)?,
            Mode::PerfectSim => match self.sampling {
                SamplingKind::Direct => sim(DecodingMode::PerfectDecoding, Sampling::Direct)?,
                SamplingKind::Tilted => sim(
                    DecodingMode::PerfectDecoding,
                    Sampling::Tilted(TiltedFading::default()),
                )?,
            },
        };
        Ok((est.value, est.ci_halfwidth))
    }
}

/// Canonical CSV number: 12 significant digits in scientific notation.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

fn format_db(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

/// `out.csv` with relay count 3 becomes `out_m3.csv`.
pub fn per_relay_path(out: &Path, m_relays: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_m{m_relays}.{}", ext.to_string_lossy()),
        None => format!("{stem}_m{m_relays}"),
    };
    out.with_file_name(name)
}

type Table = (Vec<String>, Vec<Vec<String>>);

fn write_table(path: Option<&Path>, (header, rows): &Table) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one table per relay count, split into files when there are
/// several.
fn emit_per_relay(spec: &SweepSpec, tables: Vec<(usize, Table)>) -> Result<(), CliError> {
    match (&spec.out, tables.len()) {
        (Some(out), 1) => write_table(Some(out), &tables[0].1),
        (Some(out), _) => {
            for (m, table) in &tables {
                write_table(Some(&per_relay_path(out, *m)), table)?;
            }
            Ok(())
        }
        (None, 1) => write_table(None, &tables[0].1),
        (None, _) => Err(CliError::Usage(
            "several relay counts need --out to name the per-count files".into(),
        )),
    }
}

pub fn sweep_table(spec: &SweepSpec, m_relays: usize) -> Result<Table, CliError> {
    let mut header = vec!["snr_db".to_string()];
    for mode in &spec.modes {
        header.push(mode.column().to_string());
        header.push(format!("{}_ci", mode.column()));
    }
    let mut rows = Vec::new();
    for snr in spec.snr_db.points() {
        let config = spec.config(m_relays, snr)?;
        let mut row = vec![format_db(snr)];
        for &mode in &spec.modes {
            let (v, ci) = spec.estimate(mode, &config)?;
            row.push(format_value(v));
            row.push(format_value(ci));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn cmd_sweep(spec: &SweepSpec) -> Result<(), CliError> {
    let tables = spec
        .relays
        .iter()
        .map(|&m| sweep_table(spec, m).map(|t| (m, t)))
        .collect::<Result<Vec<_>, _>>()?;
    emit_per_relay(spec, tables)
}

pub fn threshold_table(spec: &SweepSpec, m_relays: usize) -> Result<Table, CliError> {
    let template = spec.config(m_relays, spec.snr_db.start)?;
    let curve = sweep(&template, &spec.snr_db.points())?;
    let header = [
        "snr_db",
        "gamma_opt_db",
        "ber_at_opt",
        "reference_gamma_opt_db",
        "delta_db",
        "multimodal",
    ]
    .map(String::from)
    .to_vec();
    let reference = spec.is_reference_scenario(m_relays);
    let rows = curve
        .points
        .iter()
        .map(|p| {
            let r = reference
                .then(|| reference_gamma_opt_db(p.total_snr_db))
                .flatten();
            vec![
                format_db(p.total_snr_db),
                format_value(p.gamma_opt_db),
                format_value(p.ber_at_opt),
                r.map(format_db).unwrap_or_default(),
                r.map(|r| format_value(p.gamma_opt_db - r))
                    .unwrap_or_default(),
                u8::from(p.multimodal).to_string(),
            ]
        })
        .collect();
    if !curve.is_monotone() {
        eprintln!("note: M = {m_relays}: optimal threshold is not monotone in SNR");
    }
    Ok((header, rows))
}

pub fn cmd_table1(spec: &SweepSpec) -> Result<(), CliError> {
    let tables = spec
        .relays
        .iter()
        .map(|&m| threshold_table(spec, m).map(|t| (m, t)))
        .collect::<Result<Vec<_>, _>>()?;
    emit_per_relay(spec, tables)
}

pub fn slope_table(spec: &SweepSpec) -> Result<Table, CliError> {
    let header = [
        "relays",
        "mode",
        "snr_start_db",
        "snr_stop_db",
        "slope",
        "diversity",
    ]
    .map(String::from)
    .to_vec();
    let snrs = spec.snr_db.points();
    let mut rows = Vec::new();
    for &m in &spec.relays {
        for &mode in &spec.modes {
            let mut pts = Vec::with_capacity(snrs.len());
            for &snr in &snrs {
                let config = spec.config(m, snr)?;
                pts.push((snr, spec.estimate(mode, &config)?.0));
            }
            let fit = fit_slope(&pts).map_err(CliError::Numerical)?;
            rows.push(vec![
                m.to_string(),
                mode.to_string(),
                format_db(snrs[0]),
                format_db(*snrs.last().expect("nonempty range")),
                format_value(fit.slope),
                format_value(fit.diversity()),
            ]);
        }
    }
    Ok((header, rows))
}

pub fn cmd_slope(spec: &SweepSpec) -> Result<(), CliError> {
    write_table(spec.out.as_deref(), &slope_table(spec)?)
}

/// Flag tokens equivalent to a scenario file.
pub fn scenario_tokens(text: &str) -> Result<Vec<String>, CliError> {
    let mut tokens = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("scenario line {}: expected key = value", n + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if key == "scenario" {
            return Err(CliError::Usage(
                "scenario files cannot include other files".into(),
            ));
        }
        tokens.push(format!("--{key}"));
        tokens.push(value.trim().to_string());
    }
    Ok(tokens)
}

/// Parses `argv`, splicing in the scenario file's flags ahead of the
/// command-line ones so the latter win.
pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv)?;
    let Some(path) = cli.command.args().scenario.clone() else {
        return Ok(cli);
    };
    let fail =
        |msg: String| clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{msg}\n"));
    let text = fs::read_to_string(&path)
        .map_err(|e| fail(format!("cannot read scenario {}: {e}", path.display())))?;
    let tokens = scenario_tokens(&text).map_err(|e| fail(e.to_string()))?;
    let sub = argv
        .iter()
        .position(|a| a.to_str() == Some(cli.command.name()))
        .expect("parsed subcommand appears in argv");
    let mut merged = argv[..=sub].to_vec();
    merged.extend(tokens.into_iter().map(Into::into));
    merged.extend(argv[sub + 1..].iter().cloned());
    Cli::try_parse_from(merged)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(&SweepSpec::resolve(a, DEFAULT_SNR)?),
        Command::Table1(a) => cmd_table1(&SweepSpec::resolve(a, DEFAULT_SNR)?),
        Command::Slope(a) => cmd_slope(&SweepSpec::resolve(a, DEFAULT_SLOPE_SNR)?),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("dfrelay: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::reference::rayleigh_bpsk;

    fn parse(args: &[&str]) -> Cli {
        parse_args(std::iter::once("dfrelay").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn snr_range_parsing() {
        let r: SnrRange = "0:24:3".parse().unwrap();
        assert_eq!(r.points().len(), 9);
        assert_eq!(r.points()[8], 24.0);
        let single: SnrRange = "12".parse().unwrap();
        assert_eq!(single.points(), vec![12.0]);
        assert_eq!(
            "-6:0:2".parse::<SnrRange>().unwrap().points(),
            vec![-6.0, -4.0, -2.0, 0.0]
        );
        assert!("3:0:1".parse::<SnrRange>().is_err());
        assert!("0:3:0".parse::<SnrRange>().is_err());
        assert!("0:3".parse::<SnrRange>().is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!("3,4,5".parse::<RelayList>().unwrap().0, vec![3, 4, 5]);
        assert!("3,x".parse::<RelayList>().is_err());
        assert_eq!(
            "analytic,perfect-sim".parse::<ModeList>().unwrap().0,
            vec![Mode::Analytic, Mode::PerfectSim]
        );
        assert!("bogus".parse::<ModeList>().is_err());
        assert_eq!("2:1".parse::<PowerSplit>().unwrap(), PowerSplit(2.0, 1.0));
        assert!("0:1".parse::<PowerSplit>().is_err());
    }

    #[test]
    fn defaults_match_headline_scenario() {
        let cli = parse(&["sweep"]);
        let spec = SweepSpec::resolve(cli.command.args(), DEFAULT_SNR).unwrap();
        assert_eq!(spec.relays, vec![4]);
        assert_eq!(spec.threshold_db, 5.0);
        assert_eq!(spec.sigma2_db, (-3.0, 0.0, 0.0));
        assert_eq!(spec.snr_db, DEFAULT_SNR);
        assert_eq!(spec.modes, vec![Mode::Analytic]);
        assert!(spec.is_reference_scenario(4));
    }

    #[test]
    fn negative_values_accepted() {
        let cli = parse(&["sweep", "--threshold-db", "-50", "--sigma2-sd-db", "-3"]);
        assert_eq!(cli.command.args().threshold_db, Some(-50.0));
    }

    #[test]
    fn scenario_tokens_parse() {
        let t = scenario_tokens("# comment\nrelays = 3,5\n\nthreshold_db=-2 # inline\n").unwrap();
        assert_eq!(t, vec!["--relays", "3,5", "--threshold-db", "-2"]);
        assert!(scenario_tokens("relays 3").is_err());
        assert!(scenario_tokens("scenario = x").is_err());
    }

    #[test]
    fn per_relay_names() {
        assert_eq!(
            per_relay_path(Path::new("/tmp/fig.csv"), 3),
            Path::new("/tmp/fig_m3.csv")
        );
        assert_eq!(per_relay_path(Path::new("fig"), 5), Path::new("fig_m5"));
    }

    #[test]
    fn direct_link_column_is_closed_form() {
        let cli = parse(&["sweep", "--relays", "0", "--snr-db", "0:12:6"]);
        let spec = SweepSpec::resolve(cli.command.args(), DEFAULT_SNR).unwrap();
        let (header, rows) = sweep_table(&spec, 0).unwrap();
        assert_eq!(header, vec!["snr_db", "analytic", "analytic_ci"]);
        for row in rows {
            let snr: f64 = row[0].parse().unwrap();
            let gamma_sd = 0.5 * 10f64.powf(snr / 10.0) * 10f64.powf(-0.3);
            let v: f64 = row[1].parse().unwrap();
            assert!((v / rayleigh_bpsk(gamma_sd) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn format_is_twelve_significant_digits() {
        assert_eq!(format_value(0.1234567890123456), "1.23456789012e-1");
        assert_eq!(format_value(0.0), "0.00000000000e0");
        assert_eq!(format_db(-7.25), "-7.25");
        assert_eq!(format_db(24.0), "24");
    }

    #[test]
    fn usage_errors_classified() {
        let cli = parse(&["sweep", "--relays", "100"]);
        let err = SweepSpec::resolve(cli.command.args(), DEFAULT_SNR).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        assert_eq!(
            CliError::from(Error::ThresholdTooHigh { fraction: 0.0 }).exit_code(),
            EXIT_NUMERICAL
        );
        assert!(parse_args(["dfrelay", "sweep", "--snr-db", "5:0:1"]).is_err());
    }
}
