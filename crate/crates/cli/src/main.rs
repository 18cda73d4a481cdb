//! `cqpe` command-line driver.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver divergence, 1 anything
//! else (I/O).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cqpe::harness::fixtures::PhysicalUnits;
use cqpe::harness::io::{config_hash, write_csv_with_hash, write_json_with_hash};
use cqpe::harness::{self, InitKind, SweepAxis, TrialSpec};
use cqpe::music::{detect_frequencies, GridConfig};
use cqpe::solver::{init_default, init_pii, recover, write_trace_csv, GuessCoefficients, RecoveryConfig};
use cqpe::spectrum::{
    draw_sample_set, extend_hermitian, measure, rng_from_seed, synthesize, NoiseKind, SampledSignal, TimeGrid,
};
use cqpe::{Complex, Spectrum};

#[derive(Parser, Debug)]
#[command(name = "cqpe", version, about = "Sparse spectral recovery from few time samples")]
struct Cli {
    /// Master seed; overrides any seed in the input spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectrum JSON → signal CSV (`n,re,im`), optionally sampled and noisy.
    Synth(SynthArgs),
    /// Signal CSV (+ config JSON) → recovered CSV + trace CSV.
    Recover(RecoverArgs),
    /// Recovered CSV → imaging CSV + peaks JSON.
    Music(MusicArgs),
    /// TrialSpec JSON → TrialResult JSON.
    Trial(SpecArg),
    /// Sweep spec JSON → binned CSV, raw CSV and power-law fit JSON.
    Sweep(SpecArg),
    /// Same trial from the physically informed and the default start.
    CompareInit(SpecArg),
    /// MUSIC vs periodogram errors on one recovered signal.
    CompareFft(CompareFftArgs),
    /// Target error as weight moves into a background.
    Overlap(SpecArg),
}

#[derive(Args, Debug, Serialize)]
struct SynthArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    n_pos: usize,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    /// Number of random positive-axis samples (all points if omitted).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = Noise::Exact)]
    noise: Noise,
    #[arg(long, default_value_t = 1000)]
    shots: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Noise {
    Exact,
    Bernoulli,
    Gaussian,
}

impl From<Noise> for NoiseKind {
    fn from(n: Noise) -> Self {
        match n {
            Noise::Exact => NoiseKind::Exact,
            Noise::Bernoulli => NoiseKind::Bernoulli,
            Noise::Gaussian => NoiseKind::Gaussian,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct RecoverArgs {
    /// Positive-axis samples as `n,re,im`.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    n_pos: usize,
    /// RecoveryConfig JSON; defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Guess spectrum JSON; selects the physically informed start.
    #[arg(long)]
    guess: Option<PathBuf>,
    /// Use the guess weights instead of equal coefficients.
    #[arg(long)]
    guess_weights: bool,
    /// How the samples were produced; `exact` rejects `|z| > 1`.
    #[arg(long, value_enum, default_value_t = Noise::Exact)]
    noise: Noise,
}

#[derive(Args, Debug, Serialize)]
struct MusicArgs {
    /// Recovered signal on the symmetric grid as `n,re,im`.
    #[arg(long)]
    recovered: PathBuf,
    /// Model order.
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 100)]
    oversample: usize,
}

#[derive(Args, Debug, Serialize)]
struct SpecArg {
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CompareFftArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Zero-padding factor of the periodogram.
    #[arg(long, default_value_t = 1)]
    pad: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    base: TrialSpec<f64>,
    n_pos: Vec<usize>,
    #[serde(default = "default_repeats")]
    repeats: usize,
    #[serde(default)]
    axis: SweepAxis,
    #[serde(default = "default_bins")]
    bins: usize,
}

fn default_repeats() -> usize {
    5
}

fn default_bins() -> usize {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverlapSpec {
    base: TrialSpec<f64>,
    target: f64,
    background: Vec<f64>,
    weights: Vec<f64>,
}

/// Error raised for bad user input.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

fn read_json<D: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<D> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Reads `n,re,im` rows, skipping `#` lines and the header.
fn read_signal_csv(path: &Path) -> anyhow::Result<Vec<(i64, Complex)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for rec in reader.deserialize::<(i64, f64, f64)>() {
        let (n, re, im) = rec.map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        rows.push((n, Complex::new(re, im)));
    }
    if rows.is_empty() {
        return Err(invalid(format!("{}: no rows", path.display())));
    }
    Ok(rows)
}

fn signal_csv(rows: impl Iterator<Item = (i64, Complex)>) -> String {
    let mut s = String::from("n,re,im\n");
    for (n, z) in rows {
        s.push_str(&format!("{n},{:.17e},{:.17e}\n", z.re, z.im));
    }
    s
}

struct Output<'a> {
    dir: &'a Path,
    hash: String,
}

impl Output<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv(&self, name: &str, body: &str) -> anyhow::Result<()> {
        let mut f = fs::File::create(self.path(name)).with_context(|| format!("creating {name}"))?;
        write_csv_with_hash(&mut f, &self.hash, body)?;
        Ok(())
    }

    fn json<S: Serialize>(&self, name: &str, data: &S) -> anyhow::Result<()> {
        let mut f = fs::File::create(self.path(name)).with_context(|| format!("creating {name}"))?;
        write_json_with_hash(&mut f, &self.hash, data)?;
        Ok(())
    }

    /// A table as `<stem>.csv` or `<stem>.json` depending on `--format`.
    fn table<S: Serialize>(&self, format: Format, stem: &str, rows: &[S]) -> anyhow::Result<()> {
        match format {
            Format::Json => self.json(&format!("{stem}.json"), &rows),
            Format::Csv => self.csv(&format!("{stem}.csv"), &to_csv(rows)?),
        }
    }
}

fn to_csv<S: Serialize>(rows: &[S]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn with_seed(mut spec: TrialSpec<f64>, seed: Option<u64>) -> TrialSpec<f64> {
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec
}

fn units_note(spec: &TrialSpec<f64>) -> String {
    PhysicalUnits { dt: spec.dt }.describe()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let seed = cli.seed;
    let fmt = cli.format;
    let out = |config: serde_json::Value| -> anyhow::Result<Output<'_>> {
        let hash = config_hash(&serde_json::json!({ "format": fmt, "seed": seed, "config": config }))?;
        Ok(Output { dir: &cli.out, hash })
    };
    match &cli.command {
        Command::Synth(a) => {
            let spectrum: Spectrum = read_json(&a.spectrum)?;
            let o = out(serde_json::json!({ "command": "synth", "args": a, "spectrum": spectrum }))?;
            let grid = TimeGrid::new(a.n_pos, a.dt, false)?;
            let rows: Vec<(i64, Complex)> = match a.samples {
                None if matches!(a.noise, Noise::Exact) => grid.indices().zip(synthesize(&spectrum, &grid)?).collect(),
                m => {
                    let mut rng = rng_from_seed(seed.unwrap_or(0));
                    let idx = draw_sample_set(a.n_pos, m.unwrap_or(a.n_pos + 1), true, &mut rng)?;
                    let s = measure(&spectrum, &grid, &idx, a.shots, a.noise.into(), &mut rng)?;
                    s.sample_indices.into_iter().zip(s.values).collect()
                }
            };
            o.csv("signal.csv", &signal_csv(rows.into_iter()))?;
        }
        Command::Recover(a) => {
            let config: RecoveryConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => RecoveryConfig::default(),
            };
            let guess: Option<Spectrum> = a.guess.as_deref().map(read_json).transpose()?;
            let rows = read_signal_csv(&a.signal)?;
            let o = out(serde_json::json!({
                "command": "recover", "args": a, "config": config, "guess": guess, "signal": rows.iter().map(|(n, z)| (n, z.re, z.im)).collect::<Vec<_>>(),
            }))?;
            let grid = TimeGrid::new(a.n_pos, 1.0, false)?;
            let (idx, vals): (Vec<i64>, Vec<Complex>) = rows.into_iter().unzip();
            let positive = SampledSignal::new(grid, idx, vals, 1, a.noise.into())?;
            let samples = extend_hermitian(&positive)?;
            let init = match &guess {
                Some(g) => {
                    let coeffs = if a.guess_weights { GuessCoefficients::FromWeights } else { GuessCoefficients::Uniform };
                    init_pii(g, &samples.grid, coeffs)?
                }
                None => init_default(&samples)?,
            };
            let config = RecoveryConfig { record_trace: true, ..config };
            let res = recover(&samples, init, &config)?;
            log::info!(
                "{} after {} iterations, relative residual {:.3e}",
                if res.converged { "converged" } else { "stopped" },
                res.iterations_used,
                res.relative_residual(&samples)
            );
            o.csv("recovered.csv", &signal_csv(samples.grid.indices().zip(res.x_star.iter().copied())))?;
            let mut trace = Vec::new();
            write_trace_csv(&mut trace, res.trace.as_deref().unwrap_or_default())?;
            o.csv("trace.csv", &String::from_utf8(trace)?)?;
        }
        Command::Music(a) => {
            let rows = read_signal_csv(&a.recovered)?;
            let o = out(serde_json::json!({ "command": "music", "args": a, "signal": rows.iter().map(|(n, z)| (n, z.re, z.im)).collect::<Vec<_>>() }))?;
            let first = rows[0].0;
            if rows.iter().enumerate().any(|(k, r)| r.0 != first + k as i64) {
                bail!(invalid("recovered signal must list consecutive indices"));
            }
            let x: Vec<Complex> = rows.into_iter().map(|r| r.1).collect();
            let img = detect_frequencies(&x, a.s, &GridConfig { oversample: a.oversample, ..Default::default() })?;
            let mut body = Vec::new();
            img.write_csv(&mut body)?;
            o.csv("imaging.csv", &String::from_utf8(body)?)?;
            o.json(
                "peaks.json",
                &serde_json::json!({ "frequencies": img.refined, "grid_peaks": img.peaks, "under_resolved": img.under_resolved }),
            )?;
        }
        Command::Trial(a) => {
            let spec = with_seed(read_json(&a.spec)?, seed);
            let o = out(serde_json::json!({ "command": "trial", "spec": spec }))?;
            let res = harness::run_trial(&spec)?;
            log::info!("{}", units_note(&spec));
            o.json("trial.json", &res)?;
        }
        Command::Sweep(a) => {
            let mut spec: SweepSpec = read_json(&a.spec)?;
            spec.base = with_seed(spec.base, seed);
            let o = out(serde_json::json!({ "command": "sweep", "spec": spec }))?;
            let res = harness::sweep_scaling(&spec.base, &spec.n_pos, spec.repeats, spec.axis, spec.bins)?;
            let binned: Vec<_> = (0..res.binned.counts.len())
                .map(|k| BinRow {
                    x: res.binned.bin_centers[k],
                    mean: res.binned.means[k],
                    std: res.binned.stds[k],
                    count: res.binned.counts[k],
                })
                .collect();
            o.table(fmt, "binned", &binned)?;
            o.table(fmt, "raw", &res.raw)?;
            let fit = res.fit().ok();
            o.json("fit.json", &serde_json::json!({ "axis": spec.axis, "fit": fit, "units": units_note(&spec.base) }))?;
        }
        Command::CompareInit(a) => {
            let spec = with_seed(read_json(&a.spec)?, seed);
            let o = out(serde_json::json!({ "command": "compare-init", "spec": spec }))?;
            let c = harness::compare_init(&spec)?;
            let rows: Vec<_> = [(InitKind::Pii, &c.pii), (InitKind::Default, &c.default)]
                .into_iter()
                .map(|(kind, r)| InitRow {
                    init: kind,
                    iterations: r.iterations,
                    converged: r.converged,
                    mean_abs_error: r.mean_abs_error,
                    abs_errors: format!("{:?}", r.abs_errors),
                })
                .collect();
            o.table(fmt, "compare_init", &rows)?;
            let mut trace = Vec::new();
            write_trace_csv(&mut trace, &c.pii_trace)?;
            o.csv("trace_pii.csv", &String::from_utf8(trace)?)?;
            let mut trace = Vec::new();
            write_trace_csv(&mut trace, &c.default_trace)?;
            o.csv("trace_default.csv", &String::from_utf8(trace)?)?;
        }
        Command::CompareFft(a) => {
            let spec = with_seed(read_json(&a.spec)?, seed);
            let o = out(serde_json::json!({ "command": "compare-fft", "spec": spec, "pad": a.pad }))?;
            let c = harness::compare_fft(&spec, a.pad)?;
            o.table(fmt, "compare_fft", &c.rows)?;
        }
        Command::Overlap(a) => {
            let mut spec: OverlapSpec = read_json(&a.spec)?;
            spec.base = with_seed(spec.base, seed);
            let o = out(serde_json::json!({ "command": "overlap", "spec": spec }))?;
            let rows = harness::overlap_study(&spec.base, spec.target, &spec.background, &spec.weights)?;
            o.table(fmt, "overlap", &rows)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BinRow {
    x: f64,
    mean: f64,
    std: f64,
    count: usize,
}

#[derive(Serialize)]
struct InitRow {
    init: InitKind,
    iterations: usize,
    converged: bool,
    mean_abs_error: f64,
    abs_errors: String,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Invalid>().is_some() {
        return 2;
    }
    match err.downcast_ref::<cqpe::Error>() {
        Some(cqpe::Error::Diverged { .. }) => 3,
        Some(e) if e.is_validation() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
