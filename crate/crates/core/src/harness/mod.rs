//! End-to-end experiments: budget, sampling, noise, recovery, MUSIC and
//! error metrics, plus the scaling sweeps and comparison studies built on
//! top of a single trial.

pub mod fixtures;
pub mod io;
mod studies;
mod sweep;

use serde::{Deserialize, Serialize};

pub use studies::{compare_fft, compare_init, overlap_study, FftComparison, FftRow, InitComparison, OverlapRow};
pub use sweep::{bin_series, fit_power_law, sweep_scaling, BinnedSeries, PowerLaw, SweepAxis, SweepPoint, SweepResult};

use crate::error::{Error, Result};
use crate::music::{detect_frequencies, GridConfig};
use crate::scalar::Real;
use crate::solver::{init_default, init_pii, recover, GuessCoefficients, RecoveryConfig, TraceRow};
use crate::spectrum::{
    draw_sample_set, extend_hermitian, measure, required_samples, required_shots, rng_from_seed, runtime_metric,
    NoiseKind, SparseSpectrum, TimeGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Pii,
    #[default]
    Default,
}

/// Everything that defines one trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct TrialSpec<T: Real> {
    pub spectrum: SparseSpectrum<T>,
    /// Approximate spectrum for the physically informed start.
    #[serde(default)]
    pub guess: Option<SparseSpectrum<T>>,
    pub n_pos: usize,
    pub dt: T,
    pub s_model: usize,
    #[serde(default)]
    pub noise_kind: NoiseKind,
    pub seed: u64,
    #[serde(default)]
    pub config: RecoveryConfig,
    #[serde(default)]
    pub init_kind: InitKind,
    #[serde(default)]
    pub guess_coefficients: GuessCoefficients,
    /// Frequencies errors are measured against; all spectrum lines if empty.
    #[serde(default)]
    pub targets: Vec<T>,
    /// Overrides for the budget formulas.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub shots: Option<u64>,
    /// Sparsity used in the shot formula when it differs from `s_model`.
    #[serde(default)]
    pub shots_sparsity: Option<usize>,
    #[serde(default)]
    pub grid: GridConfig,
}

impl<T: Real> TrialSpec<T> {
    pub fn new(spectrum: SparseSpectrum<T>, n_pos: usize, s_model: usize, seed: u64) -> Self {
        Self {
            spectrum,
            guess: None,
            n_pos,
            dt: T::one(),
            s_model,
            noise_kind: NoiseKind::Exact,
            seed,
            config: RecoveryConfig::default(),
            init_kind: InitKind::Default,
            guess_coefficients: GuessCoefficients::Uniform,
            targets: Vec::new(),
            samples: None,
            shots: None,
            shots_sparsity: None,
            grid: GridConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_model == 0 {
            return Err(Error::invalid("s_model must be at least 1"));
        }
        if self.n_pos == 0 {
            return Err(Error::invalid("n_pos must be at least 1"));
        }
        if self.init_kind == InitKind::Pii && self.guess.is_none() {
            return Err(Error::invalid("physically informed start needs a guess spectrum"));
        }
        self.config.validate()
    }

    /// Symmetric grid length `N = 2 n_pos + 1` used by the budget formulas.
    pub fn n_total(&self) -> usize {
        2 * self.n_pos + 1
    }

    pub fn target_frequencies(&self) -> Vec<T> {
        if self.targets.is_empty() {
            self.spectrum.frequencies()
        } else {
            self.targets.clone()
        }
    }

    pub fn sample_budget(&self) -> Result<usize> {
        match self.samples {
            Some(m) => Ok(m),
            None => required_samples(self.s_model, self.n_total(), None),
        }
    }

    pub fn shot_budget(&self) -> Result<u64> {
        match self.shots {
            Some(m) => Ok(m),
            None => required_shots(self.shots_sparsity.unwrap_or(self.s_model), self.n_total()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrialResult<T: Real> {
    /// Estimated frequencies, ascending.
    pub estimated: Vec<T>,
    /// `(truth, estimate, |error|)` for each matched pair, in truth order.
    pub matches: Vec<(T, T, T)>,
    pub abs_errors: Vec<T>,
    pub mean_abs_error: f64,
    pub runtime_metric: f64,
    pub t_max: f64,
    pub compression: f64,
    pub n_samples: usize,
    /// Measured indices on the positive axis.
    pub sample_indices: Vec<i64>,
    pub shots_per_sample: u64,
    pub iterations: usize,
    pub converged: bool,
    pub under_resolved: bool,
    /// Recovered signal on the symmetric grid.
    #[serde(skip)]
    pub x_star: Vec<crate::scalar::C<T>>,
    #[serde(skip)]
    pub trace: Option<Vec<TraceRow>>,
}

/// Minimal-total-distance matching of estimates to truths.
///
/// Exact (subset dynamic programming) for up to 12 truths, greedy beyond.
/// Distances are circular on `[0, 1)`. Returns `(truth index, estimate
/// index)` pairs sorted by truth index.
pub fn match_frequencies<T: Real>(truth: &[T], estimates: &[T]) -> Vec<(usize, usize)> {
    let dist = |a: T, b: T| {
        let d = (a.as_f64() - b.as_f64()).rem_euclid(1.0);
        d.min(1.0 - d)
    };
    let (nt, ne) = (truth.len(), estimates.len());
    if nt == 0 || ne == 0 {
        return Vec::new();
    }
    // Assign the shorter side into the longer one.
    let swap = nt > ne;
    let (small, large) = if swap { (estimates, truth) } else { (truth, estimates) };
    let k = small.len();
    let pairs: Vec<(usize, usize)> = if large.len() <= 12 {
        let full = 1usize << large.len();
        let mut best = vec![f64::INFINITY; full];
        let mut choice = vec![usize::MAX; full];
        best[0] = 0.0;
        // best[mask] with popcount(mask) = i means small[..i] assigned to mask.
        for mask in 0..full {
            let i = mask.count_ones() as usize;
            if i >= k || !best[mask].is_finite() {
                continue;
            }
            for j in 0..large.len() {
                if mask & (1 << j) == 0 {
                    let next = mask | (1 << j);
                    let cost = best[mask] + dist(small[i], large[j]);
                    if cost < best[next] {
                        best[next] = cost;
                        choice[next] = j;
                    }
                }
            }
        }
        let end = (0..full)
            .filter(|m| m.count_ones() as usize == k)
            .min_by(|&a, &b| best[a].partial_cmp(&best[b]).unwrap_or(std::cmp::Ordering::Equal))
            .expect("at least one complete assignment");
        let mut mask = end;
        let mut out = Vec::with_capacity(k);
        for i in (0..k).rev() {
            let j = choice[mask];
            out.push((i, j));
            mask &= !(1 << j);
        }
        out
    } else {
        let mut cand: Vec<(f64, usize, usize)> =
            (0..k).flat_map(|i| (0..large.len()).map(move |j| (i, j))).map(|(i, j)| (dist(small[i], large[j]), i, j)).collect();
        cand.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let (mut used_s, mut used_l) = (vec![false; k], vec![false; large.len()]);
        let mut out = Vec::new();
        for (_, i, j) in cand {
            if !used_s[i] && !used_l[j] {
                used_s[i] = true;
                used_l[j] = true;
                out.push((i, j));
            }
        }
        out
    };
    let mut out: Vec<(usize, usize)> = pairs.into_iter().map(|(i, j)| if swap { (j, i) } else { (i, j) }).collect();
    out.sort();
    out
}

/// Runs one complete trial.
pub fn run_trial<T: Real>(spec: &TrialSpec<T>) -> Result<TrialResult<T>> {
    spec.validate()?;
    let m = spec.sample_budget()?;
    let shots = spec.shot_budget()?;
    let grid = TimeGrid::new(spec.n_pos, spec.dt, false)?;
    let mut rng = rng_from_seed(spec.seed);
    let indices = draw_sample_set(spec.n_pos, m, true, &mut rng)?;
    let positive = measure(&spec.spectrum, &grid, &indices, shots, spec.noise_kind, &mut rng)?;
    let samples = extend_hermitian(&positive)?;

    let init = match spec.init_kind {
        InitKind::Default => init_default(&samples)?,
        InitKind::Pii => init_pii(
            spec.guess.as_ref().expect("validated"),
            &samples.grid,
            spec.guess_coefficients,
        )?,
    };
    let rec = recover(&samples, init, &spec.config)?;
    let imaging = detect_frequencies(&rec.x_star, spec.s_model, &spec.grid)?;

    let truth = spec.target_frequencies();
    let estimated = imaging.refined.clone();
    let pairs = match_frequencies(&truth, &estimated);
    let matches: Vec<(T, T, T)> = pairs
        .iter()
        .map(|&(i, j)| {
            let d = (truth[i].as_f64() - estimated[j].as_f64()).rem_euclid(1.0);
            (truth[i], estimated[j], T::lit(d.min(1.0 - d)))
        })
        .collect();
    let abs_errors: Vec<T> = matches.iter().map(|m| m.2).collect();
    let mean_abs_error = if abs_errors.is_empty() {
        f64::NAN
    } else {
        abs_errors.iter().map(|e| e.as_f64()).sum::<f64>() / abs_errors.len() as f64
    };
    let dt = spec.dt.as_f64();
    let t_max = indices.iter().map(|&n| n.unsigned_abs() as f64 * dt).fold(0.0, f64::max);
    Ok(TrialResult {
        estimated,
        matches,
        abs_errors,
        mean_abs_error,
        runtime_metric: runtime_metric(&indices, shots, dt),
        t_max,
        compression: m as f64 / spec.n_total() as f64,
        n_samples: m,
        sample_indices: indices,
        shots_per_sample: shots,
        iterations: rec.iterations_used,
        converged: rec.converged,
        under_resolved: imaging.under_resolved,
        x_star: rec.x_star,
        trace: rec.trace,
    })
}

/// Runs `f` over `items` on all available cores and returns results in
/// input order.
pub(crate) fn parallel_map<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> O + Sync) -> Vec<O> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<O>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let out = f(&items[i]);
                results.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });
    slots.into_iter().map(|o| o.expect("every item processed")).collect()
}
