use serde::{Deserialize, Serialize};

use super::{match_frequencies, run_trial, InitKind, TrialResult, TrialSpec};
use crate::error::{Error, Result};
use crate::music::fft_baseline;
use crate::scalar::Real;
use crate::solver::TraceRow;
use crate::spectrum::{required_shots, Component, SparseSpectrum};

/// The same trial run from both starting points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct InitComparison<T: Real> {
    pub pii: TrialResult<T>,
    pub default: TrialResult<T>,
    pub pii_trace: Vec<TraceRow>,
    pub default_trace: Vec<TraceRow>,
}

impl<T: Real> InitComparison<T> {
    pub fn pii_not_slower(&self) -> bool {
        self.pii.iterations <= self.default.iterations
    }

    pub fn pii_not_worse(&self) -> bool {
        self.pii.mean_abs_error <= self.default.mean_abs_error
    }
}

/// Runs `spec` with the physically informed and the default start. Both
/// runs share the seed, hence the sample set and the noise.
pub fn compare_init<T: Real>(spec: &TrialSpec<T>) -> Result<InitComparison<T>> {
    if spec.guess.is_none() {
        return Err(Error::invalid("init comparison needs a guess spectrum"));
    }
    let mut s = spec.clone();
    s.config.record_trace = true;
    s.init_kind = InitKind::Pii;
    let mut pii = run_trial(&s)?;
    s.init_kind = InitKind::Default;
    let mut default = run_trial(&s)?;
    Ok(InitComparison {
        pii_trace: pii.trace.take().unwrap_or_default(),
        default_trace: default.trace.take().unwrap_or_default(),
        pii,
        default,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FftRow {
    pub truth: f64,
    pub music: f64,
    pub music_error: f64,
    pub fft: f64,
    pub fft_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FftComparison {
    pub rows: Vec<FftRow>,
    pub zero_pad_factor: usize,
}

impl FftComparison {
    /// Every matched MUSIC error is at least `factor` times smaller.
    pub fn music_wins_by(&self, factor: f64) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.music_error * factor <= r.fft_error)
    }
}

/// Feeds one recovered signal to both MUSIC and the periodogram.
pub fn compare_fft<T: Real>(spec: &TrialSpec<T>, zero_pad_factor: usize) -> Result<FftComparison> {
    let res = run_trial(spec)?;
    let fft: Vec<T> = fft_baseline(&res.x_star, spec.s_model, zero_pad_factor)?;
    let truth = spec.target_frequencies();
    let fft_pairs = match_frequencies(&truth, &fft);
    let rows = res
        .matches
        .iter()
        .filter_map(|&(t, m, e)| {
            let i = truth.iter().position(|&x| x == t)?;
            let &(_, j) = fft_pairs.iter().find(|p| p.0 == i)?;
            let d = (t.as_f64() - fft[j].as_f64()).rem_euclid(1.0);
            Some(FftRow {
                truth: t.as_f64(),
                music: m.as_f64(),
                music_error: e.as_f64(),
                fft: fft[j].as_f64(),
                fft_error: d.min(1.0 - d),
            })
        })
        .collect();
    Ok(FftComparison { rows, zero_pad_factor })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapRow {
    pub background_weight: f64,
    pub target_weight: f64,
    pub effective_sparsity: usize,
    pub shots_per_sample: u64,
    pub target_error: f64,
}

/// Error on a single target line as its weight is drained into a
/// background.
///
/// For each `w`, the truth is the target at weight `1 - w` plus `w` spread
/// evenly over `background`; shots are budgeted for `1 + background.len()`
/// lines whenever `w > 0`. `spec.spectrum` and `spec.targets` are replaced.
pub fn overlap_study<T: Real>(
    spec: &TrialSpec<T>,
    target: T,
    background: &[T],
    background_weights: &[f64],
) -> Result<Vec<OverlapRow>> {
    background_weights
        .iter()
        .map(|&w| {
            if !(0.0..1.0).contains(&w) {
                return Err(Error::invalid(format!("background weight {w} outside [0, 1)")));
            }
            let mut comps = vec![Component { omega: target, weight: T::lit(1.0 - w) }];
            if w > 0.0 {
                if background.is_empty() {
                    return Err(Error::invalid("positive background weight needs background lines"));
                }
                let each = T::lit(w / background.len() as f64);
                comps.extend(background.iter().map(|&b| Component { omega: b, weight: each }));
            }
            let effective = comps.len();
            let mut s = spec.clone();
            s.spectrum = SparseSpectrum::new(comps, Some(format!("overlap-{w}")))?;
            s.targets = vec![target];
            s.shots_sparsity = Some(effective);
            if spec.shots.is_none() {
                s.shots = Some(required_shots(effective, s.n_total())?);
            }
            let res = run_trial(&s)?;
            Ok(OverlapRow {
                background_weight: w,
                target_weight: 1.0 - w,
                effective_sparsity: effective,
                shots_per_sample: res.shots_per_sample,
                target_error: res.abs_errors.first().map(|e| e.as_f64()).unwrap_or(f64::NAN),
            })
        })
        .collect()
}
