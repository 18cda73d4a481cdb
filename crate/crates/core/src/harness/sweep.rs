use serde::{Deserialize, Serialize};

use super::{parallel_map, run_trial, TrialSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrum::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    #[default]
    Runtime,
    TMax,
}

/// Per-bin statistics of a scatter of `(x, y)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSeries {
    pub bin_centers: Vec<f64>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub counts: Vec<usize>,
}

/// One raw trial of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n_pos: usize,
    pub repeat: usize,
    pub seed: u64,
    pub runtime: f64,
    pub t_max: f64,
    pub mean_abs_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SweepPoint {
    pub fn x(&self, axis: SweepAxis) -> f64 {
        match axis {
            SweepAxis::Runtime => self.runtime,
            SweepAxis::TMax => self.t_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub binned: BinnedSeries,
    pub raw: Vec<SweepPoint>,
}

/// Bins `x` into `bins` equal-width bins over its range (logarithmic widths
/// with `log_bins`) and reports mean and population standard deviation of
/// `y` per non-empty bin.
pub fn bin_series(xs: &[f64], ys: &[f64], bins: usize, log_bins: bool) -> Result<BinnedSeries> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} x values, {} y values", xs.len(), ys.len())));
    }
    if bins == 0 {
        return Err(Error::invalid("need at least one bin"));
    }
    let empty = BinnedSeries { bin_centers: vec![], means: vec![], stds: vec![], counts: vec![] };
    if xs.is_empty() {
        return Ok(empty);
    }
    if log_bins && xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::invalid("logarithmic bins need positive x"));
    }
    let fwd = |x: f64| if log_bins { x.ln() } else { x };
    let inv = |u: f64| if log_bins { u.exp() } else { u };
    let lo = xs.iter().map(|&x| fwd(x)).fold(f64::INFINITY, f64::min);
    let hi = xs.iter().map(|&x| fwd(x)).fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for (&x, &y) in xs.iter().zip(ys) {
        let k = (((fwd(x) - lo) / width) as usize).min(bins - 1);
        members[k].push(y);
    }
    let mut out = empty;
    for (k, ys) in members.iter().enumerate() {
        if ys.is_empty() {
            continue;
        }
        let n = ys.len() as f64;
        let mean = ys.iter().sum::<f64>() / n;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
        out.bin_centers.push(inv(lo + (k as f64 + 0.5) * width));
        out.means.push(mean);
        out.stds.push(var.sqrt());
        out.counts.push(ys.len());
    }
    Ok(out)
}

/// Fit of `y = a x^{-b}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLaw> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} x values, {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 3 {
        return Err(Error::invalid("power-law fit needs at least 3 points"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("power-law fit needs positive finite values"));
    }
    let u: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let v: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = u.len() as f64;
    let (mu, mv) = (u.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
    let suu: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
    if suu == 0.0 {
        return Err(Error::invalid("power-law fit needs distinct x values"));
    }
    let suv: f64 = u.iter().zip(&v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    let svv: f64 = v.iter().map(|b| (b - mv).powi(2)).sum();
    let slope = suv / suu;
    let intercept = mv - slope * mu;
    let sse: f64 = u.iter().zip(&v).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if svv == 0.0 { 1.0 } else { 1.0 - sse / svv };
    Ok(PowerLaw { a: intercept.exp(), b: -slope, r2 })
}

/// Runs `repeats` trials at each `n_pos`, then bins the mean absolute
/// error against the chosen axis.
///
/// Trial `k` (in row-major `(n_pos, repeat)` order) uses seed
/// `derive_seed(base.seed, k)`. Bins are logarithmic in `x`.
pub fn sweep_scaling<T: Real>(
    base: &TrialSpec<T>,
    n_pos_list: &[usize],
    repeats: usize,
    axis: SweepAxis,
    bins: usize,
) -> Result<SweepResult> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    base.validate()?;
    let jobs: Vec<(usize, usize, u64)> = n_pos_list
        .iter()
        .flat_map(|&n| (0..repeats).map(move |r| (n, r)))
        .enumerate()
        .map(|(k, (n, r))| (n, r, derive_seed(base.seed, k as u64)))
        .collect();
    let raw = parallel_map(&jobs, |&(n_pos, repeat, seed)| {
        let mut spec = base.clone();
        spec.n_pos = n_pos;
        spec.seed = seed;
        let res = run_trial(&spec)?;
        log::debug!("sweep n_pos={n_pos} repeat={repeat} err={:.3e}", res.mean_abs_error);
        Ok(SweepPoint {
            n_pos,
            repeat,
            seed,
            runtime: res.runtime_metric,
            t_max: res.t_max,
            mean_abs_error: res.mean_abs_error,
            iterations: res.iterations,
            converged: res.converged,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = raw.iter().map(|p| p.x(axis)).collect();
    let ys: Vec<f64> = raw.iter().map(|p| p.mean_abs_error).collect();
    let binned = bin_series(&xs, &ys, bins, true)?;
    Ok(SweepResult { axis, binned, raw })
}

impl SweepResult {
    /// Re-bins the same raw trials against another axis.
    pub fn rebin(&self, axis: SweepAxis, bins: usize) -> Result<SweepResult> {
        let xs: Vec<f64> = self.raw.iter().map(|p| p.x(axis)).collect();
        let ys: Vec<f64> = self.raw.iter().map(|p| p.mean_abs_error).collect();
        Ok(SweepResult { axis, binned: bin_series(&xs, &ys, bins, true)?, raw: self.raw.clone() })
    }

    /// Power law through the binned means.
    pub fn fit(&self) -> Result<PowerLaw> {
        fit_power_law(&self.binned.bin_centers, &self.binned.means)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{rng_from_seed, SparseSpectrum};
    use rand::Rng;

    #[test]
    fn exact_power_laws() {
        let xs = [1.0, 2.0, 5.0, 10.0, 40.0];
        let f = fit_power_law(&xs, &xs.map(|x| 2.0 / x)).unwrap();
        assert!((f.a - 2.0).abs() < 1e-12 && (f.b - 1.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        let f = fit_power_law(&xs, &xs.map(|x| 3.0 / (x * x))).unwrap();
        assert!((f.a - 3.0).abs() < 1e-12 && (f.b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = rng_from_seed(5);
        let xs: Vec<f64> = (1..=50).map(|k| 10.0 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.7 * x.powf(-1.5) * (1.0 + 0.01 * (2.0 * rng.random::<f64>() - 1.0))).collect();
        assert!((fit_power_law(&xs, &ys).unwrap().b - 1.5).abs() < 0.05);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]).is_err());
        assert!(fit_power_law(&[1.0, -2.0, 3.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn binning_bookkeeping() {
        let mut rng = rng_from_seed(9);
        let xs: Vec<f64> = (0..300).map(|_| 10f64.powf(1.0 + 3.0 * rng.random::<f64>())).collect();
        let ys: Vec<f64> = (0..300).map(|_| rng.random()).collect();
        let b = bin_series(&xs, &ys, 20, true).unwrap();
        assert_eq!(b.counts.iter().sum::<usize>(), 300);
        assert!(b.counts.iter().all(|&c| c >= 1));
        // Independent pass with explicit bin edges.
        let (lo, hi) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(0.0, f64::max));
        let edges: Vec<f64> = (0..=20).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / 20.0).exp()).collect();
        let mut i = 0;
        for k in 0..20 {
            let sel: Vec<f64> = xs
                .iter()
                .zip(&ys)
                .filter(|(&x, _)| x >= edges[k] && (x < edges[k + 1] || k == 19))
                .map(|(_, &y)| y)
                .collect();
            if sel.is_empty() {
                continue;
            }
            let m = sel.iter().sum::<f64>() / sel.len() as f64;
            let sd = (sel.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / sel.len() as f64).sqrt();
            assert_eq!(b.counts[i], sel.len());
            assert!((b.means[i] - m).abs() < 1e-12 && (b.stds[i] - sd).abs() < 1e-12);
            i += 1;
        }
        assert_eq!(i, b.counts.len());
    }

    #[test]
    fn empty_bins_are_dropped() {
        let b = bin_series(&[1.0, 1.1, 100.0], &[1.0, 3.0, 5.0], 20, true).unwrap();
        assert_eq!(b.counts, vec![2, 1]);
        assert_eq!(b.means, vec![2.0, 5.0]);
    }

    #[test]
    fn saturated_sweep_is_flat_and_reproducible() {
        let spectrum = SparseSpectrum::<f64>::from_pairs(&[(0.25, 1.0)]).unwrap();
        let mut base = TrialSpec::new(spectrum, 16, 1, 1);
        base.samples = Some(17);
        let a = sweep_scaling(&base, &[16, 20, 24], 2, SweepAxis::TMax, 20).unwrap();
        assert_eq!(a.raw.len(), 6);
        assert!(a.binned.means.iter().all(|&m| m < 1e-8), "{:?}", a.binned.means);
        assert!(a.raw.iter().all(|p| p.t_max <= p.n_pos as f64));
        let b = sweep_scaling(&base, &[16, 20, 24], 2, SweepAxis::TMax, 20).unwrap();
        assert_eq!(a, b);
        let seeds: std::collections::HashSet<u64> = a.raw.iter().map(|p| p.seed).collect();
        assert_eq!(seeds.len(), 6);
    }
}
