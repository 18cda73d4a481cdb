//! Single-snapshot MUSIC on the Hankel matrix of a recovered signal, plus a
//! zero-padded FFT baseline.
//!
//! Frequencies follow the synthesis convention `x[k] ~ exp(-i 2π ω k)` with
//! `ω ∈ [0, 1)`.

use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifted::krylov::{partial_eigen, EigenOptions, HermitianOperator, Selection};
use crate::lifted::{hankel_from_signal, hankel_shape};
use crate::scalar::{CMat, Real, C};

/// Hankel row count above which [`subspace_split`] switches from a full SVD
/// to an FFT-applied Krylov solve for the leading singular vectors.
pub const DENSE_SPLIT_MAX: usize = 256;

#[inline]
fn zero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// Signal/noise decomposition of the Hankel column space.
///
/// Only the leading left singular vectors are stored; the noise projector
/// `P_N = I - U_s U_s^H` is applied implicitly (see [`Self::noise_projector`]
/// for the dense matrix).
#[derive(Debug, Clone)]
pub struct SubspaceSplit<T: Real> {
    rows: usize,
    /// Leading left singular vectors (at least `s_signal` columns).
    pub left_singular_vectors: CMat<T>,
    /// Singular values, descending. Complete for the dense route; the
    /// leading few for the Krylov route.
    pub singular_values: Vec<T>,
    pub s_signal: usize,
}

impl<T: Real> SubspaceSplit<T> {
    /// Hankel row count `p`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn signal_basis(&self) -> CMat<T> {
        self.left_singular_vectors.columns(0, self.s_signal).into_owned()
    }

    /// Dense `p x p` noise projector.
    pub fn noise_projector(&self) -> CMat<T> {
        let u = self.signal_basis();
        CMat::<T>::identity(self.rows, self.rows) - &u * u.adjoint()
    }

    /// `||P_N a||^2` for an arbitrary vector of length `p`.
    pub fn noise_energy(&self, a: &[C<T>]) -> T {
        let total = a.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
        let signal = (0..self.s_signal).fold(T::zero(), |acc, i| {
            let c = self.left_singular_vectors.column(i).iter().zip(a).fold(zero(), |s, (u, x)| s + u.conj() * x);
            acc + c.norm_sqr()
        });
        (total - signal).max(T::zero())
    }
}

/// Gram operator `W W^H` of the Hankel matrix of `x`, applied by FFT.
struct HankelGram<T: Real> {
    p: usize,
    q: usize,
    len: usize,
    x_hat: Vec<C<T>>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> HankelGram<T> {
    fn new(x: &[C<T>]) -> Self {
        let (p, q) = hankel_shape(x.len());
        let len = (x.len() + p.max(q)).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut x_hat = vec![zero(); len];
        x_hat[..x.len()].copy_from_slice(x);
        fwd.process(&mut x_hat);
        Self { p, q, len, x_hat, fwd, inv }
    }

    /// `out[j] = sum_k x[j + k] v[k]` for `j < out.len()`; `v` is reversed
    /// into a convolution kernel.
    fn correlate(&self, v: &[C<T>], out: &mut [C<T>]) {
        let m = v.len();
        let mut buf = vec![zero(); self.len];
        for (i, vi) in v.iter().enumerate() {
            buf[m - 1 - i] = *vi;
        }
        self.fwd.process(&mut buf);
        for (b, xh) in buf.iter_mut().zip(&self.x_hat) {
            *b *= xh;
        }
        self.inv.process(&mut buf);
        let scale = T::one() / T::from_usize_lossy(self.len);
        for (j, o) in out.iter_mut().enumerate() {
            *o = buf[j + m - 1] * scale;
        }
    }
}

impl<T: Real> HermitianOperator<T> for HankelGram<T> {
    fn dim(&self) -> usize {
        self.p
    }

    fn apply(&self, u: &[C<T>], y: &mut [C<T>]) {
        // W^H u = conj(W^T conj(u)), and W^T = W for the index pattern x[j+k].
        let cu: Vec<C<T>> = u.iter().map(|v| v.conj()).collect();
        let mut w = vec![zero(); self.q];
        self.correlate(&cu, &mut w);
        w.iter_mut().for_each(|v| *v = v.conj());
        self.correlate(&w, y);
    }
}

/// Hankel SVD split with a signal subspace of dimension `s`.
pub fn subspace_split<T: Real>(x_star: &[C<T>], s: usize) -> Result<SubspaceSplit<T>> {
    if s == 0 {
        return Err(Error::invalid("model order must be at least 1"));
    }
    if x_star.len() < 3 {
        return Err(Error::SignalTooShort(x_star.len()));
    }
    let (p, _) = hankel_shape(x_star.len());
    if p <= s {
        return Err(Error::ModelOrderTooLarge { rows: p, order: s });
    }
    if p <= DENSE_SPLIT_MAX {
        let w = hankel_from_signal(x_star)?;
        let svd = w.svd(true, false);
        let u = svd.u.expect("requested U");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .partial_cmp(&svd.singular_values[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let k = order.len();
        let mut vectors = DMatrix::from_fn(p, k, |r, c| u[(r, order[c])]);
        let mut values: Vec<T> = order.iter().map(|&i| svd.singular_values[i]).collect();
        if k < p {
            // Even lengths give q = p - 1, so the thin SVD is one column short.
            vectors = complete_basis(vectors);
            values.resize(p, T::zero());
        }
        return Ok(SubspaceSplit { rows: p, left_singular_vectors: vectors, singular_values: values, s_signal: s });
    }
    let gram = HankelGram::new(x_star);
    let want = (s + 4).min(p);
    let eig = partial_eigen(&gram, Selection::LargestMagnitude(want), None, &EigenOptions::default())?;
    let values = eig.values.iter().map(|&l| l.max(T::zero()).sqrt()).collect();
    Ok(SubspaceSplit { rows: p, left_singular_vectors: eig.vectors, singular_values: values, s_signal: s })
}

/// Extends orthonormal columns to a full unitary basis.
fn complete_basis<T: Real>(cols: CMat<T>) -> CMat<T> {
    let p = cols.nrows();
    let mut basis: Vec<Vec<C<T>>> = cols.column_iter().map(|c| c.iter().copied().collect()).collect();
    for e in 0..p {
        if basis.len() == p {
            break;
        }
        let mut v = vec![zero(); p];
        v[e] = C::new(T::one(), T::zero());
        for _ in 0..2 {
            for b in &basis {
                let c = b.iter().zip(&v).fold(zero(), |acc, (x, y)| acc + x.conj() * y);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= bi * c;
                }
            }
        }
        let n = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if n > T::lit(1e-8) {
            v.iter_mut().for_each(|z| *z /= n);
            basis.push(v);
        }
    }
    DMatrix::from_fn(p, basis.len(), |r, c| basis[c][r])
}

/// Floor on the imaging-function denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-30;

fn steering<T: Real>(omega: T, p: usize) -> Vec<C<T>> {
    (0..p as i64).map(|k| crate::scalar::atom(omega, k)).collect()
}

/// `J(ω) = ||a(ω)||^2 / ||P_N a(ω)||^2` at arbitrary frequencies.
pub fn imaging_function<T: Real>(split: &SubspaceSplit<T>, omega_grid: &[T]) -> Vec<T> {
    let p = split.rows();
    let floor = T::lit(DENOMINATOR_FLOOR);
    omega_grid
        .iter()
        .map(|&w| {
            let a = steering(w, p);
            T::from_usize_lossy(p) / split.noise_energy(&a).max(floor)
        })
        .collect()
}

/// `J` on the uniform grid `ω_j = j / g`, using one FFT per signal vector.
fn imaging_on_uniform_grid<T: Real>(split: &SubspaceSplit<T>, g: usize) -> Vec<T> {
    let p = split.rows();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(g);
    let mut signal = vec![T::zero(); g];
    for i in 0..split.s_signal {
        // u^H a(ω_j) = sum_k conj(u_k) exp(-i 2π j k / g).
        let mut buf = vec![zero(); g];
        for (k, u) in split.left_singular_vectors.column(i).iter().enumerate() {
            buf[k % g] += u.conj();
        }
        fft.process(&mut buf);
        for (acc, b) in signal.iter_mut().zip(&buf) {
            *acc += b.norm_sqr();
        }
    }
    let pf = T::from_usize_lossy(p);
    let floor = T::lit(DENOMINATOR_FLOOR);
    signal.into_iter().map(|sg| pf / (pf - sg).max(floor)).collect()
}

/// Peak-search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Grid points per signal sample.
    pub oversample: usize,
    /// A local maximum counts as resolved when its `J` exceeds this multiple
    /// of the median of `J`.
    pub min_peak_ratio: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { oversample: 100, min_peak_ratio: 10.0 }
    }
}

/// Imaging-function samples, detected peaks and refined frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ImagingResult<T: Real> {
    pub grid: Vec<T>,
    pub j: Vec<T>,
    /// `(omega, J)` of the selected grid peaks, strongest first.
    pub peaks: Vec<(T, T)>,
    /// Refined frequencies, ascending.
    pub refined: Vec<T>,
    /// Fewer than `s` resolved peaks were found.
    pub under_resolved: bool,
}

impl<T: Real> ImagingResult<T> {
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "omega,J")?;
        for (w, j) in self.grid.iter().zip(&self.j) {
            writeln!(out, "{:.12e},{:.12e}", w.as_f64(), j.as_f64())?;
        }
        Ok(())
    }
}

/// Minimizes `f` on `[a, b]` by golden-section search.
fn golden_min<T: Real>(mut a: T, mut b: T, f: impl Fn(T) -> T) -> T {
    let r = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let tol = T::lit(1e-14).max(T::eps() * T::lit(4.0));
    for _ in 0..200 {
        if (b - a).magnitude() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / T::lit(2.0)
}

fn wrap_unit<T: Real>(w: T) -> T {
    let f = w.as_f64().rem_euclid(1.0);
    T::lit(if f >= 1.0 { 0.0 } else { f })
}

/// Circular local maxima `(index, value)` sorted by descending value, ties
/// broken by lower index.
fn local_maxima<T: Real>(j: &[T]) -> Vec<(usize, T)> {
    let g = j.len();
    let mut peaks: Vec<(usize, T)> = (0..g)
        .filter(|&i| {
            let l = j[(i + g - 1) % g];
            let r = j[(i + 1) % g];
            j[i] > l && j[i] >= r
        })
        .map(|i| (i, j[i]))
        .collect();
    peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    peaks
}

/// MUSIC frequency estimates: grid search, then golden-section refinement
/// of each of the `s` strongest peaks within one grid cell.
pub fn detect_frequencies<T: Real>(x_star: &[C<T>], s: usize, cfg: &GridConfig) -> Result<ImagingResult<T>> {
    if cfg.oversample == 0 {
        return Err(Error::invalid("oversample must be at least 1"));
    }
    let split = subspace_split(x_star, s)?;
    let g = cfg.oversample * x_star.len();
    let j = imaging_on_uniform_grid(&split, g);
    let grid: Vec<T> = (0..g).map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(g)).collect();

    let maxima = local_maxima(&j);
    let mut sorted = j.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median = sorted[g / 2];
    let resolved = maxima.iter().filter(|(_, v)| v.as_f64() >= cfg.min_peak_ratio * median.as_f64()).count();

    let cell = T::one() / T::from_usize_lossy(g);
    let p = split.rows();
    let peaks: Vec<(T, T)> = maxima.iter().take(s).map(|&(i, v)| (grid[i], v)).collect();
    let mut refined: Vec<T> = peaks
        .iter()
        .map(|&(w0, _)| {
            let w = golden_min(w0 - cell, w0 + cell, |w| split.noise_energy(&steering(w, p)));
            wrap_unit(w)
        })
        .collect();
    refined.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ImagingResult { grid, j, peaks, refined, under_resolved: resolved < s })
}

/// Advisory model-order report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectabilityReport {
    /// Largest `s` with `sigma_s >= factor * 2 * ||E||`.
    pub s_max: usize,
    /// Number of singular values before the largest consecutive ratio drop.
    pub drop_after: usize,
}

/// Detectability from a descending singular-value list.
pub fn detectability_from_values<T: Real>(sigma: &[T], noise_hankel_norm: T, factor: T) -> Result<DetectabilityReport> {
    if noise_hankel_norm < T::zero() {
        return Err(Error::invalid("noise norm must be non-negative"));
    }
    let threshold = if noise_hankel_norm == T::zero() {
        T::lit(1e-12)
    } else {
        factor * T::lit(2.0) * noise_hankel_norm
    };
    let s_max = sigma.iter().take_while(|&&v| v >= threshold && v > T::zero()).count();
    let mut drop_after = 0;
    let mut best = T::zero();
    for (i, w) in sigma.windows(2).enumerate() {
        let ratio = if w[1] > T::zero() { w[0] / w[1] } else { T::lit(f64::INFINITY) };
        if ratio > best {
            best = ratio;
            drop_after = i + 1;
        }
    }
    Ok(DetectabilityReport { s_max, drop_after })
}

/// Default "much greater than" factor for the detectability test.
pub const DETECTABILITY_FACTOR: f64 = 10.0;

pub fn detectability_report<T: Real>(split: &SubspaceSplit<T>, noise_hankel_norm: T) -> Result<DetectabilityReport> {
    detectability_from_values(&split.singular_values, noise_hankel_norm, T::lit(DETECTABILITY_FACTOR))
}

/// Spectral norm of the Hankel matrix of `e`.
pub fn hankel_spectral_norm<T: Real>(e: &[C<T>]) -> Result<T> {
    if e.len() < 3 {
        return Err(Error::SignalTooShort(e.len()));
    }
    if e.iter().all(|v| v.norm_sqr() == T::zero()) {
        return Ok(T::zero());
    }
    let gram = HankelGram::new(e);
    let opts = EigenOptions { tol: T::lit(1e-8), ..EigenOptions::default() };
    let eig = partial_eigen(&gram, Selection::LargestMagnitude(1), None, &opts)?;
    Ok(eig.values[0].max(T::zero()).sqrt())
}

/// Zero-padded FFT peak picking at bin resolution.
pub fn fft_baseline<T: Real>(x_star: &[C<T>], s: usize, zero_pad_factor: usize) -> Result<Vec<T>> {
    if zero_pad_factor == 0 {
        return Err(Error::invalid("zero-pad factor must be at least 1"));
    }
    if x_star.is_empty() || s == 0 {
        return Err(Error::invalid("need a non-empty signal and s >= 1"));
    }
    let len = x_star.len() * zero_pad_factor;
    let mut buf = vec![zero(); len];
    buf[..x_star.len()].copy_from_slice(x_star);
    // exp(-i 2π ω k) peaks at bin ω·len under the inverse (e^{+i}) transform.
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let mag: Vec<T> = buf.iter().map(|b| b.norm_sqr()).collect();
    let mut out: Vec<T> = local_maxima(&mag)
        .into_iter()
        .take(s)
        .map(|(i, _)| T::from_usize_lossy(i) / T::from_usize_lossy(len))
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::atom;

    fn signal(lines: &[(f64, f64)], len: usize) -> Vec<C<f64>> {
        (0..len as i64).map(|k| lines.iter().map(|&(w, c)| atom(w, k) * c).sum()).collect()
    }

    #[test]
    fn split_rank_one_and_projector() {
        let x = signal(&[(0.31, 1.0)], 41);
        let sp = subspace_split(&x, 1).unwrap();
        assert!(sp.singular_values[1] <= 1e-10 * sp.singular_values[0]);
        let pn = sp.noise_projector();
        assert!(crate::scalar::frobenius(&(&pn * &pn - &pn)) < 1e-10);
        assert!(crate::scalar::frobenius(&(&pn - pn.adjoint())) < 1e-12);
        let u0: Vec<C<f64>> = sp.left_singular_vectors.column(0).iter().copied().collect();
        assert!(sp.noise_energy(&u0) < 1e-20);
        assert!(matches!(subspace_split(&x[..5], 3), Err(Error::ModelOrderTooLarge { rows: 3, order: 3 })));
    }

    #[test]
    fn krylov_split_matches_dense() {
        let x = signal(&[(0.1, 0.5), (0.4, 0.3), (0.77, 0.2)], 2 * DENSE_SPLIT_MAX + 21);
        let big = subspace_split(&x, 3).unwrap();
        let w = hankel_from_signal(&x).unwrap();
        let mut sv: Vec<f64> = w.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for i in 0..3 {
            assert!((big.singular_values[i] - sv[i]).abs() < 1e-8 * sv[0]);
        }
        let a = steering(0.4, big.rows());
        assert!(big.noise_energy(&a) < 1e-12 * big.rows() as f64);
    }

    #[test]
    fn imaging_identity_projector_is_one() {
        let sp = SubspaceSplit::<f64> {
            rows: 6,
            left_singular_vectors: DMatrix::zeros(6, 1),
            singular_values: vec![0.0; 6],
            s_signal: 1,
        };
        let j = imaging_function(&sp, &[0.0, 0.13, 0.5]);
        assert!(j.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn uniform_grid_matches_direct_evaluation() {
        let x = signal(&[(0.2, 0.6), (0.55, 0.4)], 31);
        let mut x = x;
        x[3] += C::new(0.01, -0.02);
        let sp = subspace_split(&x, 2).unwrap();
        let g = 97;
        let fast = imaging_on_uniform_grid(&sp, g);
        let grid: Vec<f64> = (0..g).map(|i| i as f64 / g as f64).collect();
        let slow = imaging_function(&sp, &grid);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-8 * b.abs(), "{a} vs {b}");
        }
        assert!(slow.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn single_line_argmax_within_a_cell() {
        let w0 = 0.123456;
        let x = signal(&[(w0, 1.0)], 25);
        let sp = subspace_split(&x, 1).unwrap();
        let grid: Vec<f64> = (0..10_000).map(|i| i as f64 / 1e4).collect();
        let j = imaging_function(&sp, &grid);
        let best = (0..grid.len()).max_by(|&a, &b| j[a].partial_cmp(&j[b]).unwrap()).unwrap();
        assert!((grid[best] - w0).abs() <= 1e-4);
    }

    #[test]
    fn super_resolves_close_pair() {
        let x = signal(&[(0.2, 0.5), (0.21, 0.5)], 401);
        let r = detect_frequencies(&x, 2, &GridConfig::default()).unwrap();
        assert!((r.refined[0] - 0.2).abs() <= 1e-4 && (r.refined[1] - 0.21).abs() <= 1e-4, "{:?}", r.refined);
        assert!(!r.under_resolved);
    }

    #[test]
    fn constant_signal_is_dc() {
        let x = vec![C::new(1.0, 0.0); 21];
        let r = detect_frequencies(&x, 1, &GridConfig::default()).unwrap();
        assert!(r.refined[0] < 1e-6 || r.refined[0] > 1.0 - 1e-6, "{:?}", r.refined);
    }

    #[test]
    fn noiseless_lines_to_high_accuracy() {
        let lines = [(0.05, 0.3), (0.3, 0.3), (0.31, 0.2), (0.8, 0.2)];
        let x = signal(&lines, 401);
        let r = detect_frequencies(&x, 4, &GridConfig::default()).unwrap();
        for (est, &(w, _)) in r.refined.iter().zip(&lines) {
            assert!((est - w).abs() <= 1e-5, "{est} vs {w}");
        }
    }

    #[test]
    fn global_phase_invariance() {
        let x = signal(&[(0.2, 0.5), (0.6, 0.5)], 41);
        let y: Vec<C<f64>> = x.iter().map(|v| v * C::from_polar(1.0, 0.7)).collect();
        let a = detect_frequencies(&x, 2, &GridConfig::default()).unwrap();
        let b = detect_frequencies(&y, 2, &GridConfig::default()).unwrap();
        for (p, q) in a.refined.iter().zip(&b.refined) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn close_lines_in_short_signal_are_under_resolved() {
        // Four strong lines well inside one Rayleigh length plus a weak
        // dense background.
        let mut lines = vec![(0.2, 0.2), (0.203, 0.2), (0.206, 0.2), (0.209, 0.2)];
        lines.extend((0..20).map(|i| (0.4 + 0.025 * i as f64, 0.01)));
        let short = detect_frequencies(&signal(&lines, 21), 4, &GridConfig::default()).unwrap();
        assert!(short.under_resolved);
        let mut wide = vec![(0.2, 0.2), (0.25, 0.2), (0.3, 0.2), (0.35, 0.2)];
        wide.extend((0..20).map(|i| (0.4 + 0.025 * i as f64, 0.01)));
        let long = detect_frequencies(&signal(&wide, 201), 4, &GridConfig::default()).unwrap();
        assert!(!long.under_resolved);
    }

    #[test]
    fn detectability_examples() {
        let s = [10.0, 9.0, 0.01, 0.009];
        let r = detectability_from_values(&s, 0.001, 10.0).unwrap();
        assert_eq!(r, DetectabilityReport { s_max: 2, drop_after: 2 });
        let r = detectability_from_values(&[1.0, 1e-3, 1e-13], 0.0, 10.0).unwrap();
        assert_eq!(r.s_max, 2);
        assert!(detectability_from_values(&s, -1.0, 10.0).is_err());
    }

    #[test]
    fn hankel_norm_of_noise() {
        let e: Vec<C<f64>> = (0..301).map(|k| C::new(((k * 37) % 11) as f64 - 5.0, ((k * 13) % 7) as f64 - 3.0)).collect();
        let w = hankel_from_signal(&e).unwrap();
        let dense = w.singular_values().iter().copied().fold(0.0, f64::max);
        assert!((hankel_spectral_norm(&e).unwrap() - dense).abs() < 1e-6 * dense);
    }

    #[test]
    fn fft_baseline_cases() {
        let x = signal(&[(10.0 / 64.0, 1.0)], 64);
        assert_eq!(fft_baseline(&x, 1, 1).unwrap(), vec![10.0 / 64.0]);
        let w = 10.5 / 64.0;
        let x = signal(&[(w, 1.0)], 64);
        let est = fft_baseline(&x, 1, 1).unwrap()[0];
        assert!((est - w).abs() <= 0.5 / 64.0 + 1e-12);
        assert!(fft_baseline(&x, 1, 0).is_err());
    }
}
