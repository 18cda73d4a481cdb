//! Sparse spectra, exact autocorrelation synthesis, shot-noise emulation,
//! random sample sets and the sampling/shot budget formulas.

use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{atom, Real, C};

/// Seeded random stream used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's random stream from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}

/// Derives an independent per-trial seed from a master seed (splitmix64).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One spectral line: normalized frequency in `[0, 1)` and weight `|c|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Component<T: Real> {
    pub omega: T,
    pub weight: T,
}

/// Ground-truth (or guessed) list of frequencies and weights.
///
/// Components are kept sorted by frequency; weights are non-negative and sum
/// to at most one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct SparseSpectrum<T: Real> {
    components: Vec<Component<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl<T: Real> SparseSpectrum<T> {
    pub fn new(mut components: Vec<Component<T>>, label: Option<String>) -> Result<Self> {
        for c in &components {
            if !(c.omega.as_f64() >= 0.0 && c.omega.as_f64() < 1.0) {
                return Err(Error::invalid(format!(
                    "frequency {} outside [0, 1)",
                    c.omega.as_f64()
                )));
            }
            if !(c.weight.as_f64() >= 0.0) {
                return Err(Error::invalid(format!("negative weight {}", c.weight.as_f64())));
            }
        }
        components.sort_by(|a, b| a.omega.partial_cmp(&b.omega).expect("finite frequencies"));
        if components.windows(2).any(|w| w[0].omega == w[1].omega) {
            return Err(Error::invalid("duplicate frequency"));
        }
        let total: f64 = components.iter().map(|c| c.weight.as_f64()).sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total} > 1")));
        }
        Ok(Self { components, label })
    }

    /// Builds a spectrum from `(omega, weight)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(omega, weight)| Component { omega: T::lit(omega), weight: T::lit(weight) })
                .collect(),
            None,
        )
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn frequencies(&self) -> Vec<T> {
        self.components.iter().map(|c| c.omega).collect()
    }

    pub fn weights(&self) -> Vec<T> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn total_weight(&self) -> T {
        self.components.iter().fold(T::zero(), |a, c| a + c.weight)
    }

    /// Pairs of components closer than `1 / (10 n_total)` on the unit circle,
    /// which a grid of `n_total` points cannot tell apart.
    pub fn aliasing_pairs(&self, n_total: usize) -> Vec<(usize, usize)> {
        let tol = 1.0 / (10.0 * n_total as f64);
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = (self.components[j].omega - self.components[i].omega).as_f64();
                let circ = d.min(1.0 - d);
                if circ < tol {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct SpectrumRepr<T: Real> {
    components: Vec<Component<T>>,
    #[serde(default)]
    label: Option<String>,
}

impl<'de, T: Real> Deserialize<'de> for SparseSpectrum<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpectrumRepr::<T>::deserialize(d)?;
        SparseSpectrum::new(repr.components, repr.label).map_err(serde::de::Error::custom)
    }
}

/// Uniform time grid `t_n = n * dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TimeGrid<T: Real> {
    pub n_pos: usize,
    pub dt: T,
    pub symmetric: bool,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(n_pos: usize, dt: T, symmetric: bool) -> Result<Self> {
        if n_pos == 0 {
            return Err(Error::invalid("grid needs at least one positive-time point"));
        }
        if !(dt > T::zero()) {
            return Err(Error::invalid("dt must be positive"));
        }
        Ok(Self { n_pos, dt, symmetric })
    }

    /// Total number of grid points `N`.
    pub fn len(&self) -> usize {
        if self.symmetric {
            2 * self.n_pos + 1
        } else {
            self.n_pos + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_index(&self) -> i64 {
        if self.symmetric {
            -(self.n_pos as i64)
        } else {
            0
        }
    }

    pub fn last_index(&self) -> i64 {
        self.n_pos as i64
    }

    /// Grid indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.first_index()..=self.last_index()
    }

    /// Storage position of grid index `n`, if it lies on the grid.
    pub fn position(&self, n: i64) -> Option<usize> {
        if n < self.first_index() || n > self.last_index() {
            None
        } else {
            Some((n - self.first_index()) as usize)
        }
    }

    pub fn time(&self, n: i64) -> T {
        T::lit(n as f64) * self.dt
    }

    /// The symmetric grid with the same positive half.
    pub fn symmetrized(&self) -> Self {
        Self { symmetric: true, ..*self }
    }
}

/// How sample values were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    Exact,
    Bernoulli,
    Gaussian,
}

/// Samples of the autocorrelation function on a subset of grid indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SampledSignal<T: Real> {
    pub grid: TimeGrid<T>,
    pub sample_indices: Vec<i64>,
    pub values: Vec<C<T>>,
    pub shots_per_sample: u64,
    pub noise_kind: NoiseKind,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(
        grid: TimeGrid<T>,
        sample_indices: Vec<i64>,
        values: Vec<C<T>>,
        shots_per_sample: u64,
        noise_kind: NoiseKind,
    ) -> Result<Self> {
        if sample_indices.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} indices but {} values",
                sample_indices.len(),
                values.len()
            )));
        }
        if shots_per_sample == 0 {
            return Err(Error::invalid("shots per sample must be at least 1"));
        }
        if sample_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sample indices must be strictly increasing"));
        }
        if let Some(&n) = sample_indices.iter().find(|&&n| grid.position(n).is_none()) {
            return Err(Error::invalid(format!("sample index {n} is off the grid")));
        }
        if noise_kind == NoiseKind::Exact {
            if let Some(v) = values.iter().find(|v| v.norm_sqr().sqrt().as_f64() > 1.0 + 1e-12) {
                return Err(Error::NonPhysicalAmplitude(v.norm_sqr().sqrt().as_f64()));
            }
        }
        Ok(Self { grid, sample_indices, values, shots_per_sample, noise_kind })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Storage positions of the samples on the grid.
    pub fn positions(&self) -> Vec<usize> {
        self.sample_indices
            .iter()
            .map(|&n| self.grid.position(n).expect("validated on construction"))
            .collect()
    }

    /// Zero-filled embedding of the samples into the full grid.
    pub fn embed(&self) -> Vec<C<T>> {
        let mut out = vec![C::new(T::zero(), T::zero()); self.grid.len()];
        for (p, v) in self.positions().into_iter().zip(&self.values) {
            out[p] = *v;
        }
        out
    }

    /// Sampling mask over the full grid.
    pub fn mask(&self) -> Vec<bool> {
        let mut out = vec![false; self.grid.len()];
        for p in self.positions() {
            out[p] = true;
        }
        out
    }

    /// Indices that correspond to actual measurements (the non-negative half).
    pub fn measured_indices(&self) -> Vec<i64> {
        self.sample_indices.iter().copied().filter(|&n| n >= 0).collect()
    }
}

/// Runtime and compression bookkeeping for one measured sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub n_samples: usize,
    pub shots_per_sample: u64,
    pub total_runtime: f64,
    pub compression_factor: f64,
}

impl BudgetReport {
    /// `measured` are the positive-axis indices that were actually sampled;
    /// the compression factor is taken against the full reconstructed grid.
    pub fn new<T: Real>(measured: &[i64], shots: u64, grid: &TimeGrid<T>) -> Self {
        Self {
            n_samples: measured.len(),
            shots_per_sample: shots,
            total_runtime: runtime_metric(measured, shots, grid.dt.as_f64()),
            compression_factor: measured.len() as f64 / grid.len() as f64,
        }
    }
}

/// Exact autocorrelation `z(n) = sum_i w_i exp(-i 2π ω_i n)` on every grid point.
pub fn synthesize<T: Real>(spectrum: &SparseSpectrum<T>, grid: &TimeGrid<T>) -> Result<Vec<C<T>>> {
    if spectrum.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if !spectrum.aliasing_pairs(grid.len()).is_empty() {
        log::warn!("spectrum has components closer than 1/(10N); they alias on this grid");
    }
    Ok(grid
        .indices()
        .map(|n| {
            spectrum
                .components()
                .iter()
                .fold(C::new(T::zero(), T::zero()), |acc, c| acc + atom(c.omega, n) * c.weight)
        })
        .collect())
}

fn bernoulli_mean(part: f64, shots: u64, rng: &mut Rng) -> f64 {
    let p = ((1.0 + part) / 2.0).clamp(0.0, 1.0);
    let ones = Binomial::new(shots, p).expect("p in [0,1]").sample(rng);
    2.0 * ones as f64 / shots as f64 - 1.0
}

/// Emulates a Hadamard-test estimate of `z_exact` from `shots` measurements
/// per quadrature.
pub fn hadamard_sample<T: Real>(z_exact: C<T>, shots: u64, kind: NoiseKind, rng: &mut Rng) -> Result<C<T>> {
    let amp = z_exact.norm_sqr().sqrt().as_f64();
    if amp > 1.0 + 1e-9 {
        return Err(Error::NonPhysicalAmplitude(amp));
    }
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let (re, im) = (z_exact.re.as_f64(), z_exact.im.as_f64());
    let (re, im) = match kind {
        NoiseKind::Exact => (re, im),
        NoiseKind::Bernoulli => (bernoulli_mean(re, shots, rng), bernoulli_mean(im, shots, rng)),
        NoiseKind::Gaussian => {
            let normal = Normal::new(0.0, 1.0 / (shots as f64).sqrt()).expect("positive std");
            (re + normal.sample(rng), im + normal.sample(rng))
        }
    };
    Ok(C::new(T::lit(re), T::lit(im)))
}

/// Draws `m` distinct indices from `{0, ..., n_pos}`, sorted ascending.
///
/// With `force_zero`, index 0 is always part of the set and the remaining
/// `m - 1` indices are drawn from `{1, ..., n_pos}`.
pub fn draw_sample_set(n_pos: usize, m: usize, force_zero: bool, rng: &mut Rng) -> Result<Vec<i64>> {
    if m == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    if m > n_pos + 1 {
        return Err(Error::Oversampled { requested: m, available: n_pos + 1 });
    }
    let mut out: Vec<i64> = if force_zero {
        let rest = rand::seq::index::sample(rng, n_pos, m - 1);
        std::iter::once(0).chain(rest.iter().map(|i| i as i64 + 1)).collect()
    } else {
        rand::seq::index::sample(rng, n_pos + 1, m).iter().map(|i| i as i64).collect()
    };
    out.sort_unstable();
    Ok(out)
}

/// Constants of the probabilistic sample bound `m >= C max{log²(N/δ), s log(s/δ) log(N/δ)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBound {
    pub constant: f64,
    pub failure_probability: f64,
}

fn sparsity_factor(s: usize) -> f64 {
    let s = s as f64;
    (s * s.ln()).max(1.0)
}

/// Number of random samples for an `s`-sparse signal on `n_total` points.
///
/// Without `bound`, this is the practical rule `ceil(max(s ln s, 1) ln N)`.
pub fn required_samples(s: usize, n_total: usize, bound: Option<SampleBound>) -> Result<usize> {
    if s == 0 || n_total < 2 {
        return Err(Error::invalid("need s >= 1 and N >= 2"));
    }
    let n = n_total as f64;
    let m = match bound {
        None => sparsity_factor(s) * n.ln(),
        Some(SampleBound { constant, failure_probability: delta }) => {
            if !(delta > 0.0 && delta < 1.0) || !(constant > 0.0) {
                return Err(Error::invalid("bound needs C > 0 and 0 < δ < 1"));
            }
            let s = s as f64;
            let ln_n = (n / delta).ln();
            constant * (ln_n * ln_n).max(s * (s / delta).ln() * ln_n)
        }
    };
    Ok(m.ceil() as usize)
}

/// Shots per sample: `ceil(sqrt(max(s ln s, 1) N ln N))`.
pub fn required_shots(s: usize, n_total: usize) -> Result<u64> {
    if s == 0 || n_total < 2 {
        return Err(Error::invalid("need s >= 1 and N >= 2"));
    }
    let n = n_total as f64;
    Ok((sparsity_factor(s) * n * n.ln()).sqrt().ceil() as u64)
}

/// Mirrors positive-axis samples onto the symmetric grid using `z(-n) = conj(z(n))`.
pub fn extend_hermitian<T: Real>(positive: &SampledSignal<T>) -> Result<SampledSignal<T>> {
    if positive.grid.symmetric {
        return Err(Error::AlreadyExtended);
    }
    let mut pairs: Vec<(i64, C<T>)> = Vec::with_capacity(2 * positive.len());
    for (&n, &v) in positive.sample_indices.iter().zip(&positive.values) {
        pairs.push((n, v));
        if n > 0 {
            pairs.push((-n, v.conj()));
        }
    }
    pairs.sort_by_key(|p| p.0);
    let (idx, vals) = pairs.into_iter().unzip();
    SampledSignal::new(
        positive.grid.symmetrized(),
        idx,
        vals,
        positive.shots_per_sample,
        positive.noise_kind,
    )
}

/// Total runtime `M * sum |n dt|` over the measured indices.
pub fn runtime_metric(sample_indices: &[i64], shots: u64, dt: f64) -> f64 {
    shots as f64 * sample_indices.iter().map(|&n| (n as f64 * dt).abs()).sum::<f64>()
}

/// Samples `spectrum` at `indices` (positive axis) with the requested noise.
pub fn measure<T: Real>(
    spectrum: &SparseSpectrum<T>,
    grid: &TimeGrid<T>,
    indices: &[i64],
    shots: u64,
    kind: NoiseKind,
    rng: &mut Rng,
) -> Result<SampledSignal<T>> {
    if grid.symmetric {
        return Err(Error::invalid("measurements are taken on the positive axis"));
    }
    let full = synthesize(spectrum, grid)?;
    let values = indices
        .iter()
        .map(|&n| {
            let p = grid.position(n).ok_or_else(|| Error::invalid(format!("index {n} off grid")))?;
            hadamard_sample(full[p], shots, kind, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledSignal::new(*grid, indices.to_vec(), values, shots, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(pairs: &[(f64, f64)]) -> SparseSpectrum<f64> {
        SparseSpectrum::from_pairs(pairs).unwrap()
    }

    #[test]
    fn zero_frequency_is_constant() {
        let g = TimeGrid::new(7, 1.0, true).unwrap();
        let z = synthesize(&spec(&[(0.0, 1.0)]), &g).unwrap();
        assert!(z.iter().all(|v| (v - C::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn synthesize_values() {
        let g = TimeGrid::new(3, 1.0, false).unwrap();
        let z = synthesize(&spec(&[(0.25, 0.5), (0.75, 0.5)]), &g).unwrap();
        assert!((z[0] - C::new(1.0, 0.0)).norm() < 1e-15);
        let z = synthesize(&spec(&[(0.25, 1.0)]), &g).unwrap();
        assert!((z[1] - C::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn synthesize_hermitian_on_symmetric_grid() {
        let g = TimeGrid::new(20, 0.5, true).unwrap();
        let z = synthesize(&spec(&[(0.1, 0.3), (0.37, 0.6)]), &g).unwrap();
        for n in 1..=20i64 {
            let a = z[g.position(n).unwrap()];
            let b = z[g.position(-n).unwrap()];
            assert_eq!(a, b.conj());
        }
    }

    #[test]
    fn empty_spectrum_rejected() {
        let g = TimeGrid::<f64>::new(3, 1.0, false).unwrap();
        let s = SparseSpectrum::<f64>::new(vec![], None).unwrap();
        assert_eq!(synthesize(&s, &g), Err(Error::EmptySpectrum));
    }

    #[test]
    fn spectrum_validation() {
        assert!(SparseSpectrum::<f64>::from_pairs(&[(1.0, 0.1)]).is_err());
        assert!(SparseSpectrum::<f64>::from_pairs(&[(0.1, -0.1)]).is_err());
        assert!(SparseSpectrum::<f64>::from_pairs(&[(0.1, 0.6), (0.2, 0.6)]).is_err());
        assert!(SparseSpectrum::<f64>::from_pairs(&[(0.1, 0.3), (0.1, 0.3)]).is_err());
        let s = spec(&[(0.5, 0.2), (0.1, 0.3)]);
        assert_eq!(s.frequencies(), vec![0.1, 0.5]);
    }

    #[test]
    fn spectrum_json_roundtrip_validates() {
        let s: SparseSpectrum<f64> =
            serde_json::from_str(r#"{"components":[{"omega":0.3,"weight":0.5}],"label":"x"}"#).unwrap();
        assert_eq!(s.label(), Some("x"));
        let bad = serde_json::from_str::<SparseSpectrum<f64>>(r#"{"components":[{"omega":1.5,"weight":0.5}]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn aliasing_detected() {
        let s = spec(&[(0.0001, 0.5), (0.9999, 0.5)]);
        assert_eq!(s.aliasing_pairs(101), vec![(0, 1)]);
        assert!(spec(&[(0.1, 0.5), (0.3, 0.5)]).aliasing_pairs(101).is_empty());
    }

    #[test]
    fn hadamard_degenerate_and_errors() {
        let mut rng = rng_from_seed(1);
        let v = hadamard_sample(C::new(1.0f64, 0.0), 17, NoiseKind::Bernoulli, &mut rng).unwrap();
        assert_eq!(v.re, 1.0);
        let err = hadamard_sample(C::new(1.0f64, 0.5), 17, NoiseKind::Bernoulli, &mut rng);
        assert!(matches!(err, Err(Error::NonPhysicalAmplitude(_))));
    }

    #[test]
    fn hadamard_single_shot_is_fair_coin() {
        let mut rng = rng_from_seed(2);
        let mut plus = 0;
        let trials = 20_000;
        for _ in 0..trials {
            let v = hadamard_sample(C::new(0.0f64, 0.0), 1, NoiseKind::Bernoulli, &mut rng).unwrap();
            assert!(v.re == 1.0 || v.re == -1.0);
            if v.re > 0.0 {
                plus += 1;
            }
        }
        // 5 standard errors of a fair coin
        let se = (trials as f64 * 0.25).sqrt();
        assert!((plus as f64 - trials as f64 / 2.0).abs() < 5.0 * se);
    }

    #[test]
    fn hadamard_large_shot_limit() {
        let mut rng = rng_from_seed(3);
        let z = C::new(0.3f64, -0.6);
        let m = 1_000_000u64;
        for kind in [NoiseKind::Bernoulli, NoiseKind::Gaussian] {
            let v = hadamard_sample(z, m, kind, &mut rng).unwrap();
            assert!((v - z).norm() <= 5.0 / (m as f64).sqrt());
        }
    }

    #[test]
    fn hadamard_unbiased_and_variance() {
        let mut rng = rng_from_seed(4);
        let z = C::new(0.5f64, 0.2);
        let shots = 10u64;
        let n = 100_000;
        let (mut sr, mut si, mut sr2) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let v = hadamard_sample(z, shots, NoiseKind::Bernoulli, &mut rng).unwrap();
            sr += v.re;
            si += v.im;
            sr2 += (v.re - z.re) * (v.re - z.re);
        }
        let var_re = (1.0 - z.re * z.re) / shots as f64;
        let var_im = (1.0 - z.im * z.im) / shots as f64;
        let se_re = (var_re / n as f64).sqrt();
        let se_im = (var_im / n as f64).sqrt();
        assert!((sr / n as f64 - z.re).abs() < 5.0 * se_re);
        assert!((si / n as f64 - z.im).abs() < 5.0 * se_im);
        assert!((sr2 / n as f64 - var_re).abs() < 0.05 * var_re);
    }

    #[test]
    fn sample_set_full_and_errors() {
        let mut rng = rng_from_seed(5);
        assert_eq!(draw_sample_set(5, 6, true, &mut rng).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert!(draw_sample_set(5, 0, true, &mut rng).is_err());
        assert_eq!(
            draw_sample_set(5, 7, true, &mut rng),
            Err(Error::Oversampled { requested: 7, available: 6 })
        );
    }

    #[test]
    fn sample_set_reproducible() {
        let a = draw_sample_set(1000, 39, true, &mut rng_from_seed(42)).unwrap();
        let b = draw_sample_set(1000, 39, true, &mut rng_from_seed(42)).unwrap();
        let c = draw_sample_set(1000, 39, true, &mut rng_from_seed(43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 39);
        assert_eq!(a[0], 0);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(*a.last().unwrap() <= 1000);
    }

    #[test]
    fn sample_set_without_forced_zero() {
        let a = draw_sample_set(100, 100, false, &mut rng_from_seed(7)).unwrap();
        assert_eq!(a.len(), 100);
        assert!(a.iter().all(|&n| (0..=100).contains(&n)));
    }

    #[test]
    fn budget_formulas() {
        assert_eq!(required_samples(4, 1000, None).unwrap(), 39);
        assert_eq!(required_samples(1, 1000, None).unwrap(), 7);
        // C=1, δ=0.1, N=100, s=2: max(ln²1000, 2 ln20 ln1000) = max(47.72, 41.39)
        let b = SampleBound { constant: 1.0, failure_probability: 0.1 };
        assert_eq!(required_samples(2, 100, Some(b)).unwrap(), 48);
        assert_eq!(required_shots(4, 1000).unwrap(), 196);
        assert_eq!(required_shots(1, 2).unwrap(), 2);
        assert!(required_samples(0, 10, None).is_err());
        assert!(required_shots(2, 1).is_err());
    }

    #[test]
    fn shots_monotone_in_n() {
        let mut prev = 0;
        for n in 2..3000 {
            let m = required_shots(3, n).unwrap();
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn hermitian_extension() {
        let g = TimeGrid::new(6, 1.0, false).unwrap();
        let s = SampledSignal::new(
            g,
            vec![0, 2, 5],
            vec![C::new(1.0, 0.0), C::new(0.5, 0.25), C::new(1.0, 2.0)],
            4,
            NoiseKind::Bernoulli,
        )
        .unwrap();
        let e = extend_hermitian(&s).unwrap();
        assert_eq!(e.sample_indices, vec![-5, -2, 0, 2, 5]);
        assert_eq!(e.values[0], C::new(1.0, -2.0));
        assert_eq!(e.values[2], C::new(1.0, 0.0));
        assert_eq!(e.len(), 2 * 3 - 1);
        assert!(e.grid.symmetric);
        assert_eq!(extend_hermitian(&e), Err(Error::AlreadyExtended));
        assert_eq!(e.measured_indices(), vec![0, 2, 5]);
    }

    #[test]
    fn runtime_metric_values() {
        assert_eq!(runtime_metric(&[1, 2, 3], 10, 1.0), 60.0);
        assert_eq!(runtime_metric(&[0], 99, 1.0), 0.0);
        assert_eq!(runtime_metric(&[1, 2, 3], 20, 1.0), 120.0);
    }

    #[test]
    fn budget_report_consistency() {
        let g = TimeGrid::<f64>::new(100, 0.5, true).unwrap();
        let r = BudgetReport::new(&[0, 3, 10], 7, &g);
        assert_eq!(r.total_runtime, 7.0 * 13.0 * 0.5);
        assert_eq!((r.compression_factor * g.len() as f64).round() as usize, 3);
    }

    #[test]
    fn exact_samples_must_be_physical() {
        let g = TimeGrid::new(3, 1.0, false).unwrap();
        let err = SampledSignal::new(g, vec![1], vec![C::new(1.5f64, 0.0)], 1, NoiseKind::Exact);
        assert!(matches!(err, Err(Error::NonPhysicalAmplitude(_))));
        let ok = SampledSignal::new(g, vec![1], vec![C::new(1.05f64, 0.0)], 100, NoiseKind::Bernoulli);
        assert!(ok.is_ok());
    }

    #[test]
    fn derived_seeds_differ() {
        let a: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
