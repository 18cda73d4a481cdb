//! Operator invariants as proptest properties, shared by the property test
//! target and the acceptance runner.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};

use cqpe::lifted::{
    hermitian_eigen, psd_truncate, svd_soft_threshold, toeplitz_from_gen, toeplitz_project, ToeplitzFft,
};
use cqpe::music::subspace_split;
use cqpe::spectrum::{extend_hermitian, measure, rng_from_seed, SparseSpectrum, TimeGrid};

type C = Complex<f64>;
type M = DMatrix<C>;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(config.rng_algorithm))
}

fn complex() -> impl Strategy<Value = C> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C::new(a, b))
}

/// Square complex matrix of size 2..=8.
fn square() -> impl Strategy<Value = M> {
    (2usize..=8).prop_flat_map(|n| prop::collection::vec(complex(), n * n).prop_map(move |v| M::from_vec(n, n, v)))
}

fn hermitian() -> impl Strategy<Value = M> {
    square().prop_map(|a| (&a + a.adjoint()) * C::new(0.5, 0.0))
}

fn fro(m: &M) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &M, b: &M) -> C {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Random Toeplitz matrix of size `n` from a seed.
fn random_toeplitz(n: usize, seed: u64) -> M {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    let gen: Vec<C> = (0..2 * n - 1).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    M::from_fn(n, n, |r, c| gen[n - 1 + r - c])
}

type Outcome = Result<(), String>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

/// Diagonal averaging is idempotent and orthogonal to every Toeplitz matrix,
/// hence the closest Toeplitz matrix in Frobenius norm.
pub fn toeplitz_projection(cases: u32) -> Outcome {
    run(cases, (square(), any::<u64>()), |(m, seed)| {
        let p = toeplitz_from_gen(&toeplitz_project(&m).unwrap());
        let pp = toeplitz_from_gen(&toeplitz_project(&p).unwrap());
        prop_assert!(fro(&(&pp - &p)) <= 1e-12 * (1.0 + fro(&p)));
        let k = random_toeplitz(m.nrows(), seed);
        let resid = &m - &p;
        prop_assert!(inner(&resid, &k).norm() <= 1e-10 * (1.0 + fro(&m) * fro(&k)));
        prop_assert!(fro(&resid) <= fro(&(&m - &k)) + 1e-12);
        Ok(())
    })
}

/// The FFT low-rank projection agrees with dense diagonal averaging.
pub fn fft_toeplitz_projection(cases: u32) -> Outcome {
    let strat = (2usize..=9, 1usize..=3).prop_flat_map(|(n, r)| {
        (Just(n), prop::collection::vec(complex(), n * r), prop::collection::vec(0.0..2.0f64, r))
    });
    run(cases, strat, |(n, v, w)| {
        let r = w.len();
        let vm = M::from_vec(n, r, v);
        let gen = ToeplitzFft::new(n).project_low_rank(&vm, &w);
        let dense = &vm * M::from_diagonal(&nalgebra::DVector::from_iterator(r, w.iter().map(|&x| C::new(x, 0.0)))) * vm.adjoint();
        let expect = toeplitz_from_gen(&toeplitz_project(&dense).unwrap());
        prop_assert!(fro(&(toeplitz_from_gen(&gen) - expect)) <= 1e-11 * (1.0 + fro(&dense)));
        Ok(())
    })
}

/// Singular-value shrinkage is the proximal map of `tau ||.||_*`: it matches
/// the closed form on Hermitian input and no random perturbation lowers the
/// proximal objective.
pub fn soft_threshold_prox(cases: u32) -> Outcome {
    let objective = |x: &M, m: &M, tau: f64| {
        let sv = x.clone().svd(false, false).singular_values;
        0.5 * fro(&(x - m)).powi(2) + tau * sv.iter().sum::<f64>()
    };
    run(cases, (hermitian(), 0.0..1.5f64, any::<u64>()), move |(m, tau, seed)| {
        let (x, rank) = svd_soft_threshold(&m, tau).unwrap();
        let (vals, vecs) = hermitian_eigen(&m);
        let n = m.nrows();
        let mut closed = M::zeros(n, n);
        let mut expect_rank = 0;
        for (i, &l) in vals.iter().enumerate() {
            let s = l.signum() * (l.abs() - tau).max(0.0);
            if l.abs() > tau {
                expect_rank += 1;
            }
            let v = vecs.column(i);
            closed += &v * v.adjoint() * C::new(s, 0.0);
        }
        prop_assert_eq!(rank, expect_rank);
        prop_assert!(fro(&(&x - &closed)) <= 1e-10 * (1.0 + fro(&m)));
        let f0 = objective(&x, &m, tau);
        let e = random_toeplitz(n, seed) * C::new(1e-3, 0.0);
        prop_assert!(f0 <= objective(&(&x + &e), &m, tau) + 1e-12);
        prop_assert!(f0 <= objective(&(&x - &e), &m, tau) + 1e-12);
        Ok(())
    })
}

/// Rank-capped PSD projection: PSD, rank at most the cap, and no worse than
/// a random PSD matrix of the same rank.
pub fn psd_rank_bounds(cases: u32) -> Outcome {
    run(cases, (hermitian(), 1usize..=4, any::<u64>()), |(z, cap, seed)| {
        let cap = cap.min(z.nrows());
        let p = psd_truncate(&z, cap).unwrap();
        let (vals, _) = hermitian_eigen(&p);
        let scale = 1.0 + fro(&z);
        prop_assert!(vals.iter().all(|&l| l >= -1e-10 * scale));
        prop_assert!(vals.iter().filter(|&&l| l > 1e-10 * scale).count() <= cap);
        prop_assert!(fro(&(&p - p.adjoint())) <= 1e-12 * scale);
        let n = z.nrows();
        let g = random_toeplitz(n, seed).columns(0, cap.min(n)).into_owned();
        let q = &g * g.adjoint();
        prop_assert!(fro(&(&z - &p)) <= fro(&(&z - &q)) + 1e-10);
        Ok(())
    })
}

/// The MUSIC noise projector is an orthogonal projector of rank `p - s`
/// that annihilates the signal basis.
pub fn noise_projector_algebra(cases: u32) -> Outcome {
    let strat = (7usize..=40, 1usize..=3).prop_flat_map(|(len, s)| (Just(s), prop::collection::vec(complex(), len)));
    run(cases, strat, |(s, x)| {
        let split = subspace_split(&x, s).unwrap();
        let p = split.noise_projector();
        let rows = split.rows();
        prop_assert!(fro(&(&p * &p - &p)) <= 1e-10);
        prop_assert!(fro(&(&p - p.adjoint())) <= 1e-12);
        let trace: f64 = (0..rows).map(|i| p[(i, i)].re).sum();
        prop_assert!((trace - (rows - s) as f64).abs() <= 1e-10);
        prop_assert!(fro(&(&p * split.signal_basis())) <= 1e-10);
        let a: Vec<C> = (0..rows).map(|k| C::from_polar(1.0, 0.7 * k as f64)).collect();
        let direct = (&p * nalgebra::DVector::from_vec(a.clone())).norm_squared();
        prop_assert!((split.noise_energy(&a) - direct).abs() <= 1e-10 * rows as f64);
        Ok(())
    })
}

/// Mirroring positive-axis samples gives `z(-n) = conj(z(n))`, which is
/// what the synthesized signal satisfies on the symmetric grid.
pub fn hermitian_extension(cases: u32) -> Outcome {
    let strat = (
        prop::collection::vec((0.0..1.0f64, 0.05..1.0f64), 1..4),
        4usize..30,
        any::<u64>(),
    );
    run(cases, strat, |(lines, n_pos, seed)| {
        let total: f64 = lines.iter().map(|l| l.1).sum();
        let pairs: Vec<(f64, f64)> = lines.iter().map(|&(w, c)| (w, c / total)).collect();
        let spec = SparseSpectrum::<f64>::from_pairs(&pairs).unwrap();
        let grid = TimeGrid::new(n_pos, 1.0, false).unwrap();
        let mut rng = rng_from_seed(seed);
        let idx = cqpe::spectrum::draw_sample_set(n_pos, (n_pos / 2).max(1), true, &mut rng).unwrap();
        let pos = measure(&spec, &grid, &idx, 1, cqpe::spectrum::NoiseKind::Exact, &mut rng).unwrap();
        let ext = extend_hermitian(&pos).unwrap();
        prop_assert_eq!(ext.len(), 2 * pos.len() - usize::from(idx[0] == 0));
        for (&n, v) in ext.sample_indices.iter().zip(&ext.values) {
            let k = ext.sample_indices.iter().position(|&m| m == -n).unwrap();
            prop_assert!((ext.values[k] - v.conj()).norm() <= 1e-15);
        }
        let full = cqpe::spectrum::synthesize(&spec, &ext.grid).unwrap();
        for (&n, v) in ext.sample_indices.iter().zip(&ext.values) {
            prop_assert!((full[(n + n_pos as i64) as usize] - v).norm() <= 1e-12);
        }
        prop_assert!(extend_hermitian(&ext).is_err());
        Ok(())
    })
}

pub const INVARIANTS: [(&str, fn(u32) -> Outcome); 6] = [
    ("toeplitz projection idempotent + optimal", toeplitz_projection),
    ("fft toeplitz projection matches dense", fft_toeplitz_projection),
    ("soft threshold is the nuclear-norm prox", soft_threshold_prox),
    ("psd truncation: psd, rank cap, optimal", psd_rank_bounds),
    ("noise projector algebra", noise_projector_algebra),
    ("hermitian extension symmetry", hermitian_extension),
];
