//! Restarted block-Krylov eigensolver for Hermitian operators that are only
//! available through matrix-vector products (FFT-applied Toeplitz blocks,
//! Gram operators of Hankel matrices).

use nalgebra::DMatrix;
use rand::Rng;

use super::dense::hermitian_eigen;
use super::toeplitz::{ToeplitzFft, ToeplitzGen};
use crate::error::{Error, Result};
use crate::scalar::{norm2, CMat, Real, C};
use crate::spectrum::rng_from_seed;

/// A Hermitian linear map `y = A x`.
pub trait HermitianOperator<T: Real> {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C<T>], y: &mut [C<T>]);
}

impl<T: Real> HermitianOperator<T> for CMat<T> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C<T>], y: &mut [C<T>]) {
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).iter().zip(x).fold(zero(), |acc, (a, b)| acc + a * b);
        }
    }
}

/// Hermitian Toeplitz matrix applied through its circulant embedding.
pub struct ToeplitzOperator<'a, T: Real> {
    fft: &'a ToeplitzFft<T>,
    symbol: Vec<C<T>>,
}

impl<'a, T: Real> ToeplitzOperator<'a, T> {
    pub fn new(fft: &'a ToeplitzFft<T>, gen: &ToeplitzGen<T>) -> Self {
        Self { fft, symbol: fft.symbol(gen) }
    }
}

impl<T: Real> HermitianOperator<T> for ToeplitzOperator<'_, T> {
    fn dim(&self) -> usize {
        self.fft.dim()
    }

    fn apply(&self, x: &[C<T>], y: &mut [C<T>]) {
        self.fft.apply(&self.symbol, x, y);
    }
}

/// Which eigenpairs to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection<T> {
    /// Every eigenpair with `|lambda| > threshold`.
    AboveMagnitude(T),
    /// The `k` eigenpairs of largest `|lambda|`.
    LargestMagnitude(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions<T> {
    /// Residual tolerance relative to the largest Ritz magnitude.
    pub tol: T,
    pub max_restarts: usize,
    /// Seed for the random start block.
    pub seed: u64,
    /// Operators up to this dimension are materialized and solved densely.
    pub dense_cutoff: usize,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-10), max_restarts: 200, seed: 0x5eed, dense_cutoff: 48 }
    }
}

/// Selected eigenpairs, ordered by descending `|lambda|`.
#[derive(Debug, Clone)]
pub struct PartialEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
    /// Operator applications spent.
    pub matvecs: usize,
}

#[inline]
fn zero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(zero(), |acc, (x, y)| acc + x.conj() * y)
}

/// Orthogonalizes `w` against `basis` (two Gram-Schmidt passes) and
/// normalizes it. Returns `false` if `w` is numerically inside the span.
fn orthonormalize_against<T: Real>(basis: &[Vec<C<T>>], w: &mut [C<T>]) -> bool {
    let start = norm2(w);
    if start == T::zero() || !start.is_finite() {
        return false;
    }
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= qi * c;
            }
        }
    }
    let norm = norm2(w);
    if norm <= start * T::lit(1e-10).max(T::eps() * T::lit(100.0)) {
        return false;
    }
    let inv = T::one() / norm;
    w.iter_mut().for_each(|x| *x *= inv);
    true
}

fn random_vector<T: Real>(n: usize, rng: &mut impl Rng) -> Vec<C<T>> {
    (0..n)
        .map(|_| C::new(T::lit(rng.random::<f64>() - 0.5), T::lit(rng.random::<f64>() - 0.5)))
        .collect()
}

fn select_indices<T: Real>(values: &[T], sel: Selection<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .magnitude()
            .partial_cmp(&values[a].magnitude())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    match sel {
        Selection::AboveMagnitude(tau) => order.into_iter().filter(|&i| values[i].magnitude() > tau).collect(),
        Selection::LargestMagnitude(k) => order.into_iter().take(k).collect(),
    }
}

fn dense_partial<T: Real, A: HermitianOperator<T> + ?Sized>(op: &A, sel: Selection<T>) -> PartialEigen<T> {
    let n = op.dim();
    let mut m = DMatrix::from_element(n, n, zero());
    let mut e = vec![zero(); n];
    let mut col = vec![zero(); n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = zero());
        e[j] = C::new(T::one(), T::zero());
        op.apply(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    let (vals, vecs) = hermitian_eigen(&m);
    let idx = select_indices(&vals, sel);
    PartialEigen {
        values: idx.iter().map(|&i| vals[i]).collect(),
        vectors: DMatrix::from_fn(n, idx.len(), |r, c| vecs[(r, idx[c])]),
        matvecs: n,
    }
}

/// Computes the selected eigenpairs of a Hermitian operator.
///
/// `warm` columns (for example the previous iteration's eigenvectors) seed
/// the search space; random vectors fill the rest of the start block.
pub fn partial_eigen<T: Real, A: HermitianOperator<T> + ?Sized>(
    op: &A,
    sel: Selection<T>,
    warm: Option<&CMat<T>>,
    opts: &EigenOptions<T>,
) -> Result<PartialEigen<T>> {
    let n = op.dim();
    if n == 0 {
        return Ok(PartialEigen { values: vec![], vectors: DMatrix::zeros(0, 0), matvecs: 0 });
    }
    if let Selection::LargestMagnitude(k) = sel {
        if k > n {
            return Err(Error::invalid(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
        }
    }
    if n <= opts.dense_cutoff {
        return Ok(dense_partial(op, sel));
    }
    let tol = opts.tol.max(T::eps() * T::lit(100.0));
    let guard = 6usize;
    let mut rng = rng_from_seed(opts.seed);

    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    if let Some(w) = warm {
        if w.nrows() != n {
            return Err(Error::Dimension(format!("warm start has {} rows, operator has {n}", w.nrows())));
        }
        for c in 0..w.ncols() {
            let mut v: Vec<C<T>> = w.column(c).iter().copied().collect();
            if orthonormalize_against(&basis, &mut v) {
                basis.push(v);
            }
        }
    }
    let min_block = match sel {
        Selection::LargestMagnitude(k) => k + guard,
        Selection::AboveMagnitude(_) => guard,
    };
    while basis.len() < min_block.min(n) {
        let mut v = random_vector(n, &mut rng);
        if orthonormalize_against(&basis, &mut v) {
            basis.push(v);
        }
    }

    let mut applied: Vec<Vec<C<T>>> = Vec::new();
    let mut kmax = (2 * basis.len() + 24).max(40).min(n);
    let mut matvecs = 0usize;

    for _restart in 0..opts.max_restarts {
        // Expand: each new direction is A applied to an existing basis
        // vector, orthogonalized against the whole basis.
        let mut p = 0;
        while basis.len() < kmax {
            if p == basis.len() {
                let mut v = random_vector(n, &mut rng);
                if orthonormalize_against(&basis, &mut v) {
                    basis.push(v);
                }
                continue;
            }
            if p == applied.len() {
                let mut y = vec![zero(); n];
                op.apply(&basis[p], &mut y);
                matvecs += 1;
                applied.push(y);
            }
            let mut w = applied[p].clone();
            p += 1;
            if orthonormalize_against(&basis, &mut w) {
                basis.push(w);
            }
        }
        while applied.len() < basis.len() {
            let mut y = vec![zero(); n];
            op.apply(&basis[applied.len()], &mut y);
            matvecs += 1;
            applied.push(y);
        }

        // Rayleigh-Ritz.
        let k = basis.len();
        let h = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &applied[j]));
        let (theta, y) = hermitian_eigen(&h);
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { iteration: 0 });
        }
        let order = select_indices(&theta, Selection::LargestMagnitude(k));
        let wanted = select_indices(&theta, sel);
        let scale = theta.iter().fold(T::zero(), |m, v| m.max(v.magnitude()));

        let combine = |src: &[Vec<C<T>>], j: usize| -> Vec<C<T>> {
            let mut out = vec![zero(); n];
            for (i, s) in src.iter().enumerate() {
                let c = y[(i, j)];
                for (o, v) in out.iter_mut().zip(s) {
                    *o += v * c;
                }
            }
            out
        };

        let keep = (wanted.len() + guard).min(k);
        let mut ritz = Vec::with_capacity(keep);
        let mut ritz_applied = Vec::with_capacity(keep);
        let mut converged = true;
        for &j in order.iter().take(keep) {
            let x = combine(&basis, j);
            let ax = combine(&applied, j);
            if wanted.contains(&j) {
                let res = ax.iter().zip(&x).fold(T::zero(), |acc, (a, b)| acc + (a - b * theta[j]).norm_sqr()).sqrt();
                if res > tol * scale.max(T::eps()) {
                    converged = false;
                }
            }
            ritz.push(x);
            ritz_applied.push(ax);
        }
        let exhausted = k == n;
        // Enough room beyond the wanted set that missed eigenvalues would
        // have surfaced as Ritz values.
        let roomy = exhausted || wanted.len() + guard < k;
        if (converged && roomy) || exhausted {
            return Ok(PartialEigen {
                values: wanted.iter().map(|&j| theta[j]).collect(),
                vectors: DMatrix::from_fn(n, wanted.len(), |r, c| ritz[c][r]),
                matvecs,
            });
        }
        if !roomy {
            kmax = (kmax * 2).min(n);
        }
        basis = ritz;
        applied = ritz_applied;
    }
    Err(Error::invalid(format!(
        "partial eigensolver did not converge in {} restarts",
        opts.max_restarts
    )))
}
