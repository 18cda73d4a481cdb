//! Dense reference implementations of the spectral projections used by the
//! solver. They are exact and O(n^3); the solver's structured path is
//! checked against them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{frobenius, CMat, Real, C};

/// Singular-value soft thresholding `S max(D - tau, 0) V^H`.
///
/// Returns the shrunk matrix and the number of singular values that stay
/// strictly above `tau`.
pub fn svd_soft_threshold<T: Real>(m: &CMat<T>, tau: T) -> Result<(CMat<T>, usize)> {
    if tau < T::zero() {
        return Err(Error::invalid("threshold must be non-negative"));
    }
    if m.is_empty() {
        return Ok((m.clone(), 0));
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");
    let shrunk: Vec<T> = svd
        .singular_values
        .iter()
        .map(|&s| if s > tau { s - tau } else { T::zero() })
        .collect();
    let rank = shrunk.iter().filter(|&&s| s > T::zero()).count();
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        shrunk.len(),
        shrunk.iter().map(|&s| C::new(s, T::zero())),
    ));
    Ok((u * d * v_t, rank))
}

/// Relative anti-Hermitian part `||Z - Z^H||_F / ||Z||_F`.
pub fn hermitian_defect<T: Real>(z: &CMat<T>) -> T {
    let norm = frobenius(z);
    if norm == T::zero() {
        return T::zero();
    }
    frobenius(&(z - z.adjoint())) / norm
}

/// Eigenpairs of a Hermitian matrix sorted by descending eigenvalue.
pub fn hermitian_eigen<T: Real>(z: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let sym = (z + z.adjoint()) * C::new(T::lit(0.5), T::zero());
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Keeps the `rank_cap` algebraically largest eigenpairs of a Hermitian
/// matrix, clamps kept negative eigenvalues to zero and reassembles.
pub fn psd_truncate<T: Real>(z: &CMat<T>, rank_cap: usize) -> Result<CMat<T>> {
    if z.nrows() != z.ncols() {
        return Err(Error::Dimension(format!("{}x{} is not square", z.nrows(), z.ncols())));
    }
    if rank_cap == 0 || rank_cap > z.nrows() {
        return Err(Error::invalid(format!(
            "rank cap {rank_cap} outside 1..={}",
            z.nrows()
        )));
    }
    let defect = hermitian_defect(z);
    if defect > T::lit(1e-8) {
        return Err(Error::NotHermitian(defect.as_f64()));
    }
    let (values, vectors) = hermitian_eigen(z);
    let kept = vectors.columns(0, rank_cap);
    let weights = DVector::from_iterator(
        rank_cap,
        values[..rank_cap].iter().map(|&v| C::new(if v > T::zero() { v } else { T::zero() }, T::zero())),
    );
    let scaled = DMatrix::from_fn(z.nrows(), rank_cap, |r, c| kept[(r, c)] * weights[c]);
    Ok(&scaled * kept.adjoint())
}
