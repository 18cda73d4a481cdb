//! Structured-matrix primitives for the lifted variable
//! `Z = [[t, x^H], [x, T]]`: Toeplitz and Hankel construction, diagonal
//! averaging, singular-value shrinkage and rank-capped PSD projection.

mod dense;
mod hankel;
pub mod krylov;
mod toeplitz;

use nalgebra::DMatrix;

pub use dense::{hermitian_defect, hermitian_eigen, psd_truncate, svd_soft_threshold};
pub use hankel::{hankel_from_signal, hankel_shape};
pub use toeplitz::{toeplitz_from_gen, toeplitz_project, ToeplitzFft, ToeplitzGen};

use crate::scalar::{CMat, Real, C};

/// The three blocks of the lifted matrix, scalar block first.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedMatrix<T: Real> {
    pub t_scalar: T,
    pub x: Vec<C<T>>,
    pub toeplitz: CMat<T>,
}

impl<T: Real> LiftedMatrix<T> {
    /// Assembles `[[t, x^H], [x, T]]`.
    pub fn assemble(&self) -> CMat<T> {
        let n = self.x.len();
        DMatrix::from_fn(n + 1, n + 1, |r, c| match (r, c) {
            (0, 0) => C::new(self.t_scalar, T::zero()),
            (0, c) => self.x[c - 1].conj(),
            (r, 0) => self.x[r - 1],
            (r, c) => self.toeplitz[(r - 1, c - 1)],
        })
    }

    /// Splits an assembled `(N+1) x (N+1)` matrix back into its blocks.
    pub fn split(z: &CMat<T>) -> Self {
        let n = z.nrows() - 1;
        Self {
            t_scalar: z[(0, 0)].re,
            x: (1..=n).map(|r| z[(r, 0)]).collect(),
            toeplitz: z.view((1, 1), (n, n)).into_owned(),
        }
    }
}
