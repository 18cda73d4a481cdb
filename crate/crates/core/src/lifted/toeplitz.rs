use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CMat, Real, C};

/// Generator `u_{-(n-1)}, ..., u_{n-1}` of an `n x n` Toeplitz matrix with
/// `T[j, k] = u_{k-j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ToeplitzGen<T: Real> {
    gen: Vec<C<T>>,
}

impl<T: Real> ToeplitzGen<T> {
    /// `gen[i]` holds `u_{i-(n-1)}`; the length must be odd.
    pub fn new(gen: Vec<C<T>>) -> Result<Self> {
        if gen.len() % 2 == 0 {
            return Err(Error::invalid(format!(
                "Toeplitz generator must have odd length, got {}",
                gen.len()
            )));
        }
        Ok(Self { gen })
    }

    pub fn zeros(n: usize) -> Self {
        Self { gen: vec![C::new(T::zero(), T::zero()); 2 * n - 1] }
    }

    /// Hermitian generator from its non-negative half `u_0, ..., u_{n-1}`;
    /// `u_0` is taken as real.
    pub fn hermitian_from_half(half: &[C<T>]) -> Self {
        let n = half.len();
        let mut gen = Vec::with_capacity(2 * n - 1);
        for d in (1..n).rev() {
            gen.push(half[d].conj());
        }
        gen.push(C::new(half[0].re, T::zero()));
        gen.extend_from_slice(&half[1..]);
        Self { gen }
    }

    /// Matrix dimension `n`.
    pub fn dim(&self) -> usize {
        self.gen.len().div_ceil(2)
    }

    /// `u_d` for `-(n-1) <= d <= n-1`.
    pub fn get(&self, d: isize) -> C<T> {
        self.gen[(d + self.dim() as isize - 1) as usize]
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.gen
    }

    /// Non-negative half `u_0, ..., u_{n-1}`.
    pub fn half(&self) -> &[C<T>] {
        &self.gen[self.dim() - 1..]
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let n = self.dim() as isize;
        (0..n).all(|d| (self.get(d) - self.get(-d).conj()).norm_sqr().sqrt() <= tol)
    }

    /// Frobenius norm of the induced matrix.
    pub fn frobenius(&self) -> T {
        let n = self.dim() as isize;
        (-(n - 1)..n)
            .fold(T::zero(), |acc, d| acc + self.get(d).norm_sqr() * T::from_usize_lossy((n - d.abs()) as usize))
            .sqrt()
    }

    /// Frobenius norm of the difference of the induced matrices.
    pub fn frobenius_distance(&self, other: &Self) -> T {
        let n = self.dim() as isize;
        (-(n - 1)..n)
            .fold(T::zero(), |acc, d| {
                acc + (self.get(d) - other.get(d)).norm_sqr() * T::from_usize_lossy((n - d.abs()) as usize)
            })
            .sqrt()
    }

    /// Linear combination `a * self + b * other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        Self {
            gen: self.gen.iter().zip(&other.gen).map(|(x, y)| x * a + y * b).collect(),
        }
    }

    pub fn trace(&self) -> T {
        self.get(0).re * T::from_usize_lossy(self.dim())
    }
}

/// Dense matrix induced by a Toeplitz generator.
pub fn toeplitz_from_gen<T: Real>(gen: &ToeplitzGen<T>) -> CMat<T> {
    let n = gen.dim();
    DMatrix::from_fn(n, n, |j, k| gen.get(k as isize - j as isize))
}

/// Frobenius-orthogonal projection onto Toeplitz matrices: each diagonal is
/// replaced by its mean.
pub fn toeplitz_project<T: Real>(m: &CMat<T>) -> Result<ToeplitzGen<T>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let mut gen = vec![C::new(T::zero(), T::zero()); 2 * n - 1];
    for j in 0..n {
        for k in 0..n {
            gen[k + n - 1 - j] += m[(j, k)];
        }
    }
    for (i, g) in gen.iter_mut().enumerate() {
        let d = i as isize - (n as isize - 1);
        *g /= T::from_usize_lossy(n - d.unsigned_abs());
    }
    ToeplitzGen::new(gen)
}

/// FFT workspace for `n x n` Toeplitz products and diagonal averages,
/// using a circulant embedding of length `2n`.
pub struct ToeplitzFft<T: Real> {
    n: usize,
    len: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for ToeplitzFft<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzFft").field("n", &self.n).field("len", &self.len).finish()
    }
}

impl<T: Real> ToeplitzFft<T> {
    pub fn new(n: usize) -> Self {
        let len = (2 * n).next_power_of_two().max(2);
        let mut planner = FftPlanner::new();
        Self { n, len, fwd: planner.plan_fft_forward(len), inv: planner.plan_fft_inverse(len) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn zero() -> C<T> {
        C::new(T::zero(), T::zero())
    }

    /// Spectrum of the circulant that embeds `gen`.
    pub fn symbol(&self, gen: &ToeplitzGen<T>) -> Vec<C<T>> {
        assert_eq!(gen.dim(), self.n);
        let mut c = vec![Self::zero(); self.len];
        // y_j = sum_k u_{k-j} x_k is a convolution with h[d] = u_{-d}.
        for d in 0..self.n {
            c[d] = gen.get(-(d as isize));
        }
        for d in 1..self.n {
            c[self.len - d] = gen.get(d as isize);
        }
        self.fwd.process(&mut c);
        c
    }

    /// `y = T x` given the circulant symbol of `T`.
    pub fn apply(&self, symbol: &[C<T>], x: &[C<T>], y: &mut [C<T>]) {
        let mut buf = vec![Self::zero(); self.len];
        buf[..self.n].copy_from_slice(x);
        self.fwd.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(symbol) {
            *b *= s;
        }
        self.inv.process(&mut buf);
        let scale = T::one() / T::from_usize_lossy(self.len);
        for (yi, b) in y.iter_mut().zip(&buf[..self.n]) {
            *yi = b * scale;
        }
    }

    /// Toeplitz projection of `sum_r w_r v_r v_r^H` for the columns `v_r` of
    /// `vectors`, without forming the dense matrix.
    pub fn project_low_rank(&self, vectors: &CMat<T>, weights: &[T]) -> ToeplitzGen<T> {
        assert_eq!(vectors.nrows(), self.n);
        assert_eq!(vectors.ncols(), weights.len());
        let mut power = vec![T::zero(); self.len];
        let mut buf = vec![Self::zero(); self.len];
        for (r, &w) in weights.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            buf.iter_mut().for_each(|b| *b = Self::zero());
            for j in 0..self.n {
                buf[j] = vectors[(j, r)];
            }
            self.fwd.process(&mut buf);
            for (p, b) in power.iter_mut().zip(&buf) {
                *p += b.norm_sqr() * w;
            }
        }
        let mut acf: Vec<C<T>> = power.into_iter().map(|p| C::new(p, T::zero())).collect();
        self.inv.process(&mut acf);
        let scale = T::one() / T::from_usize_lossy(self.len);
        // acf[d] = sum_j M[j+d, j]; the generator wants sum_j M[j, j+d] = acf[-d].
        let n = self.n;
        let mut gen = vec![Self::zero(); 2 * n - 1];
        for d in -(n as isize - 1)..(n as isize) {
            let src = if d <= 0 { (-d) as usize } else { self.len - d as usize };
            gen[(d + n as isize - 1) as usize] = acf[src] * scale / T::from_usize_lossy(n - d.unsigned_abs());
        }
        ToeplitzGen { gen }
    }
}
