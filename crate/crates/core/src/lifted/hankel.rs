use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{CMat, Real, C};

/// Row count `p = ceil((L + 1) / 2)` and column count `q = L + 1 - p` of the
/// near-square Hankel matrix of a length-`L` signal.
pub fn hankel_shape(len: usize) -> (usize, usize) {
    let p = (len + 2) / 2;
    (p, len + 1 - p)
}

/// Hankel matrix `W[j, k] = x[j + k]`.
pub fn hankel_from_signal<T: Real>(x: &[C<T>]) -> Result<CMat<T>> {
    if x.len() < 3 {
        return Err(Error::SignalTooShort(x.len()));
    }
    let (p, q) = hankel_shape(x.len());
    Ok(DMatrix::from_fn(p, q, |j, k| x[j + k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::atom;

    #[test]
    fn small_patterns() {
        let v: Vec<C<f64>> = (1..=4).map(|i| C::new(i as f64, 0.0)).collect();
        let w = hankel_from_signal(&v[..3]).unwrap();
        assert_eq!(w.shape(), (2, 2));
        assert_eq!(w[(0, 1)], v[1]);
        assert_eq!(w[(1, 0)], v[1]);
        assert_eq!(w[(1, 1)], v[2]);
        let w = hankel_from_signal(&v).unwrap();
        assert_eq!(w.shape(), (3, 2));
        assert_eq!(w[(2, 1)], v[3]);
        assert_eq!(w[(2, 0)], v[2]);
        assert!(matches!(hankel_from_signal(&v[..2]), Err(Error::SignalTooShort(2))));
    }

    #[test]
    fn sparse_signal_rank() {
        let freqs = [0.11, 0.37, 0.8];
        for s in 1..=3 {
            let x: Vec<C<f64>> = (0..41)
                .map(|n| freqs[..s].iter().map(|&f| atom(f, n)).sum())
                .collect();
            let sv = hankel_from_signal(&x).unwrap().singular_values();
            let mut sv: Vec<f64> = sv.iter().copied().collect();
            sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert!(sv[s - 1] > 1e-3 * sv[0]);
            assert!(sv[s] <= 1e-10 * sv[0], "s={s} tail={}", sv[s] / sv[0]);
        }
    }
}
