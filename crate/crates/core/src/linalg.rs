//! Small dense kernels that ndarray does not provide: SPD factorization and
//! spectral-norm estimation.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    // row-major lower triangle, upper part is garbage
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factors `m`. Only the lower triangle is read.
    pub fn factor(m: ArrayView2<'_, T>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "cholesky of non-square {:?}",
                m.dim()
            )));
        }
        let mut l: Vec<T> = m.iter().copied().collect();
        let max_diag = (0..n).map(|i| l[i * n + i].abs()).fold(T::zero(), T::max);
        let tol = T::epsilon() * T::from_usize(n.max(1)).unwrap() * max_diag;
        let mut row_j = vec![T::zero(); n];
        for j in 0..n {
            let mut d = l[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !d.is_finite() || d <= tol {
                return Err(Error::SingularSystem);
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            row_j[..j].copy_from_slice(&l[j * n..j * n + j]);
            for i in (j + 1)..n {
                let row_i = &mut l[i * n..i * n + j + 1];
                let mut s = row_i[j];
                for k in 0..j {
                    s -= row_i[k] * row_j[k];
                }
                row_i[j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    /// Solves `M X = B` for every column of `b`.
    pub fn solve(&self, b: ArrayView2<'_, T>) -> Result<Array2<T>> {
        let n = self.n;
        if b.nrows() != n {
            return Err(Error::ShapeMismatch(format!(
                "rhs has {} rows, system has {n}",
                b.nrows()
            )));
        }
        let m = b.ncols();
        // work on the transpose so each right-hand side is contiguous
        let mut x: Vec<T> = Vec::with_capacity(n * m);
        for c in 0..m {
            x.extend(b.column(c).iter().copied());
        }
        let l = &self.l;
        for c in 0..m {
            let y = &mut x[c * n..(c + 1) * n];
            for i in 0..n {
                let row = &l[i * n..i * n + i];
                let mut s = y[i];
                for (k, &lik) in row.iter().enumerate() {
                    s -= lik * y[k];
                }
                y[i] = s / l[i * n + i];
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in (i + 1)..n {
                    s -= l[k * n + i] * y[k];
                }
                y[i] = s / l[i * n + i];
            }
        }
        Ok(Array2::from_shape_fn((n, m), |(i, c)| x[c * n + i]))
    }
}

/// Largest eigenvalue of `aᵀa` by power iteration, without forming `aᵀa`.
pub fn largest_gram_eigenvalue<T: Scalar>(a: ArrayView2<'_, T>, max_iter: usize) -> T {
    let d = a.ncols();
    if d == 0 || a.nrows() == 0 {
        return T::zero();
    }
    // deterministic start with no special symmetry
    let mut v: Array1<T> = (0..d)
        .map(|i| T::one() + T::lit(0.01) * T::from_usize(i % 7).unwrap())
        .collect();
    let norm = v.dot(&v).sqrt();
    v /= norm;
    let mut lambda = T::zero();
    for _ in 0..max_iter {
        let w = a.t().dot(&a.dot(&v));
        let next = v.dot(&w);
        let wn = w.dot(&w).sqrt();
        if !wn.is_finite() || !next.is_finite() {
            return T::nan();
        }
        if wn == T::zero() {
            return T::zero();
        }
        v = w / wn;
        let done = (next - lambda).abs() <= T::lit(1e-12) * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    // the Rayleigh quotient approaches from below; the norm of w bounds it from above
    let w = a.t().dot(&a.dot(&v));
    w.dot(&w).sqrt().max(lambda)
}
