use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::Scalar;

/// Closed-form ridge solution `W = (AᵀA + λI)⁻¹AᵀY` by Cholesky.
///
/// When `λ > 0` and `A` has fewer rows than columns the identical solution
/// `Aᵀ(AAᵀ + λI)⁻¹Y` is used, which factors the smaller Gram matrix.
pub fn ridge_solve<T: Scalar>(
    a: ArrayView2<'_, T>,
    y: ArrayView2<'_, T>,
    lambda: T,
) -> Result<Array2<T>> {
    if a.nrows() != y.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "A has {} rows, Y has {}",
            a.nrows(),
            y.nrows()
        )));
    }
    if !lambda.is_finite() || lambda < T::zero() {
        return Err(Error::InvalidInput(
            "ridge lambda must be finite and >= 0".into(),
        ));
    }
    let (n, d) = a.dim();
    if lambda > T::zero() && n < d {
        let mut gram = a.dot(&a.t());
        gram.diag_mut().mapv_inplace(|v| v + lambda);
        let alpha = Cholesky::factor(gram.view())?.solve(y)?;
        return Ok(a.t().dot(&alpha));
    }
    let mut gram = a.t().dot(&a);
    gram.diag_mut().mapv_inplace(|v| v + lambda);
    let rhs = a.t().dot(&y);
    Cholesky::factor(gram.view())?.solve(rhs.view())
}

/// `‖Y − AW‖²_F + λ‖W‖²_F`.
pub fn ridge_objective<T: Scalar>(
    a: ArrayView2<'_, T>,
    y: ArrayView2<'_, T>,
    w: ArrayView2<'_, T>,
    lambda: T,
) -> T {
    let r = &y - &a.dot(&w);
    r.iter().map(|&v| v * v).fold(T::zero(), |s, v| s + v)
        + lambda * w.iter().map(|&v| v * v).fold(T::zero(), |s, v| s + v)
}
