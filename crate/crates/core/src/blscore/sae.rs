use ndarray::{Array1, Array2, ArrayView2};

use super::Activation;
use crate::error::{Error, Result};
use crate::linalg::largest_gram_eigenvalue;
use crate::scalar::Scalar;

const POWER_ITERS: usize = 200;

/// ISTA for `min_B ½‖ZB − Y‖²_F + λ‖B‖₁` with fixed iteration count.
///
/// Step size is `1/L` where `L` is the power-iteration estimate of the
/// largest eigenvalue of `ZᵀZ`. Starts from `B = 0`.
pub fn lasso_ista<T: Scalar>(
    z: ArrayView2<'_, T>,
    y: ArrayView2<'_, T>,
    lambda: T,
    iters: usize,
) -> Result<Array2<T>> {
    if z.nrows() != y.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "lasso design has {} rows, target has {}",
            z.nrows(),
            y.nrows()
        )));
    }
    let mut b = Array2::<T>::zeros((z.ncols(), y.ncols()));
    let l = largest_gram_eigenvalue(z, POWER_ITERS);
    if !l.is_finite() {
        return Err(Error::NumericalFailure(
            "non-finite Lipschitz estimate in sparse refinement".into(),
        ));
    }
    if l <= T::zero() {
        return Ok(b);
    }
    let step = T::one() / l;
    let thresh = lambda * step;
    let gram = z.t().dot(&z);
    let zty = z.t().dot(&y);
    for _ in 0..iters {
        let grad = gram.dot(&b) - &zty;
        b.zip_mut_with(&grad, |bi, &g| {
            let v = *bi - step * g;
            *bi = v.signum() * (v.abs() - thresh).max(T::zero());
        });
    }
    Ok(b)
}

/// Sparse-autoencoder refinement of a first-layer feature weight.
///
/// Encodes `x` with the random weights, then learns a sparse decoder `B` from
/// the encoding back to `x`; `Bᵀ` is returned as the data-adapted weight.
pub fn sae_refine<T: Scalar>(
    x: ArrayView2<'_, T>,
    w_rand: ArrayView2<'_, T>,
    bias: &Array1<T>,
    activation: Activation,
    sae_lambda: T,
    iters: usize,
) -> Result<Array2<T>> {
    if iters == 0 {
        return Err(Error::InvalidInput("sae_iters must be >= 1".into()));
    }
    if x.ncols() != w_rand.nrows() || w_rand.ncols() != bias.len() {
        return Err(Error::ShapeMismatch(format!(
            "sae: x {:?}, W {:?}, bias {}",
            x.dim(),
            w_rand.dim(),
            bias.len()
        )));
    }
    let mut z = x.dot(&w_rand) + bias;
    z.mapv_inplace(|v| activation.apply(v));
    let b = lasso_ista(z.view(), x, sae_lambda, iters)?;
    Ok(b.reversed_axes().as_standard_layout().to_owned())
}
