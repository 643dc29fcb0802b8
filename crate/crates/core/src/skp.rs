//! Simple kernel perturbation: a random Fourier feature map approximating
//! the Gaussian kernel `exp(-σ²‖x−y‖²/2)`.
//!
//! `rff(z)_j = sqrt(2/d_k) · cos(ω_j·z + b_j)` with `ω_j ~ N(0, σ²I)` and
//! `b_j ~ U[0, 2π]`, applied to each row of the input.

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::blscore::BranchKind;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::task_rng;

/// Frozen random Fourier feature parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RffMap<T> {
    /// `[D_in x d_k]`, column `j` is `ω_j`.
    pub omega: Array2<T>,
    pub b: Array1<T>,
    pub sigma: f64,
}

impl<T: Scalar> RffMap<T> {
    pub fn sample<R: Rng + ?Sized>(d_in: usize, d_k: usize, sigma: f64, rng: &mut R) -> Self {
        let omega = Array2::from_shape_simple_fn((d_in, d_k), || {
            T::lit(sigma * rng.sample::<f64, _>(StandardNormal))
        });
        let b = Array1::from_shape_simple_fn(d_k, || {
            T::lit(rng.random_range(0.0..std::f64::consts::TAU))
        });
        Self { omega, b, sigma }
    }

    pub fn d_in(&self) -> usize {
        self.omega.nrows()
    }

    pub fn d_k(&self) -> usize {
        self.omega.ncols()
    }

    /// Largest possible magnitude of an output coordinate.
    pub fn bound(&self) -> T {
        (T::lit(2.0) / T::from_usize(self.d_k()).unwrap()).sqrt()
    }
}

pub fn rff_map<T: Scalar>(z: ArrayView2<'_, T>, map: &RffMap<T>) -> Result<Array2<T>> {
    if z.ncols() != map.d_in() {
        return Err(Error::ShapeMismatch(format!(
            "rff input has {} columns, map expects {}",
            z.ncols(),
            map.d_in()
        )));
    }
    let scale = map.bound();
    let mut out = z.dot(&map.omega) + &map.b;
    out.mapv_inplace(|v| scale * v.cos());
    Ok(out)
}

/// One independent map per (feature group, cascade layer), each `d_in -> d_k`.
/// The Basic branch gets none.
pub fn build_rff_maps<T: Scalar>(
    branch: BranchKind,
    groups: usize,
    layers: usize,
    d_in: usize,
    d_k: usize,
    sigma: f64,
    seed: u64,
) -> Vec<Vec<RffMap<T>>> {
    if branch == BranchKind::Basic {
        return Vec::new();
    }
    let mut rng = task_rng(seed);
    (0..groups)
        .map(|_| {
            (0..layers)
                .map(|_| RffMap::sample(d_in, d_k, sigma, &mut rng))
                .collect()
        })
        .collect()
}
