use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::Scalar;

/// Modified Gram-Schmidt over the smaller side of `w`.
///
/// Columns are orthonormalised when `rows >= cols`, rows otherwise. Each
/// vector is projected twice against its predecessors. A vector whose
/// residual falls below `sqrt(eps)` of its original norm is replaced by a
/// random unit vector orthogonal to the ones before it, drawn from `rng`.
pub fn orthonormalize<T: Scalar, R: Rng + ?Sized>(w: ArrayView2<'_, T>, rng: &mut R) -> Array2<T> {
    let tall = w.nrows() >= w.ncols();
    let mut g = if tall { w.to_owned() } else { w.t().to_owned() };
    let (dim, k) = g.dim();
    let rel_tol = T::epsilon().sqrt();
    for j in 0..k {
        let mut v = g.column(j).to_owned();
        let orig = norm(&v);
        project_out(&g, j, &mut v);
        let mut nv = norm(&v);
        if orig.is_nan() || nv.is_nan() || orig <= T::zero() || nv <= rel_tol * orig {
            loop {
                let mut u: Array1<T> = (0..dim)
                    .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                    .collect();
                let before = norm(&u);
                project_out(&g, j, &mut u);
                nv = norm(&u);
                if nv > T::lit(0.1) * before {
                    v = u;
                    break;
                }
            }
        }
        v.mapv_inplace(|x| x / nv);
        g.column_mut(j).assign(&v);
    }
    if tall {
        g
    } else {
        g.reversed_axes().as_standard_layout().to_owned()
    }
}

fn norm<T: Scalar>(v: &Array1<T>) -> T {
    v.dot(v).sqrt()
}

fn project_out<T: Scalar>(basis: &Array2<T>, upto: usize, v: &mut Array1<T>) {
    for _ in 0..2 {
        for q in basis.axis_iter(Axis(1)).take(upto) {
            let c = q.dot(v);
            v.scaled_add(-c, &q);
        }
    }
}

/// Checks `GᵀG = I` on the smaller side of `w` within `tol`.
pub fn is_orthonormal<T: Scalar>(w: ArrayView2<'_, T>, tol: T) -> bool {
    let gram = if w.nrows() >= w.ncols() {
        w.t().dot(&w)
    } else {
        w.dot(&w.t())
    };
    gram.indexed_iter().all(|((i, j), &v)| {
        let target = if i == j { T::one() } else { T::zero() };
        (v - target).abs() <= tol
    })
}
