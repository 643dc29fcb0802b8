//! Channel splitting and non-overlapping patch tiling.
//!
//! Timestep `t` of a series lives at cell `(t / S, t % S)` of its grid. When
//! `S` does not divide the length, the series is right-padded by repeating its
//! last value; [`unpatchify`] trims the padding back off.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PatchGrid<T> {
    /// `[N_patch x S_patch]`, consecutive segments of the padded series.
    pub patches: Array2<T>,
    pub original_len: usize,
    pub pad_len: usize,
    pub patch_size: usize,
}

impl<T: Scalar> PatchGrid<T> {
    pub fn n_patches(&self) -> usize {
        self.patches.nrows()
    }

    /// Builds a grid with the same layout as `self` around other cell values.
    pub fn with_cells(&self, cells: Array2<T>) -> Result<Self> {
        if cells.dim() != self.patches.dim() {
            return Err(Error::ShapeMismatch(format!(
                "cell grid {:?} does not match patch grid {:?}",
                cells.dim(),
                self.patches.dim()
            )));
        }
        Ok(Self {
            patches: cells,
            original_len: self.original_len,
            pad_len: self.pad_len,
            patch_size: self.patch_size,
        })
    }
}

/// Column `i` of `x` becomes series `i`.
pub fn split_channels<T: Scalar>(x: ArrayView2<'_, T>) -> Vec<Array1<T>> {
    x.axis_iter(Axis(1)).map(|c| c.to_owned()).collect()
}

/// Inverse of [`split_channels`].
pub fn join_channels<T: Scalar>(channels: &[Array1<T>]) -> Result<Array2<T>> {
    let n = channels.first().map_or(0, |c| c.len());
    if channels.iter().any(|c| c.len() != n) {
        return Err(Error::ShapeMismatch("channels differ in length".into()));
    }
    Ok(Array2::from_shape_fn((n, channels.len()), |(t, c)| {
        channels[c][t]
    }))
}

pub fn patchify<T: Scalar>(series: &[T], patch_size: usize) -> Result<PatchGrid<T>> {
    let n = series.len();
    if n == 0 {
        return Err(Error::InvalidInput("cannot patch an empty series".into()));
    }
    if patch_size < 2 {
        return Err(Error::InvalidInput(format!(
            "patch size {patch_size} is below 2"
        )));
    }
    if patch_size > 2 * n {
        return Err(Error::PatchTooLarge { patch_size, len: n });
    }
    let n_patch = n.div_ceil(patch_size);
    let pad_len = n_patch * patch_size - n;
    let last = series[n - 1];
    let patches = Array2::from_shape_fn((n_patch, patch_size), |(r, c)| {
        series.get(r * patch_size + c).copied().unwrap_or(last)
    });
    Ok(PatchGrid {
        patches,
        original_len: n,
        pad_len,
        patch_size,
    })
}

/// Row-major concatenation of the grid, with the final `pad_len` cells dropped.
pub fn unpatchify<T: Scalar>(grid: &PatchGrid<T>) -> Vec<T> {
    grid.patches
        .iter()
        .copied()
        .take(grid.original_len)
        .collect()
}
