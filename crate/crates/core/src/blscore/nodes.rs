use ndarray::{concatenate, Array1, Array2, ArrayView2, Axis};

use super::Activation;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::skp::{rff_map, RffMap};

/// Random weights of a grouped, cascaded node layer, indexed `[group][layer]`.
/// Biases are row vectors broadcast over patches.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeBank<T> {
    pub weights: Vec<Vec<Array2<T>>>,
    pub biases: Vec<Vec<Array1<T>>>,
    pub activation: Activation,
}

impl<T: Scalar> NodeBank<T> {
    pub fn groups(&self) -> usize {
        self.weights.len()
    }

    pub fn layers(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    /// Total width of the concatenated outputs of every group and layer.
    pub fn output_width(&self) -> usize {
        self.weights.iter().flatten().map(|w| w.ncols()).sum()
    }

    fn layer(&self, input: ArrayView2<'_, T>, group: usize, layer: usize) -> Result<Array2<T>> {
        let w = &self.weights[group][layer];
        let b = &self.biases[group][layer];
        if input.ncols() != w.nrows() || w.ncols() != b.len() {
            return Err(Error::ShapeMismatch(format!(
                "group {group} layer {layer}: input width {}, weight {:?}, bias {}",
                input.ncols(),
                w.dim(),
                b.len()
            )));
        }
        Ok(input.dot(w) + b)
    }
}

/// Concatenated latent representation of a patch matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentFeatures<T> {
    /// Feature node outputs, `[N_patch x T_ft]`.
    pub z: Array2<T>,
    /// Enhancement node outputs, `[N_patch x T_enh]`.
    pub h: Array2<T>,
    /// `[Z | H]`.
    pub a: Array2<T>,
}

impl<T: Scalar> LatentFeatures<T> {
    pub fn assemble(z: Array2<T>, h: Array2<T>) -> Result<Self> {
        let a = concatenate(Axis(1), &[z.view(), h.view()])
            .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        Ok(Self { z, h, a })
    }
}

/// Runs the feature cascade of every group and concatenates the layer
/// outputs, groups outer and layers inner.
///
/// When `rff` is non-empty, each layer's activated output is replaced by its
/// random Fourier features before being stored and fed to the next layer.
pub fn gen_feature_nodes<T: Scalar>(
    x: ArrayView2<'_, T>,
    bank: &NodeBank<T>,
    rff: &[Vec<RffMap<T>>],
) -> Result<Array2<T>> {
    let mut blocks = Vec::with_capacity(bank.groups() * bank.layers());
    for (g, layers) in bank.weights.iter().enumerate() {
        let mut input = x.to_owned();
        for l in 0..layers.len() {
            let mut z = bank.layer(input.view(), g, l)?;
            let act = bank.activation;
            z.mapv_inplace(|v| act.apply(v));
            if let Some(map) = rff.get(g).and_then(|maps| maps.get(l)) {
                z = rff_map(z.view(), map)?;
            }
            blocks.push(z.clone());
            input = z;
        }
    }
    concat(x.nrows(), &blocks)
}

fn concat<T: Scalar>(rows: usize, blocks: &[Array2<T>]) -> Result<Array2<T>> {
    if blocks.is_empty() {
        return Ok(Array2::zeros((rows, 0)));
    }
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    concatenate(Axis(1), &views).map_err(|e| Error::ShapeMismatch(e.to_string()))
}

enum Shrink<'a, T> {
    Estimate(T),
    Reuse(&'a [Vec<T>]),
}

fn enhancement<T: Scalar>(
    z: ArrayView2<'_, T>,
    bank: &NodeBank<T>,
    shrink: Shrink<'_, T>,
) -> Result<(Array2<T>, Vec<Vec<T>>)> {
    let mut blocks = Vec::with_capacity(bank.groups() * bank.layers());
    let mut scales = Vec::with_capacity(bank.groups());
    for (g, layers) in bank.weights.iter().enumerate() {
        let mut group_scales = Vec::with_capacity(layers.len());
        let mut input = z.to_owned();
        for l in 0..layers.len() {
            let mut p = bank.layer(input.view(), g, l)?;
            let scale = match shrink {
                Shrink::Estimate(s) => {
                    let peak = p.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                    s / peak.max(T::lit(1e-12))
                }
                Shrink::Reuse(stored) => *stored
                    .get(g)
                    .and_then(|row| row.get(l))
                    .ok_or_else(|| Error::ShapeMismatch("missing enhancement scale".into()))?,
            };
            let act = bank.activation;
            p.mapv_inplace(|v| act.apply(v * scale));
            group_scales.push(scale);
            blocks.push(p.clone());
            input = p;
        }
        scales.push(group_scales);
    }
    Ok((concat(z.nrows(), &blocks)?, scales))
}

/// Enhancement cascade on training features. Each pre-activation is scaled
/// so its largest magnitude equals `shrink_s`; the scales are returned for
/// reuse at inference.
pub fn gen_enhancement_nodes<T: Scalar>(
    z: ArrayView2<'_, T>,
    bank: &NodeBank<T>,
    shrink_s: T,
) -> Result<(Array2<T>, Vec<Vec<T>>)> {
    enhancement(z, bank, Shrink::Estimate(shrink_s))
}

/// Enhancement cascade with frozen scales.
pub fn apply_enhancement_nodes<T: Scalar>(
    z: ArrayView2<'_, T>,
    bank: &NodeBank<T>,
    scales: &[Vec<T>],
) -> Result<Array2<T>> {
    Ok(enhancement(z, bank, Shrink::Reuse(scales))?.0)
}
