use ndarray::{Array1, Array2, ArrayView2};
use rand::{Rng, RngCore};

use super::nodes::{apply_enhancement_nodes, gen_enhancement_nodes, gen_feature_nodes};
use super::{
    orthonormalize, ridge_solve, sae_refine, BlsParams, BranchKind, LatentFeatures, NodeBank,
};
use crate::error::{Error, Result};
use crate::patching::PatchGrid;
use crate::scalar::Scalar;
use crate::seed::task_rng;
use crate::skp::{build_rff_maps, RffMap};

/// Trained decoder: `Ŷ = A W_o`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputHead<T> {
    /// `[(T_ft + T_enh) x S_patch]`.
    pub w_o: Array2<T>,
    pub lambda: T,
}

/// A fitted PatchBLS for a single channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel<T> {
    pub branch_kind: BranchKind,
    pub patch_size: usize,
    /// Length of the training series the model was fitted on.
    pub train_len: usize,
    pub feature_bank: NodeBank<T>,
    pub enhancement_bank: NodeBank<T>,
    pub enhancement_scales: Vec<Vec<T>>,
    /// Empty for the Basic branch.
    pub rff: Vec<Vec<RffMap<T>>>,
    pub head: OutputHead<T>,
}

impl<T: Scalar> ChannelModel<T> {
    pub fn latent(&self, x: ArrayView2<'_, T>) -> Result<LatentFeatures<T>> {
        let z = gen_feature_nodes(x, &self.feature_bank, &self.rff)?;
        let h =
            apply_enhancement_nodes(z.view(), &self.enhancement_bank, &self.enhancement_scales)?;
        LatentFeatures::assemble(z, h)
    }

    /// Forward pass on raw patches.
    pub fn forward(&self, x: ArrayView2<'_, T>) -> Result<Array2<T>> {
        if x.ncols() != self.patch_size {
            return Err(Error::ShapeMismatch(format!(
                "model expects patches of {}, got {}",
                self.patch_size,
                x.ncols()
            )));
        }
        Ok(self.latent(x)?.a.dot(&self.head.w_o))
    }
}

/// One independently fitted model per channel, all at the same patch size.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchBlsModel<T> {
    pub branch_kind: BranchKind,
    pub patch_size: usize,
    pub channels: Vec<ChannelModel<T>>,
}

fn uniform_matrix<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Array2<T> {
    Array2::from_shape_simple_fn((rows, cols), || T::lit(rng.random_range(-1.0..1.0)))
}

fn uniform_vector<T: Scalar, R: Rng + ?Sized>(len: usize, rng: &mut R) -> Array1<T> {
    Array1::from_shape_simple_fn(len, || T::lit(rng.random_range(-1.0..1.0)))
}

/// Fits one channel and also returns the training reconstruction.
pub(crate) fn fit_channel<T: Scalar>(
    grid: &PatchGrid<T>,
    params: &BlsParams,
    branch: BranchKind,
    seed: u64,
) -> Result<(ChannelModel<T>, Array2<T>)> {
    let x = grid.patches.view();
    if x.nrows() == 0 {
        return Err(Error::InvalidInput("cannot fit an empty patch grid".into()));
    }
    let s_patch = grid.patch_size;
    let mut rng = task_rng(seed);
    let skp = branch == BranchKind::Skp;
    let layer_out = if skp { params.d_k } else { params.d_ft };

    let mut ft_weights = Vec::with_capacity(params.g_ft);
    let mut ft_biases = Vec::with_capacity(params.g_ft);
    for _ in 0..params.g_ft {
        let mut ws = Vec::with_capacity(params.c_ft);
        let mut bs = Vec::with_capacity(params.c_ft);
        for layer in 0..params.c_ft {
            let d_in = if layer == 0 { s_patch } else { layer_out };
            let mut w = uniform_matrix::<T, _>(d_in, params.d_ft, &mut rng);
            let b = uniform_vector::<T, _>(params.d_ft, &mut rng);
            if layer == 0 && params.sae_enabled {
                w = sae_refine(
                    x,
                    w.view(),
                    &b,
                    params.feature_activation,
                    T::lit(params.sae_lambda),
                    params.sae_iters,
                )?;
            }
            ws.push(orthonormalize(w.view(), &mut rng));
            bs.push(b);
        }
        ft_weights.push(ws);
        ft_biases.push(bs);
    }
    let feature_bank = NodeBank {
        weights: ft_weights,
        biases: ft_biases,
        activation: params.feature_activation,
    };

    let rff = build_rff_maps(
        branch,
        params.g_ft,
        params.c_ft,
        params.d_ft,
        params.d_k,
        params.sigma,
        rng.next_u64(),
    );

    let t_ft = layer_out * params.c_ft * params.g_ft;
    let mut enh_weights = Vec::with_capacity(params.g_enh);
    let mut enh_biases = Vec::with_capacity(params.g_enh);
    for _ in 0..params.g_enh {
        let mut ws = Vec::with_capacity(params.c_enh);
        let mut bs = Vec::with_capacity(params.c_enh);
        for layer in 0..params.c_enh {
            let d_in = if layer == 0 { t_ft } else { params.d_enh };
            let w = uniform_matrix::<T, _>(d_in, params.d_enh, &mut rng);
            ws.push(orthonormalize(w.view(), &mut rng));
            bs.push(uniform_vector::<T, _>(params.d_enh, &mut rng));
        }
        enh_weights.push(ws);
        enh_biases.push(bs);
    }
    let enhancement_bank = NodeBank {
        weights: enh_weights,
        biases: enh_biases,
        activation: params.enh_activation,
    };

    let z = gen_feature_nodes(x, &feature_bank, &rff)?;
    let (h, enhancement_scales) =
        gen_enhancement_nodes(z.view(), &enhancement_bank, T::lit(params.shrink_s))?;
    let latent = LatentFeatures::assemble(z, h)?;
    let lambda = T::lit(params.ridge_r);
    let w_o = ridge_solve(latent.a.view(), x, lambda)?;
    let recon = latent.a.dot(&w_o);
    if recon.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(
            "non-finite training reconstruction".into(),
        ));
    }
    let model = ChannelModel {
        branch_kind: branch,
        patch_size: s_patch,
        train_len: grid.original_len,
        feature_bank,
        enhancement_bank,
        enhancement_scales,
        rff,
        head: OutputHead { w_o, lambda },
    };
    Ok((model, recon))
}

/// Fits a single-channel PatchBLS that reconstructs its own training patches.
pub fn fit_patchbls<T: Scalar>(
    train_grid: &PatchGrid<T>,
    params: &BlsParams,
    branch: BranchKind,
    seed: u64,
) -> Result<ChannelModel<T>> {
    fit_channel(train_grid, params, branch, seed).map(|(m, _)| m)
}

pub fn reconstruct<T: Scalar>(model: &ChannelModel<T>, grid: &PatchGrid<T>) -> Result<Array2<T>> {
    if grid.patch_size != model.patch_size {
        return Err(Error::ShapeMismatch(format!(
            "grid patch size {} differs from model patch size {}",
            grid.patch_size, model.patch_size
        )));
    }
    model.forward(grid.patches.view())
}

/// Per-cell squared reconstruction error.
pub fn recon_score<T: Scalar>(y: ArrayView2<'_, T>, y_hat: ArrayView2<'_, T>) -> Result<Array2<T>> {
    if y.dim() != y_hat.dim() {
        return Err(Error::ShapeMismatch(format!(
            "target {:?} vs reconstruction {:?}",
            y.dim(),
            y_hat.dim()
        )));
    }
    let mut d = &y - &y_hat;
    d.mapv_inplace(|v| v * v);
    Ok(d)
}
