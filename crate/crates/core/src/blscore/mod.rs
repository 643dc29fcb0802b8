//! The PatchBLS encoder/decoder.
//!
//! A model is a stack of randomly initialised feature nodes (grouped and
//! cascaded), enhancement nodes fed by the concatenated feature output, and a
//! linear output head solved in closed form. The head reconstructs the input
//! patches; reconstruction error and branch disagreement are the anomaly
//! signals.

mod model;
mod nodes;
mod ortho;
mod ridge;
mod sae;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

pub use model::{fit_patchbls, recon_score, reconstruct, ChannelModel, OutputHead, PatchBlsModel};
pub use nodes::{
    apply_enhancement_nodes, gen_enhancement_nodes, gen_feature_nodes, LatentFeatures, NodeBank,
};
pub use ortho::{is_orthonormal, orthonormalize};
pub use ridge::{ridge_objective, ridge_solve};
pub use sae::{lasso_ista, sae_refine};

/// Elementwise nonlinearity of a node bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(T::zero()),
            Activation::Sigmoid => T::one() / (T::one() + (-x).exp()),
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" | "linear" => Ok(Activation::Identity),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(format!("unknown activation {other:?}")),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Activation::Identity => "identity",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
        })
    }
}

/// Which view of the data a model represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchKind {
    Basic,
    /// Feature outputs pass through a random Fourier feature map.
    Skp,
}

impl BranchKind {
    /// Coordinate used in per-task seed derivation.
    pub fn id(self) -> u64 {
        match self {
            BranchKind::Basic => 0,
            BranchKind::Skp => 1,
        }
    }
}

/// Layer hyperparameters of one PatchBLS, independent of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlsParams {
    pub d_ft: usize,
    pub g_ft: usize,
    pub c_ft: usize,
    pub d_enh: usize,
    pub g_enh: usize,
    pub c_enh: usize,
    pub shrink_s: f64,
    pub ridge_r: f64,
    pub d_k: usize,
    pub sigma: f64,
    pub feature_activation: Activation,
    pub enh_activation: Activation,
    pub sae_enabled: bool,
    pub sae_lambda: f64,
    pub sae_iters: usize,
}

impl From<&crate::dataio::RunConfig> for BlsParams {
    fn from(c: &crate::dataio::RunConfig) -> Self {
        Self {
            d_ft: c.d_ft,
            g_ft: c.g_ft,
            c_ft: c.c_ft,
            d_enh: c.d_enh,
            g_enh: c.g_enh,
            c_enh: c.c_enh,
            shrink_s: c.shrink_s,
            ridge_r: c.ridge_r,
            d_k: c.d_k,
            sigma: c.sigma,
            feature_activation: c.feature_activation,
            enh_activation: c.enh_activation,
            sae_enabled: c.sae_enabled,
            sae_lambda: c.sae_lambda,
            sae_iters: c.sae_iters,
        }
    }
}

impl Default for BlsParams {
    fn default() -> Self {
        (&crate::dataio::RunConfig::default()).into()
    }
}
