//! Patch-based broad learning system for unsupervised multivariate
//! time-series anomaly detection.
//!
//! Each channel is cut into non-overlapping patches and reconstructed by two
//! closed-form broad learning models: a basic one and one whose feature nodes
//! pass through random Fourier features. The symmetric KL divergence between
//! their row-softmaxed reconstructions is the anomaly score, averaged over
//! channels and over several patch sizes.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below name the common instantiations.

pub mod blscore;
pub mod contrast;
pub mod dataio;
pub mod dump;
pub mod ensemble;
pub mod error;
pub mod evalmetrics;
pub mod linalg;
pub mod patching;
pub mod scalar;
pub mod seed;
pub mod skp;

pub use blscore::{Activation, BlsParams, BranchKind};
pub use dataio::{ExecMode, RunConfig};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TimeSeriesDatasetF64 = dataio::TimeSeriesDataset<f64>;
pub type TimeSeriesDatasetF32 = dataio::TimeSeriesDataset<f32>;
pub type PatchGridF64 = patching::PatchGrid<f64>;
pub type PatchGridF32 = patching::PatchGrid<f32>;
pub type PatchBlsModelF64 = blscore::PatchBlsModel<f64>;
pub type PatchBlsModelF32 = blscore::PatchBlsModel<f32>;
pub type ChannelModelF64 = blscore::ChannelModel<f64>;
pub type ChannelModelF32 = blscore::ChannelModel<f32>;
pub type RffMapF64 = skp::RffMap<f64>;
pub type RffMapF32 = skp::RffMap<f32>;
pub type DualModelF64 = contrast::DualModel<f64>;
pub type DualModelF32 = contrast::DualModel<f32>;
pub type ScoreSeriesF64 = contrast::ScoreSeries<f64>;
pub type ScoreSeriesF32 = contrast::ScoreSeries<f32>;
pub type EnsembleRunF64 = ensemble::EnsembleRun<f64>;
pub type EnsembleRunF32 = ensemble::EnsembleRun<f32>;
