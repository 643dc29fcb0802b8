//! Dual-branch contrastive scoring.
//!
//! Both branches reconstruct the same test patches. Each reconstruction row
//! is turned into a distribution over the patch axis with a softmax, and the
//! per-cell contributions to the symmetric KL divergence between the two
//! distributions become per-timestep scores. Channels are averaged.

use ndarray::{Array1, Array2, ArrayView2, Zip};
use rayon::prelude::*;

use crate::blscore::{
    fit_patchbls, reconstruct, BlsParams, BranchKind, ChannelModel, PatchBlsModel,
};
use crate::error::{Error, Result};
use crate::patching::{patchify, unpatchify};
use crate::scalar::Scalar;
use crate::seed::SeedPlan;

/// Probability floor applied after the softmax.
pub const PROB_FLOOR: f64 = 1e-12;

/// The Basic and SKP branches fitted at one patch size.
#[derive(Debug, Clone, PartialEq)]
pub struct DualModel<T> {
    pub basic: PatchBlsModel<T>,
    pub skp: PatchBlsModel<T>,
    pub patch_size: usize,
}

impl<T: Scalar> DualModel<T> {
    pub fn n_channels(&self) -> usize {
        self.basic.channels.len()
    }
}

/// Per-timestep anomaly scores aligned to the test series.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries<T> {
    pub scores: Vec<T>,
    /// Patch sizes that produced the scores.
    pub patch_sizes: Vec<usize>,
}

impl<T: Scalar> ScoreSeries<T> {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Row-wise softmax with max subtraction, floored at [`PROB_FLOOR`] and renormalised.
pub fn softmax_rows<T: Scalar>(m: ArrayView2<'_, T>) -> Array2<T> {
    let floor = T::lit(PROB_FLOOR);
    let mut out = m.to_owned();
    for mut row in out.rows_mut() {
        let max = row.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| (v / sum).max(floor));
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// `½ p ln(p/q) + ½ q ln(q/p)` per cell. Row sums are the symmetric KL of the rows.
pub fn sym_kl_cells<T: Scalar>(p: ArrayView2<'_, T>, q: ArrayView2<'_, T>) -> Result<Array2<T>> {
    if p.dim() != q.dim() {
        return Err(Error::ShapeMismatch(format!(
            "distribution grids {:?} vs {:?}",
            p.dim(),
            q.dim()
        )));
    }
    let half = T::lit(0.5);
    let mut out = Array2::zeros(p.dim());
    Zip::from(&mut out).and(p).and(q).for_each(|o, &pi, &qi| {
        *o = half * pi * (pi / qi).ln() + half * qi * (qi / pi).ln();
    });
    Ok(out)
}

/// Disagreement cells between two reconstructions of the same patches.
pub fn disagreement_cells<T: Scalar>(
    skp_recon: ArrayView2<'_, T>,
    basic_recon: ArrayView2<'_, T>,
) -> Result<Array2<T>> {
    let p = softmax_rows(skp_recon);
    let q = softmax_rows(basic_recon);
    sym_kl_cells(p.view(), q.view())
}

pub(crate) fn run_indexed<O: Send>(
    n: usize,
    parallel: bool,
    f: impl Fn(usize) -> O + Sync + Send,
) -> Vec<O> {
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Fits both branches for every channel on training data.
///
/// The `(channel x branch)` tasks run concurrently when `parallel` is set;
/// each draws from its own seed so the result does not depend on scheduling.
pub fn fit_dual<T: Scalar>(
    train_channels: &[Array1<T>],
    params: &BlsParams,
    patch_size: usize,
    seeds: &SeedPlan,
    parallel: bool,
) -> Result<DualModel<T>> {
    if train_channels.is_empty() || train_channels.iter().any(|c| c.is_empty()) {
        return Err(Error::InvalidInput("training data is empty".into()));
    }
    let grids = train_channels
        .iter()
        .map(|c| patchify(c.as_slice().expect("contiguous channel"), patch_size))
        .collect::<Result<Vec<_>>>()?;
    let n_ch = grids.len();
    let branches = [BranchKind::Basic, BranchKind::Skp];
    let fitted: Vec<Result<ChannelModel<T>>> = run_indexed(n_ch * 2, parallel, |task| {
        let (channel, branch) = (task / 2, branches[task % 2]);
        let seed = seeds.seed(branch.id(), channel as u64);
        fit_patchbls(&grids[channel], params, branch, seed)
    });
    let mut basic = Vec::with_capacity(n_ch);
    let mut skp = Vec::with_capacity(n_ch);
    for (task, m) in fitted.into_iter().enumerate() {
        if task % 2 == 0 {
            basic.push(m?);
        } else {
            skp.push(m?);
        }
    }
    Ok(DualModel {
        basic: PatchBlsModel {
            branch_kind: BranchKind::Basic,
            patch_size,
            channels: basic,
        },
        skp: PatchBlsModel {
            branch_kind: BranchKind::Skp,
            patch_size,
            channels: skp,
        },
        patch_size,
    })
}

/// Per-timestep disagreement of one channel.
pub fn channel_score<T: Scalar>(
    basic: &ChannelModel<T>,
    skp: &ChannelModel<T>,
    test: &[T],
    patch_size: usize,
) -> Result<Vec<T>> {
    let grid = patchify(test, patch_size)?;
    let rb = reconstruct(basic, &grid)?;
    let rs = reconstruct(skp, &grid)?;
    let cells = disagreement_cells(rs.view(), rb.view())?;
    Ok(unpatchify(&grid.with_cells(cells)?))
}

/// Averages per-channel score vectors in channel order.
pub fn channel_mean<T: Scalar>(per_channel: &[Vec<T>]) -> Result<Vec<T>> {
    let n = per_channel
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidInput("no channels to average".into()))?;
    let mut acc = vec![T::zero(); n];
    for ch in per_channel {
        if ch.len() != n {
            return Err(Error::LengthMismatch {
                left: ch.len(),
                right: n,
            });
        }
        for (a, &v) in acc.iter_mut().zip(ch) {
            *a += v;
        }
    }
    let c = T::from_usize(per_channel.len()).unwrap();
    acc.iter_mut().for_each(|a| *a /= c);
    Ok(acc)
}

/// Scores the test channels with a fitted dual model.
pub fn dual_score<T: Scalar>(
    dual: &DualModel<T>,
    test_channels: &[Array1<T>],
    parallel: bool,
) -> Result<ScoreSeries<T>> {
    if test_channels.len() != dual.n_channels() || dual.skp.channels.len() != dual.n_channels() {
        return Err(Error::ShapeMismatch(format!(
            "{} test channels for a model with {}",
            test_channels.len(),
            dual.n_channels()
        )));
    }
    let per_channel = run_indexed(test_channels.len(), parallel, |c| {
        channel_score(
            &dual.basic.channels[c],
            &dual.skp.channels[c],
            test_channels[c].as_slice().expect("contiguous channel"),
            dual.patch_size,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let scores = channel_mean(&per_channel)?;
    Ok(ScoreSeries {
        scores,
        patch_sizes: vec![dual.patch_size],
    })
}
