//! Threshold-free and thresholded detection metrics.
//!
//! * ROC-AUC as the Mann-Whitney statistic with mid-ranks for ties.
//! * PR-AUC as average precision, equal scores forming a single cut.
//! * PA-F1: predictions are point-adjusted (a ground-truth segment counts as
//!   fully detected once any of its points is flagged) before counting.
//!
//! A timestep is flagged when its score is strictly greater than `δ`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaMode {
    /// `δ` is the `(1 − anomaly_ratio)` quantile of the scores.
    RatioThreshold,
    /// `δ` maximises PA-F1 over all distinct scores.
    BestF1Sweep,
}

impl std::str::FromStr for PaMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ratio" | "ratio_threshold" => Ok(PaMode::RatioThreshold),
            "sweep" | "best_f1_sweep" | "best" => Ok(PaMode::BestF1Sweep),
            other => Err(format!("unknown PA mode {other:?}")),
        }
    }
}

/// Point-adjusted precision, recall and F1 at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaScore {
    pub pa_f1: f64,
    pub pa_precision: f64,
    pub pa_recall: f64,
    pub threshold_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub roc_auc: f64,
    pub pr_auc: f64,
    pub pa_f1: f64,
    pub pa_precision: f64,
    pub pa_recall: f64,
    pub threshold_delta: f64,
    pub mode: PaMode,
    pub ratio_threshold: PaScore,
    pub best_f1_sweep: PaScore,
}

fn check_lengths<T>(scores: &[T], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    Ok(())
}

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

pub fn roc_auc<T: Scalar>(scores: &[T], labels: &[u8]) -> Result<f64> {
    check_lengths(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels("ROC-AUC needs both classes"));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| cmp(&scores[a], &scores[b]));
    // sum of 1-based mid-ranks of positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && scores[idx[j]] == scores[idx[i]] {
            j += 1;
        }
        let mid = (i + 1 + j) as f64 / 2.0;
        let tied_pos = idx[i..j].iter().filter(|&&k| labels[k] == 1).count();
        rank_sum += mid * tied_pos as f64;
        i = j;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

pub fn pr_auc<T: Scalar>(scores: &[T], labels: &[u8]) -> Result<f64> {
    check_lengths(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 {
        return Err(Error::DegenerateLabels(
            "PR-AUC needs at least one positive",
        ));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| cmp(&scores[b], &scores[a]));
    let (mut tp, mut fp, mut ap) = (0usize, 0usize, 0.0);
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && scores[idx[j]] == scores[idx[i]] {
            j += 1;
        }
        let new_pos = idx[i..j].iter().filter(|&&k| labels[k] == 1).count();
        tp += new_pos;
        fp += (j - i) - new_pos;
        if new_pos > 0 {
            ap += (tp as f64 / (tp + fp) as f64) * (new_pos as f64 / pos as f64);
        }
        i = j;
    }
    Ok(ap)
}

/// Completes every ground-truth anomaly segment that contains a detection.
pub fn point_adjust(preds: &[u8], labels: &[u8]) -> Result<Vec<u8>> {
    if preds.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: labels.len(),
        });
    }
    let mut out = preds.to_vec();
    for (start, end) in segments(labels) {
        if preds[start..end].contains(&1) {
            out[start..end].iter_mut().for_each(|p| *p = 1);
        }
    }
    Ok(out)
}

/// Maximal runs of label 1 as half-open ranges.
fn segments(labels: &[u8]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut t = 0;
    while t < labels.len() {
        if labels[t] == 1 {
            let start = t;
            while t < labels.len() && labels[t] == 1 {
                t += 1;
            }
            out.push((start, t));
        } else {
            t += 1;
        }
    }
    out
}

/// Linear-interpolation quantile of unsorted data, `q` in `[0, 1]`.
pub fn quantile<T: Scalar>(values: &[T], q: f64) -> T {
    let mut v = values.to_vec();
    v.sort_by(cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    let frac = T::lit(h - lo as f64);
    v[lo] + frac * (v[hi] - v[lo])
}

/// Flags `score > δ` with `δ` the `(1 − anomaly_ratio)` quantile.
pub fn threshold_by_ratio<T: Scalar>(scores: &[T], anomaly_ratio: f64) -> Result<(Vec<u8>, T)> {
    if !(anomaly_ratio > 0.0 && anomaly_ratio < 1.0) {
        return Err(Error::InvalidInput(
            "anomaly ratio must lie in (0, 1)".into(),
        ));
    }
    if scores.is_empty() {
        return Err(Error::InvalidInput("no scores to threshold".into()));
    }
    let delta = quantile(scores, 1.0 - anomaly_ratio);
    Ok((flag(scores, delta), delta))
}

fn flag<T: Scalar>(scores: &[T], delta: T) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s > delta)).collect()
}

fn prf(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Precision, recall and F1 of already-adjusted predictions.
pub fn precision_recall_f1(preds: &[u8], labels: &[u8]) -> Result<(f64, f64, f64)> {
    if preds.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: labels.len(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&p, &l) in preds.iter().zip(labels) {
        match (p, l) {
            (1, 1) => tp += 1,
            (1, _) => fp += 1,
            (_, 1) => fn_ += 1,
            _ => {}
        }
    }
    Ok(prf(tp, fp, fn_))
}

fn pa_at_ratio<T: Scalar>(scores: &[T], labels: &[u8], ratio: f64) -> Result<PaScore> {
    let (preds, delta) = threshold_by_ratio(scores, ratio)?;
    let adjusted = point_adjust(&preds, labels)?;
    let (p, r, f1) = precision_recall_f1(&adjusted, labels)?;
    Ok(PaScore {
        pa_f1: f1,
        pa_precision: p,
        pa_recall: r,
        threshold_delta: delta.as_f64(),
    })
}

/// Best PA-F1 over thresholds at every distinct score, plus `δ = −∞`
/// (everything flagged). Ties keep the largest `δ`.
fn pa_sweep<T: Scalar>(scores: &[T], labels: &[u8]) -> PaScore {
    // A segment is detected iff its maximum score exceeds δ.
    let mut seg: Vec<(T, usize)> = segments(labels)
        .into_iter()
        .map(|(s, e)| {
            let m = scores[s..e].iter().copied().fold(T::neg_infinity(), T::max);
            (m, e - s)
        })
        .collect();
    seg.sort_by(|a, b| cmp(&b.0, &a.0));
    let mut normals: Vec<T> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 0)
        .map(|(&s, _)| s)
        .collect();
    normals.sort_by(|a, b| cmp(b, a));
    let total_pos: usize = seg.iter().map(|s| s.1).sum();

    let mut thresholds: Vec<T> = scores.to_vec();
    thresholds.sort_by(|a, b| cmp(b, a));
    thresholds.dedup();
    thresholds.push(T::neg_infinity());

    let (mut si, mut ni, mut tp, mut fp) = (0, 0, 0usize, 0usize);
    let mut best: Option<PaScore> = None;
    for &delta in &thresholds {
        while si < seg.len() && seg[si].0 > delta {
            tp += seg[si].1;
            si += 1;
        }
        while ni < normals.len() && normals[ni] > delta {
            fp += 1;
            ni += 1;
        }
        let (p, r, f1) = prf(tp, fp, total_pos - tp);
        if best.is_none_or(|b| f1 > b.pa_f1) {
            best = Some(PaScore {
                pa_f1: f1,
                pa_precision: p,
                pa_recall: r,
                threshold_delta: delta.as_f64(),
            });
        }
    }
    best.expect("at least one threshold")
}

pub fn pa_f1<T: Scalar>(
    scores: &[T],
    labels: &[u8],
    mode: PaMode,
    anomaly_ratio: f64,
) -> Result<PaScore> {
    check_lengths(scores, labels)?;
    if !labels.contains(&1) {
        return Err(Error::DegenerateLabels("PA-F1 needs at least one positive"));
    }
    match mode {
        PaMode::RatioThreshold => pa_at_ratio(scores, labels, anomaly_ratio),
        PaMode::BestF1Sweep => Ok(pa_sweep(scores, labels)),
    }
}

/// Every metric at once; `mode` selects which PA-F1 fills the top-level fields.
pub fn evaluate<T: Scalar>(
    scores: &[T],
    labels: &[u8],
    anomaly_ratio: f64,
    mode: PaMode,
) -> Result<MetricsReport> {
    check_lengths(scores, labels)?;
    let ratio = pa_f1(scores, labels, PaMode::RatioThreshold, anomaly_ratio)?;
    let sweep = pa_f1(scores, labels, PaMode::BestF1Sweep, anomaly_ratio)?;
    let chosen = match mode {
        PaMode::RatioThreshold => ratio,
        PaMode::BestF1Sweep => sweep,
    };
    Ok(MetricsReport {
        roc_auc: roc_auc(scores, labels)?,
        pr_auc: pr_auc(scores, labels)?,
        pa_f1: chosen.pa_f1,
        pa_precision: chosen.pa_precision,
        pa_recall: chosen.pa_recall,
        threshold_delta: chosen.threshold_delta,
        mode,
        ratio_threshold: ratio,
        best_f1_sweep: sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roc_examples() {
        let labels = [0, 0, 1, 1];
        assert_eq!(roc_auc(&[0.1, 0.2, 0.8, 0.9], &labels).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.9, 0.8, 0.2, 0.1], &labels).unwrap(), 0.0);
        assert_eq!(roc_auc(&[0.1, 0.4, 0.35, 0.8], &labels).unwrap(), 0.75);
        assert_eq!(roc_auc(&[0.5, 0.5, 0.5, 0.5], &labels).unwrap(), 0.5);
        assert!(matches!(
            roc_auc(&[0.1, 0.2], &[1, 1]),
            Err(Error::DegenerateLabels(_))
        ));
    }

    #[test]
    fn pr_examples() {
        assert_eq!(pr_auc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]).unwrap(), 1.0);
        let ap = pr_auc(&[0.9, 0.8, 0.7], &[1, 0, 1]).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(pr_auc(&[0.3, 0.1, 0.7], &[1, 1, 1]).unwrap(), 1.0);
        assert!(pr_auc(&[0.3], &[0]).is_err());
    }

    #[test]
    fn adjust_examples() {
        assert_eq!(
            point_adjust(&[0, 0, 1, 0], &[0, 1, 1, 0]).unwrap(),
            vec![0, 1, 1, 0]
        );
        assert_eq!(
            point_adjust(&[1, 0, 0, 0], &[0, 1, 1, 0]).unwrap(),
            vec![1, 0, 0, 0]
        );
        assert_eq!(point_adjust(&[0; 5], &[0, 1, 1, 0, 1]).unwrap(), vec![0; 5]);
        assert!(point_adjust(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn ratio_threshold_examples() {
        let (preds, delta) = threshold_by_ratio(&[1.0, 2.0, 3.0, 4.0], 0.25).unwrap();
        assert!((delta - 3.25f64).abs() < 1e-15);
        assert_eq!(preds, vec![0, 0, 0, 1]);
        let (preds, delta) = threshold_by_ratio(&[2.0; 5], 0.3).unwrap();
        assert_eq!(delta, 2.0);
        assert_eq!(preds, vec![0; 5]);
        let (preds, _) = threshold_by_ratio(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.99).unwrap();
        assert_eq!(preds.iter().filter(|&&p| p == 1).count(), 4);
    }

    #[test]
    fn hand_traced_pa_f1() {
        let labels = [0, 1, 1, 0, 0];
        let scores = [0.0, 0.0, 9.0, 0.0, 9.0];
        let r = pa_f1(&scores, &labels, PaMode::RatioThreshold, 0.4).unwrap();
        // linear interpolation: h = 4 * 0.6 = 2.4, δ = 0 + 0.4 * (9 - 0)
        assert!((r.threshold_delta - 3.6).abs() < 1e-12);
        assert!((r.pa_precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.pa_recall, 1.0);
        assert!((r.pa_f1 - 0.8).abs() < 1e-15);
        let s = pa_f1(&scores, &labels, PaMode::BestF1Sweep, 0.4).unwrap();
        assert!(s.pa_f1 >= r.pa_f1);
    }

    #[test]
    fn perfect_predictions() {
        let labels = [0, 1, 1, 0, 1];
        let scores = [0.0, 1.0, 1.0, 0.0, 1.0];
        let s = pa_f1(&scores, &labels, PaMode::BestF1Sweep, 0.5).unwrap();
        assert_eq!(s.pa_f1, 1.0);
        let rep = evaluate(&scores, &labels, 0.5, PaMode::BestF1Sweep).unwrap();
        assert_eq!(rep.roc_auc, 1.0);
        assert_eq!(rep.pa_f1, 1.0);
    }

    proptest! {
        #[test]
        fn roc_is_rank_invariant(vals in prop::collection::vec(-10.0f64..10.0, 2..60), seed in any::<u64>()) {
            let labels: Vec<u8> = (0..vals.len()).map(|i| ((seed >> (i % 64)) & 1) as u8).collect();
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            let base = roc_auc(&vals, &labels).unwrap();
            let exp: Vec<f64> = vals.iter().map(|v| v.exp()).collect();
            let affine: Vec<f64> = vals.iter().map(|v| 3.0 * v - 7.0).collect();
            prop_assert!((roc_auc(&exp, &labels).unwrap() - base).abs() < 1e-12);
            prop_assert!((roc_auc(&affine, &labels).unwrap() - base).abs() < 1e-12);
            let mut sorted = vals.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if sorted.windows(2).all(|w| w[0] != w[1]) {
                let neg: Vec<f64> = vals.iter().map(|v| -v).collect();
                prop_assert!((roc_auc(&neg, &labels).unwrap() + base - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn adjustment_is_idempotent(preds in prop::collection::vec(0u8..2, 1..80), seed in any::<u64>()) {
            let labels: Vec<u8> = (0..preds.len()).map(|i| ((seed >> (i / 3 % 64)) & 1) as u8).collect();
            let once = point_adjust(&preds, &labels).unwrap();
            prop_assert_eq!(point_adjust(&once, &labels).unwrap(), once);
        }

        #[test]
        fn sweep_dominates_ratio(vals in prop::collection::vec(0.0f64..5.0, 2..80), seed in any::<u64>(), ratio in 0.01f64..0.99) {
            let labels: Vec<u8> = (0..vals.len()).map(|i| ((seed >> (i / 4 % 64)) & 1) as u8).collect();
            prop_assume!(labels.contains(&1));
            let r = pa_f1(&vals, &labels, PaMode::RatioThreshold, ratio).unwrap();
            let s = pa_f1(&vals, &labels, PaMode::BestF1Sweep, ratio).unwrap();
            prop_assert!(s.pa_f1 >= r.pa_f1);
        }
    }
}
