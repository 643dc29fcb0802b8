//! Multi-scale ensemble over dual-branch sub-models.
//!
//! One dual model is fitted and scored per patch size and the resulting
//! score series are averaged pointwise. In sequential mode (SE) sub-models
//! run one after another on the calling thread; in parallel mode (PE) every
//! sub-model, and within it every `(channel x branch)` fit, is an independent
//! task on a worker pool. Results are gathered by index and every task seeds
//! its own generator, so both modes return bit-identical scores.

use std::time::Instant;

use ndarray::{Array1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blscore::BlsParams;
use crate::contrast::{dual_score, fit_dual, ScoreSeries};
use crate::dataio::{ExecMode, RunConfig, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::patching::split_channels;
use crate::scalar::Scalar;
use crate::seed::SeedPlan;

/// Wall-clock cost of one sub-model, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubModelTiming {
    pub patch_size: usize,
    pub fit_seconds: f64,
    pub score_seconds: f64,
}

impl SubModelTiming {
    pub fn total(&self) -> f64 {
        self.fit_seconds + self.score_seconds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRun<T> {
    /// One series per configured patch size, in configuration order.
    pub sub_scores: Vec<ScoreSeries<T>>,
    pub final_scores: ScoreSeries<T>,
    pub timings: Vec<SubModelTiming>,
    pub wall_clock: f64,
    pub exec_mode: ExecMode,
}

/// Execution knobs that do not change the scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Worker threads for PE mode; `None` uses every available core.
    pub threads: Option<usize>,
    /// Corrupts seed derivation on the PE path. Only for exercising the
    /// SE/PE equivalence check.
    pub inject_seed_fault: bool,
}

/// Pointwise mean of the sub-model scores, optionally after min-max
/// normalising each series.
pub fn aggregate_scores<T: Scalar>(
    sub_scores: &[ScoreSeries<T>],
    minmax: bool,
) -> Result<ScoreSeries<T>> {
    let first = sub_scores
        .first()
        .ok_or_else(|| Error::InvalidInput("no score series to aggregate".into()))?;
    let n = first.len();
    let mut acc = vec![T::zero(); n];
    for s in sub_scores {
        if s.len() != n {
            return Err(Error::LengthMismatch {
                left: s.len(),
                right: n,
            });
        }
        if minmax {
            let lo = s.scores.iter().copied().fold(T::infinity(), T::min);
            let hi = s.scores.iter().copied().fold(T::neg_infinity(), T::max);
            let range = hi - lo;
            for (a, &v) in acc.iter_mut().zip(&s.scores) {
                if range > T::zero() {
                    *a += (v - lo) / range;
                }
            }
        } else {
            for (a, &v) in acc.iter_mut().zip(&s.scores) {
                *a += v;
            }
        }
    }
    if sub_scores.len() > 1 || minmax {
        let k = T::from_usize(sub_scores.len()).unwrap();
        acc.iter_mut().for_each(|a| *a /= k);
    }
    Ok(ScoreSeries {
        scores: acc,
        patch_sizes: sub_scores
            .iter()
            .flat_map(|s| s.patch_sizes.clone())
            .collect(),
    })
}

struct SubModelOutput<T> {
    scores: ScoreSeries<T>,
    timing: SubModelTiming,
}

fn run_sub_model<T: Scalar>(
    train: &[Array1<T>],
    test: &[Array1<T>],
    params: &BlsParams,
    patch_size: usize,
    seeds: SeedPlan,
    parallel: bool,
) -> Result<SubModelOutput<T>> {
    let t0 = Instant::now();
    let dual = fit_dual(train, params, patch_size, &seeds, parallel)?;
    let fit_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let scores = dual_score(&dual, test, parallel)?;
    let score_seconds = t1.elapsed().as_secs_f64();
    Ok(SubModelOutput {
        scores,
        timing: SubModelTiming {
            patch_size,
            fit_seconds,
            score_seconds,
        },
    })
}

/// Runs every scale on `train`/`test` (rows = timesteps) and averages.
/// The inputs are used as given; normalise them beforehand.
pub fn run_on_matrices<T: Scalar>(
    train: ArrayView2<'_, T>,
    test: ArrayView2<'_, T>,
    config: &RunConfig,
    options: &RunOptions,
) -> Result<EnsembleRun<T>> {
    config.validate()?;
    if train.ncols() != test.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "train has {} channels, test has {}",
            train.ncols(),
            test.ncols()
        )));
    }
    let train_ch = split_channels(train);
    let test_ch = split_channels(test);
    let params = BlsParams::from(config);
    let mode = config.exec_mode;
    let plan = |idx: usize| SeedPlan {
        faulty: options.inject_seed_fault && mode == ExecMode::PE,
        ..SeedPlan::new(config.master_seed, idx)
    };

    let start = Instant::now();
    let outputs: Vec<Result<SubModelOutput<T>>> = match mode {
        ExecMode::SE => config
            .patch_sizes
            .iter()
            .enumerate()
            .map(|(i, &s)| run_sub_model(&train_ch, &test_ch, &params, s, plan(i), false))
            .collect(),
        ExecMode::PE => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(t) = options.threads {
                builder = builder.num_threads(t.max(1));
            }
            let pool = builder
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            pool.install(|| {
                config
                    .patch_sizes
                    .par_iter()
                    .enumerate()
                    .map(|(i, &s)| run_sub_model(&train_ch, &test_ch, &params, s, plan(i), true))
                    .collect()
            })
        }
    };
    let wall_clock = start.elapsed().as_secs_f64();

    let mut sub_scores = Vec::with_capacity(outputs.len());
    let mut timings = Vec::with_capacity(outputs.len());
    for out in outputs {
        let out = out?;
        sub_scores.push(out.scores);
        timings.push(out.timing);
    }
    let final_scores = aggregate_scores(&sub_scores, config.score_minmax)?;
    Ok(EnsembleRun {
        sub_scores,
        final_scores,
        timings,
        wall_clock,
        exec_mode: mode,
    })
}

/// Full multi-scale detector on a dataset's train/test portions.
pub fn run_cpatchbls<T: Scalar>(
    dataset: &TimeSeriesDataset<T>,
    config: &RunConfig,
) -> Result<EnsembleRun<T>> {
    run_with_options(dataset, config, &RunOptions::default())
}

pub fn run_with_options<T: Scalar>(
    dataset: &TimeSeriesDataset<T>,
    config: &RunConfig,
    options: &RunOptions,
) -> Result<EnsembleRun<T>> {
    run_on_matrices(
        dataset.train_values.view(),
        dataset.test_values.view(),
        config,
        options,
    )
}

/// Timing summary of a run; also the timing JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub exec_mode: ExecMode,
    pub scales: Vec<SubModelTiming>,
    /// Sum of sub-model durations (sequential-equivalent cost).
    pub se_total: f64,
    /// Slowest sub-model (parallel-equivalent cost).
    pub pe_total: f64,
    pub wall_clock: f64,
}

pub fn timing_report(
    timings: &[SubModelTiming],
    wall_clock: f64,
    exec_mode: ExecMode,
) -> TimingReport {
    let totals = timings.iter().map(SubModelTiming::total);
    TimingReport {
        exec_mode,
        scales: timings.to_vec(),
        se_total: totals.clone().sum(),
        pe_total: totals.fold(0.0, f64::max),
        wall_clock,
    }
}

pub fn measure_timings<T>(run: &EnsembleRun<T>) -> TimingReport {
    timing_report(&run.timings, run.wall_clock, run.exec_mode)
}
