//! Acceptance suite: one line per criterion, nonzero exit if any criterion fails.
//!
//! Run with `cargo test -p cpatchbls-cli --test acceptance`. Criterion 1 needs
//! the PSM dataset; point `CPATCHBLS_PSM_DIR` at a directory holding
//! `train.csv`, `test.csv` and `test_label.csv` to enable it.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use cpatchbls::contrast::{dual_score, fit_dual, sym_kl_cells};
use cpatchbls::dataio::zscore_normalize;
use cpatchbls::ensemble::{measure_timings, run_on_matrices, RunOptions};
use cpatchbls::evalmetrics::{pa_f1, pr_auc, roc_auc, PaMode};
use cpatchbls::patching::{patchify, split_channels, unpatchify};
use cpatchbls::seed::SeedPlan;
use cpatchbls::skp::{rff_map, RffMap};
use cpatchbls::{Activation, BlsParams, ExecMode, RunConfig};
use cpatchbls_cli::synth::SynthSpec;
use nalgebra::DMatrix;
use ndarray::Array2;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cpatchbls")
}

fn run_bin(args: &[&str]) -> std::process::Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawn cpatchbls")
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn normalized(spec: &SynthSpec) -> (Array2<f64>, Array2<f64>, Vec<u8>) {
    let data = spec.generate();
    let (train, test, _) = zscore_normalize(&data.train, &data.test).unwrap();
    (train, test, data.labels)
}

fn synth_roc(seed: u64, patch_sizes: &[usize]) -> f64 {
    let (train, test, labels) = normalized(&SynthSpec {
        seed,
        ..SynthSpec::default()
    });
    let cfg = RunConfig {
        patch_sizes: patch_sizes.to_vec(),
        ..RunConfig::default()
    };
    let run = run_on_matrices(train.view(), test.view(), &cfg, &RunOptions::default()).unwrap();
    roc_auc(&run.final_scores.scores, &labels).unwrap()
}

/// Reads a PSM-style CSV: header row, leading timestamp column, blanks and NaN as 0.
fn read_psm(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .skip(1)
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .unwrap_or(0.0)
                })
                .collect()
        })
        .collect()
}

fn to_matrix(rows: Vec<Vec<f64>>) -> Array2<f64> {
    let cols = rows.first().map_or(0, Vec::len);
    Array2::from_shape_fn((rows.len(), cols), |(r, c)| rows[r][c])
}

fn criterion_1() -> Outcome {
    let Some(dir) = std::env::var_os("CPATCHBLS_PSM_DIR").map(PathBuf::from) else {
        return Outcome::Skip("CPATCHBLS_PSM_DIR not set (PSM dataset not supplied)".into());
    };
    let train = to_matrix(read_psm(&dir.join("train.csv")));
    let test = to_matrix(read_psm(&dir.join("test.csv")));
    let labels: Vec<u8> = read_psm(&dir.join("test_label.csv"))
        .iter()
        .map(|r| u8::from(r[0] > 0.5))
        .collect();
    let (train, test, _) = zscore_normalize(&train, &test).unwrap();
    let cfg = RunConfig {
        patch_sizes: vec![61, 6, 22],
        ..RunConfig::default()
    };
    let run = run_on_matrices(train.view(), test.view(), &cfg, &RunOptions::default()).unwrap();
    let roc = roc_auc(&run.final_scores.scores, &labels).unwrap();
    check(roc >= 0.98, format!("PSM ROC-AUC {roc:.4} (need >= 0.98)"))
}

fn criterion_2() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let start = Instant::now();
    let synth = run_bin(&["synth", "--out", p(d), "--seed", "7"]);
    assert!(
        synth.status.success(),
        "synth failed: {}",
        String::from_utf8_lossy(&synth.stderr)
    );
    let scores = d.join("scores.csv");
    let detect = run_bin(&[
        "detect",
        "--train",
        p(&d.join("train.csv")),
        "--test",
        p(&d.join("test.csv")),
        "--out",
        p(&scores),
    ]);
    assert!(
        detect.status.success(),
        "detect failed: {}",
        String::from_utf8_lossy(&detect.stderr)
    );
    let metrics = d.join("metrics.json");
    let eval = run_bin(&[
        "eval",
        "--scores",
        p(&scores),
        "--labels",
        p(&d.join("labels.csv")),
        "--out",
        p(&metrics),
    ]);
    assert!(
        eval.status.success(),
        "eval failed: {}",
        String::from_utf8_lossy(&eval.stderr)
    );
    let secs = start.elapsed().as_secs_f64();
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(metrics).unwrap()).unwrap();
    let roc = report["roc_auc"].as_f64().unwrap();
    let f1 = report["best_f1_sweep"]["pa_f1"].as_f64().unwrap();
    check(
        roc >= 0.90 && f1 >= 0.80 && secs < 60.0,
        format!("ROC-AUC {roc:.4} (>= 0.90), PA-F1 sweep {f1:.4} (>= 0.80), {secs:.1}s (< 60s)"),
    )
}

fn objective(a: &DMatrix<f64>, y: &DMatrix<f64>, w: &DMatrix<f64>, lambda: f64) -> f64 {
    (y - a * w).norm_squared() + lambda * w.norm_squared()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut beaten = 0usize;
    for i in 0..50 {
        let n = rng.random_range(1..=64);
        let d = rng.random_range(1..=64);
        let s = rng.random_range(1..=8);
        let lambda = [0.01, 0.1, 1.0][i % 3];
        let a = Array2::from_shape_simple_fn((n, d), || rng.sample::<f64, _>(StandardNormal));
        let y = Array2::from_shape_simple_fn((n, s), || rng.sample::<f64, _>(StandardNormal));
        let w = cpatchbls::blscore::ridge_solve(a.view(), y.view(), lambda).unwrap();

        let na = DMatrix::from_fn(n, d, |r, c| a[[r, c]]);
        let ny = DMatrix::from_fn(n, s, |r, c| y[[r, c]]);
        let gram = na.transpose() * &na + DMatrix::identity(d, d) * lambda;
        let oracle = gram
            .lu()
            .solve(&(na.transpose() * &ny))
            .expect("oracle solve");
        let nw = DMatrix::from_fn(d, s, |r, c| w[[r, c]]);
        worst = worst.max((&nw - &oracle).abs().max());

        let best = objective(&na, &ny, &nw, lambda);
        let all_worse = (0..200).all(|_| {
            let eps = 10f64.powf(rng.random_range(-3.0..-1.0));
            let delta = DMatrix::from_fn(d, s, |_, _| eps * rng.sample::<f64, _>(StandardNormal));
            objective(&na, &ny, &(&nw + delta), lambda) > best
        });
        beaten += usize::from(all_worse);
    }
    check(
        worst <= 1e-8 && beaten == 50,
        format!("max |W - oracle| = {worst:.2e} (<= 1e-8), optimal against 200 perturbations in {beaten}/50"),
    )
}

fn criterion_4() -> Outcome {
    let target = (-0.5f64).exp();
    let d_in = 6;
    let mut sum = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = RffMap::<f64>::sample(d_in, 4096, 1.0, &mut rng);
        let x: Vec<f64> = (0..d_in).map(|_| rng.sample(StandardNormal)).collect();
        let dir: Vec<f64> = (0..d_in).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pair = Array2::from_shape_fn((2, d_in), |(r, c)| {
            x[c] + if r == 1 { dir[c] / norm } else { 0.0 }
        });
        let f = rff_map(pair.view(), &map).unwrap();
        sum += f.row(0).dot(&f.row(1));
    }
    let mean = sum / 20.0;
    check(
        (mean - target).abs() <= 0.05,
        format!("mean kernel estimate {mean:.4} vs exp(-0.5) = {target:.4} (tol 0.05)"),
    )
}

fn direct_sym_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| 0.5 * a * (a / b).ln() + 0.5 * b * (b / a).ln())
        .sum()
}

fn random_distribution(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = rng.random_range(1..=32);
        let pv = random_distribution(&mut rng, m);
        let qv = random_distribution(&mut rng, m);
        let pm = Array2::from_shape_vec((1, m), pv.clone()).unwrap();
        let qm = Array2::from_shape_vec((1, m), qv.clone()).unwrap();
        let cells = sym_kl_cells(pm.view(), qm.view()).unwrap();
        worst = worst.max((cells.sum() - direct_sym_kl(&pv, &qv)).abs());
    }

    let (train, test, _) = normalized(&SynthSpec {
        n_train: 384,
        n_test: 200,
        channels: 2,
        seed: 5,
        ..SynthSpec::default()
    });
    let params = BlsParams::from(&RunConfig::default());
    let mut dual = fit_dual(
        &split_channels(train.view()),
        &params,
        8,
        &SeedPlan::new(0, 0),
        false,
    )
    .unwrap();
    dual.skp = dual.basic.clone();
    let scores = dual_score(&dual, &split_channels(test.view()), false).unwrap();
    let all_zero = scores.scores.iter().all(|&v| v == 0.0);
    check(
        worst <= 1e-12 && all_zero && scores.len() == 200,
        format!("max row-sum error {worst:.2e} over 1000 pairs (<= 1e-12); identical branches give all-zero scores: {all_zero}"),
    )
}

fn brute_roc(s: &[f64], l: &[u8]) -> f64 {
    let mut acc = 0.0;
    let mut pairs = 0.0;
    for i in 0..s.len() {
        for j in 0..s.len() {
            if l[i] == 1 && l[j] == 0 {
                pairs += 1.0;
                acc += if s[i] > s[j] {
                    1.0
                } else if s[i] == s[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    acc / pairs
}

fn brute_ap(s: &[f64], l: &[u8]) -> f64 {
    let positives = l.iter().filter(|&&v| v == 1).count() as f64;
    let mut cuts: Vec<f64> = s.to_vec();
    cuts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    cuts.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for t in cuts {
        let flagged: Vec<usize> = (0..s.len()).filter(|&i| s[i] >= t).collect();
        let tp = flagged.iter().filter(|&&i| l[i] == 1).count() as f64;
        let recall = tp / positives;
        ap += (recall - prev_recall) * tp / flagged.len() as f64;
        prev_recall = recall;
    }
    ap
}

fn brute_adjust(preds: &[u8], l: &[u8]) -> Vec<u8> {
    let mut out = preds.to_vec();
    for t in 0..l.len() {
        if l[t] == 0 {
            continue;
        }
        let mut lo = t;
        while lo > 0 && l[lo - 1] == 1 {
            lo -= 1;
        }
        let mut hi = t;
        while hi + 1 < l.len() && l[hi + 1] == 1 {
            hi += 1;
        }
        if preds[lo..=hi].contains(&1) {
            out[t] = 1;
        }
    }
    out
}

fn brute_f1(preds: &[u8], l: &[u8]) -> f64 {
    let adj = brute_adjust(preds, l);
    let tp = (0..l.len()).filter(|&i| adj[i] == 1 && l[i] == 1).count() as f64;
    let fp = (0..l.len()).filter(|&i| adj[i] == 1 && l[i] == 0).count() as f64;
    let fn_ = (0..l.len()).filter(|&i| adj[i] == 0 && l[i] == 1).count() as f64;
    if tp == 0.0 {
        return 0.0;
    }
    let (p, r) = (tp / (tp + fp), tp / (tp + fn_));
    2.0 * p * r / (p + r)
}

fn brute_ratio_f1(s: &[f64], l: &[u8], ratio: f64) -> f64 {
    let mut sorted = s.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = (1.0 - ratio) * (s.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    let delta = sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64);
    let preds: Vec<u8> = s.iter().map(|&v| u8::from(v > delta)).collect();
    brute_f1(&preds, l)
}

fn brute_sweep_f1(s: &[f64], l: &[u8]) -> f64 {
    std::iter::once(f64::NEG_INFINITY)
        .chain(s.iter().copied())
        .map(|delta| {
            let preds: Vec<u8> = s.iter().map(|&v| u8::from(v > delta)).collect();
            brute_f1(&preds, l)
        })
        .fold(0.0, f64::max)
}

fn random_labels(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    let mut l = Vec::with_capacity(n);
    let mut state = 0u8;
    for _ in 0..n {
        let flip = if state == 0 { 0.08 } else { 0.3 };
        if rng.random_bool(flip) {
            state = 1 - state;
        }
        l.push(state);
    }
    if !l.contains(&1) {
        l[rng.random_range(0..n)] = 1;
    }
    if !l.contains(&0) {
        l[rng.random_range(0..n)] = 0;
    }
    l
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(2..=200);
        let labels = random_labels(&mut rng, n);
        let scores: Vec<f64> = if i % 2 == 0 {
            (0..n).map(|_| rng.random_range(0..6) as f64).collect()
        } else {
            (0..n).map(|_| rng.random::<f64>()).collect()
        };
        let ratio = rng.random_range(0.01..0.3);
        let diffs = [
            roc_auc(&scores, &labels).unwrap() - brute_roc(&scores, &labels),
            pr_auc(&scores, &labels).unwrap() - brute_ap(&scores, &labels),
            pa_f1(&scores, &labels, PaMode::RatioThreshold, ratio)
                .unwrap()
                .pa_f1
                - brute_ratio_f1(&scores, &labels, ratio),
            pa_f1(&scores, &labels, PaMode::BestF1Sweep, ratio)
                .unwrap()
                .pa_f1
                - brute_sweep_f1(&scores, &labels),
        ];
        worst = diffs.iter().fold(worst, |w, d| w.max(d.abs()));
    }
    let hand = pa_f1(
        &[0.0, 0.0, 9.0, 0.0, 9.0],
        &[0, 1, 1, 0, 0],
        PaMode::RatioThreshold,
        0.4,
    )
    .unwrap()
    .pa_f1;
    check(
        worst <= 1e-12 && (hand - 0.8).abs() <= 1e-12,
        format!("max deviation from brute force {worst:.2e} over 100 instances (<= 1e-12); hand-traced PA-F1 {hand}"),
    )
}

fn random_config(rng: &mut impl Rng) -> RunConfig {
    let acts = [
        Activation::Tanh,
        Activation::Relu,
        Activation::Sigmoid,
        Activation::Identity,
    ];
    let scales = rng.random_range(1..=3);
    RunConfig {
        patch_sizes: (0..scales).map(|_| rng.random_range(4..=24)).collect(),
        d_ft: rng.random_range(4..=16),
        g_ft: rng.random_range(1..=3),
        c_ft: rng.random_range(1..=3),
        d_enh: rng.random_range(4..=16),
        g_enh: rng.random_range(1..=3),
        c_enh: rng.random_range(1..=2),
        d_k: rng.random_range(8..=32),
        sigma: rng.random_range(0.3..2.0),
        feature_activation: acts[rng.random_range(0..acts.len())],
        enh_activation: acts[rng.random_range(0..acts.len())],
        sae_enabled: rng.random_bool(0.5),
        master_seed: rng.random(),
        ..RunConfig::default()
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut identical = 0;
    for trial in 0..5u64 {
        let cfg = random_config(&mut rng);
        let (train, test, _) = normalized(&SynthSpec {
            n_train: 480,
            n_test: 300,
            channels: rng.random_range(1..=3),
            seed: 100 + trial,
            ..SynthSpec::default()
        });
        let opts = RunOptions {
            threads: Some(3),
            inject_seed_fault: false,
        };
        let se_cfg = RunConfig {
            exec_mode: ExecMode::SE,
            ..cfg.clone()
        };
        let pe_cfg = RunConfig {
            exec_mode: ExecMode::PE,
            ..cfg
        };
        let se = run_on_matrices(train.view(), test.view(), &se_cfg, &opts).unwrap();
        let pe = run_on_matrices(train.view(), test.view(), &pe_cfg, &opts).unwrap();
        let same = se.final_scores.scores.len() == pe.final_scores.scores.len()
            && se
                .final_scores
                .scores
                .iter()
                .zip(&pe.final_scores.scores)
                .all(|(a, b)| a.to_bits() == b.to_bits());
        identical += usize::from(same);
    }

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let synth = run_bin(&[
        "synth",
        "--out",
        p(d),
        "--n-train",
        "480",
        "--n-test",
        "300",
        "--channels",
        "2",
    ]);
    assert!(synth.status.success());
    let cfg_path = d.join("bench.cfg");
    let (train_path, test_path) = (d.join("train.csv"), d.join("test.csv"));
    std::fs::write(
        &cfg_path,
        "patch_sizes = [8, 16]\nd_ft = 8\nd_enh = 8\nd_k = 16\n",
    )
    .unwrap();
    let bench = |fault: bool| {
        let mut args = vec![
            "bench",
            "--config",
            p(&cfg_path),
            "--train",
            p(&train_path),
            "--test",
            p(&test_path),
            "--trials",
            "1",
        ];
        if fault {
            args.push("--inject-seed-fault");
        }
        run_bin(&args)
    };
    let clean = bench(false);
    let mutated = bench(true);
    let stderr = String::from_utf8_lossy(&mutated.stderr);
    let clean_code = clean.status.code();
    let mutated_code = mutated.status.code();
    check(
        identical == 5 && clean_code == Some(0) && mutated_code == Some(4) && stderr.contains("ScoreMismatch"),
        format!(
            "SE == PE bit-identical in {identical}/5 random configs; bench exit {clean_code:?} clean, {mutated_code:?} with seed mutation (need 0 and 4)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let seeds = 1..=5u64;
    let n = seeds.clone().count() as f64;
    let multi: f64 = seeds
        .clone()
        .map(|s| synth_roc(s, &[8, 16, 32]))
        .sum::<f64>()
        / n;
    let single: f64 = seeds.map(|s| synth_roc(s, &[16])).sum::<f64>() / n;
    check(
        multi >= single - 0.02,
        format!("mean ROC-AUC over 5 seeds: scales [8,16,32] {multi:.4} vs single scale 16 {single:.4} (need >= single - 0.02)"),
    )
}

fn criterion_9() -> Outcome {
    let (train, test, _) = normalized(&SynthSpec::default());
    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    let cfg = RunConfig::default();
    let se = run_on_matrices(
        train.view(),
        test.view(),
        &RunConfig {
            exec_mode: ExecMode::SE,
            ..cfg.clone()
        },
        &RunOptions::default(),
    )
    .unwrap();
    let report = measure_timings(&se);
    let gap = (report.wall_clock - report.se_total).abs() / report.se_total;
    let se_line = format!(
        "SE wall {:.3}s vs sum of sub-models {:.3}s (gap {:.2}%, tol 5%)",
        report.wall_clock,
        report.se_total,
        gap * 100.0
    );
    if gap > 0.05 {
        return Outcome::Fail(se_line);
    }
    if cores < 4 {
        return Outcome::Skip(format!(
            "PE speedup needs >= 4 cores, found {cores}; {se_line} passed"
        ));
    }
    let pe = run_on_matrices(
        train.view(),
        test.view(),
        &RunConfig {
            exec_mode: ExecMode::PE,
            ..cfg
        },
        &RunOptions::default(),
    )
    .unwrap();
    let ratio = pe.wall_clock / se.wall_clock;
    check(
        ratio <= 0.9,
        format!("PE/SE wall clock {ratio:.3} on {cores} cores (<= 0.9); {se_line}"),
    )
}

fn criterion_10() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 512,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (1usize..=500, 2usize..=64)
        .prop_flat_map(|(n, s)| (prop::collection::vec(-1e6f64..1e6, n), Just(s)));
    let result = runner.run(&strategy, |(x, s)| {
        let n = x.len();
        match patchify(&x, s) {
            Err(cpatchbls::Error::PatchTooLarge { .. }) if s > 2 * n => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("n={n} S={s}: {e}"))),
            Ok(grid) => {
                prop_assert_eq!(unpatchify(&grid), x.clone());
                let index = Array2::from_shape_fn(grid.patches.dim(), |(r, c)| (r * s + c) as f64);
                let placed = unpatchify(&grid.with_cells(index).unwrap());
                let expected: Vec<f64> = (0..n).map(|t| t as f64).collect();
                prop_assert_eq!(placed, expected);
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => Outcome::Pass(
            "512 random (n, S) cases: exact round trip and one cell per timestep".into(),
        ),
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("PSM full-scale harness", criterion_1),
        ("synthetic end-to-end", criterion_2),
        ("ridge oracle equivalence", criterion_3),
        ("RFF kernel fidelity", criterion_4),
        ("KL contract", criterion_5),
        ("metrics oracles", criterion_6),
        ("determinism and SE/PE equivalence", criterion_7),
        ("multi-scale ablation trend", criterion_8),
        ("timing shape", criterion_9),
        ("patching totality", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Outcome::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Skip(d) => ("SKIP", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{secs:.1}s]", i + 1);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
