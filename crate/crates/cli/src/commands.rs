use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpatchbls::dataio::{self, load_csv, load_labels, load_scores, write_scores, zscore_normalize};
use cpatchbls::ensemble::{
    measure_timings, run_on_matrices, EnsembleRun, RunOptions, TimingReport,
};
use cpatchbls::evalmetrics::{evaluate, MetricsReport, PaMode};
use cpatchbls::{Error, ExecMode, RunConfig};
use serde::Serialize;

use crate::synth::SynthSpec;

/// Failure of a subcommand, tagged with the pipeline stage it came from.
#[derive(Debug, thiserror::Error)]
#[error("error[{kind}] {stage}: {message}")]
pub struct CliError {
    pub kind: &'static str,
    pub stage: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    fn from_core(stage: &'static str, e: Error) -> Self {
        let exit_code = match &e {
            Error::ScoreMismatch(_) => 4,
            e if e.is_numerical() => 3,
            _ => 2,
        };
        let kind = e.kind();
        let full = e.to_string();
        let message = full
            .strip_prefix(kind)
            .and_then(|m| m.strip_prefix(": "))
            .unwrap_or(&full)
            .to_string();
        Self {
            kind,
            stage,
            message,
            exit_code,
        }
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for Result<T, Error> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError::from_core(stage, e))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cpatchbls",
    version,
    about = "Multi-scale patch broad learning anomaly detector"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit on the training series and write per-timestep test scores.
    Detect(DetectArgs),
    /// Score a scores file against labels.
    Eval(EvalArgs),
    /// Time SE against PE execution and check they agree.
    Bench(BenchArgs),
    /// Write a synthetic labelled benchmark.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "SE", alias = "se")]
    Se,
    #[value(name = "PE", alias = "pe")]
    Pe,
}

impl From<ModeArg> for ExecMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Se => ExecMode::SE,
            ModeArg::Pe => ExecMode::PE,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Configuration file; missing keys take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Data files start with a header row.
    #[arg(long)]
    pub header: bool,
    /// Overrides `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for PE mode (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Scores CSV to write; the timing report goes next to it as `<stem>.timing.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides `exec_mode`.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Also dump every fitted sub-model into this directory.
    #[arg(long)]
    pub dump_models: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaModeArg {
    Ratio,
    Sweep,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub anomaly_ratio: f64,
    /// PA-F1 variant reported in the top-level fields; both are always included.
    #[arg(long, value_enum, default_value_t = PaModeArg::Sweep)]
    pub mode: PaModeArg,
    /// Metrics JSON to write (default: `<scores stem>.metrics.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Benchmark JSON to write; printed to stdout either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_seed_fault: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory for train.csv, test.csv and labels.csv.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1920)]
    pub n_train: usize,
    #[arg(long, default_value_t = 1920)]
    pub n_test: usize,
    #[arg(long, default_value_t = 3)]
    pub channels: usize,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Detect(a) => cmd_detect(&a).map(|_| ()),
        Command::Eval(a) => cmd_eval(&a).map(|_| ()),
        Command::Bench(a) => cmd_bench(&a).map(|_| ()),
        Command::Synth(a) => cmd_synth(&a),
    }
}

fn load_config(run: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &run.config {
        Some(p) => dataio::parse_config(p).stage("config")?,
        None => RunConfig::default(),
    };
    if let Some(seed) = run.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

struct Prepared {
    train: ndarray::Array2<f64>,
    test: ndarray::Array2<f64>,
}

fn prepare(run: &RunArgs) -> Result<Prepared, CliError> {
    let train = load_csv(&run.train, run.header).stage("load_train")?.values;
    let test = load_csv(&run.test, run.header).stage("load_test")?.values;
    if train.nrows() == 0 || test.nrows() == 0 {
        return Err(CliError::from_core(
            "load",
            Error::InvalidInput("train and test need at least one row".into()),
        ));
    }
    let (train, test, _) = zscore_normalize(&train, &test).stage("normalize")?;
    Ok(Prepared { train, test })
}

fn write_json<T: Serialize>(path: &Path, value: &T, stage: &'static str) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::from_core(stage, e.into()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::from_core(stage, e.into()))
}

pub fn timing_path(scores: &Path) -> PathBuf {
    scores.with_extension("timing.json")
}

pub fn cmd_detect(args: &DetectArgs) -> Result<EnsembleRun<f64>, CliError> {
    let mut cfg = load_config(&args.run)?;
    if let Some(m) = args.mode {
        cfg.exec_mode = m.into();
    }
    let data = prepare(&args.run)?;
    let options = RunOptions {
        threads: args.run.threads,
        inject_seed_fault: false,
    };
    let run =
        run_on_matrices(data.train.view(), data.test.view(), &cfg, &options).stage("detect")?;
    write_scores(&args.out, &run.final_scores.scores).stage("write_scores")?;
    write_json(
        &timing_path(&args.out),
        &measure_timings(&run),
        "write_timing",
    )?;
    if let Some(dir) = &args.dump_models {
        let train_ch = cpatchbls::patching::split_channels(data.train.view());
        let params = cpatchbls::BlsParams::from(&cfg);
        for (i, &s) in cfg.patch_sizes.iter().enumerate() {
            let plan = cpatchbls::seed::SeedPlan::new(cfg.master_seed, i);
            let dual =
                cpatchbls::contrast::fit_dual(&train_ch, &params, s, &plan, false).stage("dump")?;
            cpatchbls::dump::write_dual(dir, &format!("scale{i}_p{s}"), &dual).stage("dump")?;
        }
    }
    Ok(run)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<MetricsReport, CliError> {
    let scores = load_scores(&args.scores).stage("load_scores")?;
    let labels = load_labels(&args.labels).stage("load_labels")?;
    let mode = match args.mode {
        PaModeArg::Ratio => PaMode::RatioThreshold,
        PaModeArg::Sweep => PaMode::BestF1Sweep,
    };
    let report = evaluate(&scores, &labels, args.anomaly_ratio, mode).stage("eval")?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.scores.with_extension("metrics.json"));
    write_json(&out, &report, "write_metrics")?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("metrics serialize")
    );
    Ok(report)
}

/// Mean and sample standard deviation over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub samples: Vec<f64>,
}

impl Summary {
    fn of(samples: Vec<f64>) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n.max(1.0);
        let var = if samples.len() > 1 {
            samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std: var.sqrt(),
            samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub wall_clock: Summary,
    pub se_total: Summary,
    pub pe_total: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub trials: usize,
    pub threads: usize,
    pub patch_sizes: Vec<usize>,
    pub scores_identical: bool,
    pub se: ModeSummary,
    pub pe: ModeSummary,
    pub se_reports: Vec<TimingReport>,
    pub pe_reports: Vec<TimingReport>,
}

fn summarize(reports: &[TimingReport]) -> ModeSummary {
    ModeSummary {
        wall_clock: Summary::of(reports.iter().map(|r| r.wall_clock).collect()),
        se_total: Summary::of(reports.iter().map(|r| r.se_total).collect()),
        pe_total: Summary::of(reports.iter().map(|r| r.pe_total).collect()),
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<BenchReport, CliError> {
    let cfg = load_config(&args.run)?;
    let data = prepare(&args.run)?;
    let options = RunOptions {
        threads: args.run.threads,
        inject_seed_fault: args.inject_seed_fault,
    };
    let mut se_reports = Vec::with_capacity(args.trials);
    let mut pe_reports = Vec::with_capacity(args.trials);
    for trial in 0..args.trials.max(1) {
        let se_cfg = RunConfig {
            exec_mode: ExecMode::SE,
            ..cfg.clone()
        };
        let pe_cfg = RunConfig {
            exec_mode: ExecMode::PE,
            ..cfg.clone()
        };
        let se = run_on_matrices(data.train.view(), data.test.view(), &se_cfg, &options)
            .stage("bench_se")?;
        let pe = run_on_matrices(data.train.view(), data.test.view(), &pe_cfg, &options)
            .stage("bench_pe")?;
        if se.final_scores.scores != pe.final_scores.scores {
            let first = se
                .final_scores
                .scores
                .iter()
                .zip(&pe.final_scores.scores)
                .position(|(a, b)| a.to_bits() != b.to_bits())
                .unwrap_or(0);
            return Err(CliError::from_core(
                "bench_compare",
                Error::ScoreMismatch(format!(
                    "trial {trial}: SE and PE scores differ first at timestep {first}"
                )),
            ));
        }
        se_reports.push(measure_timings(&se));
        pe_reports.push(measure_timings(&pe));
    }
    let report = BenchReport {
        trials: se_reports.len(),
        threads: args.run.threads.unwrap_or_else(rayon_threads),
        patch_sizes: cfg.patch_sizes.clone(),
        scores_identical: true,
        se: summarize(&se_reports),
        pe: summarize(&pe_reports),
        se_reports,
        pe_reports,
    };
    if let Some(out) = &args.out {
        write_json(out, &report, "write_bench")?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("bench serialize")
    );
    Ok(report)
}

fn rayon_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    if args.channels == 0 || args.n_train == 0 || args.n_test < 3 {
        return Err(CliError::from_core(
            "synth",
            Error::InvalidInput("need channels >= 1, n_train >= 1 and n_test >= 3".into()),
        ));
    }
    let spec = SynthSpec {
        n_train: args.n_train,
        n_test: args.n_test,
        channels: args.channels,
        seed: args.seed,
        ..SynthSpec::default()
    };
    spec.generate().write(&args.out).stage("synth")
}
