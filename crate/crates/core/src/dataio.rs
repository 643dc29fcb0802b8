//! Dataset loading, normalization and run configuration.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::blscore::Activation;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Raw multivariate series split into train and labelled test portions.
/// Rows are timesteps, columns are channels.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset<T> {
    pub train_values: Array2<T>,
    pub test_values: Array2<T>,
    pub test_labels: Vec<u8>,
    pub channel_names: Vec<String>,
}

impl<T: Scalar> TimeSeriesDataset<T> {
    pub fn new(
        train_values: Array2<T>,
        test_values: Array2<T>,
        test_labels: Vec<u8>,
        channel_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let channels = train_values.ncols();
        if channels == 0 || train_values.nrows() == 0 || test_values.nrows() == 0 {
            return Err(Error::InvalidInput(
                "dataset needs at least one channel, one train row and one test row".into(),
            ));
        }
        if test_values.ncols() != channels {
            return Err(Error::ShapeMismatch(format!(
                "train has {} channels, test has {}",
                channels,
                test_values.ncols()
            )));
        }
        if test_labels.len() != test_values.nrows() {
            return Err(Error::LengthMismatch {
                left: test_labels.len(),
                right: test_values.nrows(),
            });
        }
        if let Some(bad) = test_labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidInput(format!(
                "label at row {bad} is not 0 or 1"
            )));
        }
        check_finite(&train_values)?;
        check_finite(&test_values)?;
        let channel_names = match channel_names {
            Some(names) if names.len() == channels => names,
            Some(names) => {
                return Err(Error::ShapeMismatch(format!(
                    "{} channel names for {} channels",
                    names.len(),
                    channels
                )))
            }
            None => (0..channels).map(|c| format!("ch{c}")).collect(),
        };
        Ok(Self {
            train_values,
            test_values,
            test_labels,
            channel_names,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.train_values.ncols()
    }

    /// Returns a copy with both portions z-scored by the training statistics.
    pub fn normalized(&self) -> Result<(Self, NormStats<T>)> {
        let (train, test, stats) = zscore_normalize(&self.train_values, &self.test_values)?;
        Ok((
            Self {
                train_values: train,
                test_values: test,
                test_labels: self.test_labels.clone(),
                channel_names: self.channel_names.clone(),
            },
            stats,
        ))
    }
}

impl TimeSeriesDataset<f64> {
    /// Loads train/test data CSVs and a labels CSV.
    pub fn load(
        train: impl AsRef<Path>,
        test: impl AsRef<Path>,
        labels: impl AsRef<Path>,
        has_header: bool,
    ) -> Result<Self> {
        let train = load_csv(train, has_header)?;
        let test = load_csv(test, has_header)?;
        let labels = load_labels(labels)?;
        Self::new(train.values, test.values, labels, train.channel_names)
    }
}

fn check_finite<T: Scalar>(m: &Array2<T>) -> Result<()> {
    for ((row, col), v) in m.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { row, col });
        }
    }
    Ok(())
}

/// Result of [`load_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvMatrix {
    pub values: Array2<f64>,
    pub channel_names: Option<Vec<String>>,
}

fn read_to_string(path: &Path) -> Result<String> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

/// Parses a comma-separated matrix, rows = timesteps, columns = channels.
pub fn parse_csv(text: &str, has_header: bool) -> Result<CsvMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let channel_names = if has_header {
        lines.next().map(|(_, l)| {
            l.split(',')
                .map(|s| s.trim().to_string())
                .collect::<Vec<_>>()
        })
    } else {
        None
    };
    let mut data = Vec::new();
    let mut width = channel_names.as_ref().map(Vec::len);
    let mut rows = 0usize;
    for (line_no, line) in lines {
        let row = rows;
        let before = data.len();
        for (col, cell) in line.split(',').enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: line_no + 1,
                msg: format!("cannot parse {:?} as a number", cell.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { row, col });
            }
            data.push(v);
        }
        let n = data.len() - before;
        match width {
            Some(w) if w != n => return Err(Error::RaggedRows(row)),
            None => width = Some(n),
            _ => {}
        }
        rows += 1;
    }
    let width = width.unwrap_or(0);
    let values = Array2::from_shape_vec((rows, width), data)
        .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    Ok(CsvMatrix {
        values,
        channel_names,
    })
}

pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<CsvMatrix> {
    parse_csv(&read_to_string(path.as_ref())?, has_header)
}

/// Reads a single column of 0/1 labels. A non-numeric first line is taken as a header.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let text = read_to_string(path.as_ref())?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(0.0) => out.push(0),
            Ok(1.0) => out.push(1),
            Ok(_) => {
                return Err(Error::InvalidInput(format!(
                    "line {}: label {cell:?} is not 0 or 1",
                    i + 1
                )))
            }
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("cannot parse label {cell:?}"),
                })
            }
        }
    }
    Ok(out)
}

pub fn write_csv<T: Scalar>(
    path: impl AsRef<Path>,
    values: &Array2<T>,
    header: Option<&[String]>,
) -> Result<()> {
    let mut s = String::new();
    if let Some(h) = header {
        s.push_str(&h.join(","));
        s.push('\n');
    }
    for row in values.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{v}").unwrap();
        }
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// One float per line.
pub fn write_scores<T: Scalar>(path: impl AsRef<Path>, scores: &[T]) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    for v in scores {
        writeln!(f, "{v}")?;
    }
    f.flush()?;
    Ok(())
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = load_csv(path, false)?;
    if m.values.ncols() > 1 {
        return Err(Error::ShapeMismatch(
            "scores file must have one column".into(),
        ));
    }
    Ok(m.values.into_raw_vec_and_offset().0)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let mut s = String::with_capacity(labels.len() * 2);
    for l in labels {
        writeln!(s, "{l}").unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

/// Per-channel training statistics. `std` holds the clamped divisor.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats<T> {
    pub mean: Array1<T>,
    pub std: Array1<T>,
}

pub const MIN_STD: f64 = 1e-8;

/// Z-scores both matrices with mean and population std of `train`.
pub fn zscore_normalize<T: Scalar>(
    train: &Array2<T>,
    test: &Array2<T>,
) -> Result<(Array2<T>, Array2<T>, NormStats<T>)> {
    if train.ncols() != test.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "train has {} columns, test has {}",
            train.ncols(),
            test.ncols()
        )));
    }
    if train.nrows() == 0 {
        return Err(Error::InvalidInput("empty training matrix".into()));
    }
    let n = T::from_usize(train.nrows()).unwrap();
    let mean = train.sum_axis(Axis(0)) / n;
    let floor = T::lit(MIN_STD);
    let std = train
        .axis_iter(Axis(1))
        .zip(mean.iter())
        .map(|(col, &mu)| {
            let var = col
                .iter()
                .map(|&x| (x - mu) * (x - mu))
                .fold(T::zero(), |a, b| a + b)
                / n;
            var.sqrt().max(floor)
        })
        .collect::<Array1<T>>();
    let apply = |m: &Array2<T>| {
        let mut out = m.clone();
        for mut row in out.rows_mut() {
            row.zip_mut_with(&mean, |x, &mu| *x -= mu);
            row.zip_mut_with(&std, |x, &sd| *x /= sd);
        }
        out
    };
    let train_n = apply(train);
    let test_n = apply(test);
    Ok((train_n, test_n, NormStats { mean, std }))
}

/// Sub-model execution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ExecMode {
    /// Sub-models run one after another.
    #[default]
    SE,
    /// Sub-models run as independent concurrent tasks.
    PE,
}

impl std::str::FromStr for ExecMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SE" => Ok(ExecMode::SE),
            "PE" => Ok(ExecMode::PE),
            other => Err(format!("unknown exec mode {other:?} (expected SE or PE)")),
        }
    }
}

impl std::fmt::Display for ExecMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExecMode::SE => "SE",
            ExecMode::PE => "PE",
        })
    }
}

/// All hyperparameters of a detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub patch_sizes: Vec<usize>,
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
    pub anomaly_ratio: f64,
    pub master_seed: u64,
    pub exec_mode: ExecMode,
    /// Min-max normalize each scale's scores before averaging them.
    pub score_minmax: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            patch_sizes: vec![8, 16, 32],
            d_ft: 32,
            g_ft: 4,
            c_ft: 2,
            d_enh: 32,
            g_enh: 4,
            c_enh: 2,
            shrink_s: 0.9,
            ridge_r: 0.1,
            d_k: 64,
            sigma: 1.0,
            feature_activation: Activation::Tanh,
            enh_activation: Activation::Tanh,
            sae_enabled: true,
            sae_lambda: 1e-3,
            sae_iters: 50,
            anomaly_ratio: 0.05,
            master_seed: 0,
            exec_mode: ExecMode::SE,
            score_minmax: false,
        }
    }
}

const CONFIG_KEYS: &[&str] = &[
    "patch_sizes",
    "d_ft",
    "g_ft",
    "c_ft",
    "d_enh",
    "g_enh",
    "c_enh",
    "shrink_s",
    "ridge_r",
    "d_k",
    "sigma",
    "feature_activation",
    "enh_activation",
    "sae_enabled",
    "sae_lambda",
    "sae_iters",
    "anomaly_ratio",
    "master_seed",
    "exec_mode",
    "score_minmax",
];

fn violation(key: &str, msg: impl Into<String>) -> Error {
    Error::InvariantViolation {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_value<V: std::str::FromStr>(key: &str, raw: &str) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    raw.trim()
        .parse()
        .map_err(|e: V::Err| violation(key, format!("cannot parse {raw:?}: {e}")))
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<usize>> {
    let inner = raw
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| violation(key, "lists must be written as [a, b, ...]"))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patch_sizes.is_empty() {
            return Err(violation("patch_sizes", "must not be empty"));
        }
        if let Some(&s) = self.patch_sizes.iter().find(|&&s| s < 2) {
            return Err(violation(
                "patch_sizes",
                format!("patch size {s} is below 2"),
            ));
        }
        for (key, v) in [
            ("d_ft", self.d_ft),
            ("g_ft", self.g_ft),
            ("c_ft", self.c_ft),
            ("d_enh", self.d_enh),
            ("g_enh", self.g_enh),
            ("c_enh", self.c_enh),
            ("d_k", self.d_k),
            ("sae_iters", self.sae_iters),
        ] {
            if v == 0 {
                return Err(violation(key, "must be a positive integer"));
            }
        }
        if !(self.shrink_s > 0.0 && self.shrink_s <= 1.0) {
            return Err(violation("shrink_s", "must lie in (0, 1]"));
        }
        if !(self.ridge_r >= 0.0 && self.ridge_r.is_finite()) {
            return Err(violation("ridge_r", "must be finite and >= 0"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(violation("sigma", "must be finite and > 0"));
        }
        if !(self.sae_lambda >= 0.0 && self.sae_lambda.is_finite()) {
            return Err(violation("sae_lambda", "must be finite and >= 0"));
        }
        if !(self.anomaly_ratio > 0.0 && self.anomaly_ratio < 1.0) {
            return Err(violation("anomaly_ratio", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Parses the flat `key = value` format. Unspecified keys keep their defaults.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "expected key = value".into(),
            })?;
            let key = key.trim();
            match key {
                "patch_sizes" => cfg.patch_sizes = parse_list(key, value)?,
                "d_ft" => cfg.d_ft = parse_value(key, value)?,
                "g_ft" => cfg.g_ft = parse_value(key, value)?,
                "c_ft" => cfg.c_ft = parse_value(key, value)?,
                "d_enh" => cfg.d_enh = parse_value(key, value)?,
                "g_enh" => cfg.g_enh = parse_value(key, value)?,
                "c_enh" => cfg.c_enh = parse_value(key, value)?,
                "shrink_s" => cfg.shrink_s = parse_value(key, value)?,
                "ridge_r" => cfg.ridge_r = parse_value(key, value)?,
                "d_k" => cfg.d_k = parse_value(key, value)?,
                "sigma" => cfg.sigma = parse_value(key, value)?,
                "feature_activation" => cfg.feature_activation = parse_value(key, value)?,
                "enh_activation" => cfg.enh_activation = parse_value(key, value)?,
                "sae_enabled" => cfg.sae_enabled = parse_value(key, value)?,
                "sae_lambda" => cfg.sae_lambda = parse_value(key, value)?,
                "sae_iters" => cfg.sae_iters = parse_value(key, value)?,
                "anomaly_ratio" => cfg.anomaly_ratio = parse_value(key, value)?,
                "master_seed" => cfg.master_seed = parse_value(key, value)?,
                "exec_mode" => cfg.exec_mode = parse_value(key, value)?,
                "score_minmax" => cfg.score_minmax = parse_value(key, value)?,
                other => return Err(Error::UnknownKey(other.to_string())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_config_string(&self) -> String {
        let sizes = self
            .patch_sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        let mut s = String::new();
        for key in CONFIG_KEYS {
            let value = match *key {
                "patch_sizes" => format!("[{sizes}]"),
                "d_ft" => self.d_ft.to_string(),
                "g_ft" => self.g_ft.to_string(),
                "c_ft" => self.c_ft.to_string(),
                "d_enh" => self.d_enh.to_string(),
                "g_enh" => self.g_enh.to_string(),
                "c_enh" => self.c_enh.to_string(),
                "shrink_s" => format!("{:?}", self.shrink_s),
                "ridge_r" => format!("{:?}", self.ridge_r),
                "d_k" => self.d_k.to_string(),
                "sigma" => format!("{:?}", self.sigma),
                "feature_activation" => self.feature_activation.to_string(),
                "enh_activation" => self.enh_activation.to_string(),
                "sae_enabled" => self.sae_enabled.to_string(),
                "sae_lambda" => format!("{:?}", self.sae_lambda),
                "sae_iters" => self.sae_iters.to_string(),
                "anomaly_ratio" => format!("{:?}", self.anomaly_ratio),
                "master_seed" => self.master_seed.to_string(),
                "exec_mode" => self.exec_mode.to_string(),
                "score_minmax" => self.score_minmax.to_string(),
                _ => unreachable!(),
            };
            writeln!(s, "{key} = {value}").unwrap();
        }
        s
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    RunConfig::from_config_str(&read_to_string(path.as_ref())?)
}
