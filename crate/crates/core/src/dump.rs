//! Flat binary model dump for reproducibility audits.
//!
//! A dump is two files sharing a stem:
//!
//! * `<stem>.bin`: every array's elements as little-endian `f64`, row-major,
//!   concatenated back to back.
//! * `<stem>.json`: the manifest, listing for each array its `name`, `shape`
//!   and element `offset` into the binary file, plus model metadata.
//!
//! Array names are slash-separated paths such as
//! `skp/ch0/feature/g1/l0/weight`, `basic/ch2/enhancement/scales` or
//! `basic/ch0/head/w_o`.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::blscore::{Activation, BranchKind, ChannelModel};
use crate::contrast::DualModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const FORMAT: &str = "cpatchbls-dump";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayEntry {
    pub name: String,
    pub shape: Vec<usize>,
    /// Offset in elements (multiply by 8 for bytes).
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub dtype: String,
    pub patch_size: usize,
    pub channels: usize,
    pub feature_activation: Activation,
    pub enh_activation: Activation,
    pub ridge_lambda: f64,
    pub arrays: Vec<ArrayEntry>,
}

#[derive(Default)]
struct Writer {
    data: Vec<f64>,
    arrays: Vec<ArrayEntry>,
}

impl Writer {
    fn push<T: Scalar>(
        &mut self,
        name: String,
        shape: Vec<usize>,
        values: impl Iterator<Item = T>,
    ) {
        let offset = self.data.len();
        self.data.extend(values.map(Scalar::as_f64));
        self.arrays.push(ArrayEntry {
            name,
            shape,
            offset,
        });
    }

    fn matrix<T: Scalar>(&mut self, name: String, m: &Array2<T>) {
        self.push(name, vec![m.nrows(), m.ncols()], m.iter().copied());
    }

    fn vector<T: Scalar>(&mut self, name: String, v: &Array1<T>) {
        self.push(name, vec![v.len()], v.iter().copied());
    }

    fn channel<T: Scalar>(&mut self, prefix: &str, m: &ChannelModel<T>) {
        for (g, (ws, bs)) in m
            .feature_bank
            .weights
            .iter()
            .zip(&m.feature_bank.biases)
            .enumerate()
        {
            for (l, (w, b)) in ws.iter().zip(bs).enumerate() {
                self.matrix(format!("{prefix}/feature/g{g}/l{l}/weight"), w);
                self.vector(format!("{prefix}/feature/g{g}/l{l}/bias"), b);
            }
        }
        for (g, maps) in m.rff.iter().enumerate() {
            for (l, map) in maps.iter().enumerate() {
                self.matrix(format!("{prefix}/rff/g{g}/l{l}/omega"), &map.omega);
                self.vector(format!("{prefix}/rff/g{g}/l{l}/b"), &map.b);
            }
        }
        for (g, (ws, bs)) in m
            .enhancement_bank
            .weights
            .iter()
            .zip(&m.enhancement_bank.biases)
            .enumerate()
        {
            for (l, (w, b)) in ws.iter().zip(bs).enumerate() {
                self.matrix(format!("{prefix}/enhancement/g{g}/l{l}/weight"), w);
                self.vector(format!("{prefix}/enhancement/g{g}/l{l}/bias"), b);
            }
        }
        let scales: Vec<T> = m.enhancement_scales.iter().flatten().copied().collect();
        let rows = m.enhancement_scales.len();
        let cols = m.enhancement_scales.first().map_or(0, Vec::len);
        self.push(
            format!("{prefix}/enhancement/scales"),
            vec![rows, cols],
            scales.into_iter(),
        );
        self.matrix(format!("{prefix}/head/w_o"), &m.head.w_o);
    }
}

fn paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{stem}.bin")),
        dir.join(format!("{stem}.json")),
    )
}

/// Writes both branches of a dual model. Returns the manifest.
pub fn write_dual<T: Scalar>(
    dir: impl AsRef<Path>,
    stem: &str,
    dual: &DualModel<T>,
) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut w = Writer::default();
    for model in [&dual.basic, &dual.skp] {
        let branch = match model.branch_kind {
            BranchKind::Basic => "basic",
            BranchKind::Skp => "skp",
        };
        for (c, ch) in model.channels.iter().enumerate() {
            w.channel(&format!("{branch}/ch{c}"), ch);
        }
    }
    let first = dual
        .basic
        .channels
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot dump a model without channels".into()))?;
    let manifest = Manifest {
        format: FORMAT.into(),
        version: VERSION,
        dtype: "f64-le".into(),
        patch_size: dual.patch_size,
        channels: dual.n_channels(),
        feature_activation: first.feature_bank.activation,
        enh_activation: first.enhancement_bank.activation,
        ridge_lambda: first.head.lambda.as_f64(),
        arrays: w.arrays,
    };
    let (bin, json) = paths(dir, stem);
    let bytes: Vec<u8> = w.data.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(bin, bytes)?;
    fs::write(json, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// A decoded dump: the manifest plus each array's elements in manifest order.
pub fn read_dump(dir: impl AsRef<Path>, stem: &str) -> Result<(Manifest, Vec<Vec<f64>>)> {
    let (bin, json) = paths(dir.as_ref(), stem);
    for p in [&bin, &json] {
        if !p.is_file() {
            return Err(Error::MissingFile(p.clone()));
        }
    }
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(json)?)?;
    let bytes = fs::read(bin)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::InvalidInput(
            "dump size is not a multiple of 8".into(),
        ));
    }
    let data: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut arrays = Vec::with_capacity(manifest.arrays.len());
    for e in &manifest.arrays {
        let len: usize = e.shape.iter().product();
        let slice = data.get(e.offset..e.offset + len).ok_or_else(|| {
            Error::InvalidInput(format!("array {} runs past the end of the dump", e.name))
        })?;
        arrays.push(slice.to_vec());
    }
    Ok((manifest, arrays))
}
