//! Synthetic benchmark: two sinusoids plus noise per channel, with point
//! spikes and level-shift segments injected into the test portion.

use std::path::Path;

use cpatchbls::dataio::{write_csv, write_labels};
use cpatchbls::Result;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub channels: usize,
    pub periods: [f64; 2],
    pub amplitudes: [f64; 2],
    pub noise_std: f64,
    /// Spike height in channel standard deviations.
    pub spike_std: f64,
    /// Level-shift offset in channel standard deviations.
    pub shift_std: f64,
    pub shift_len: (usize, usize),
    pub anomaly_ratio: f64,
    pub seed: u64,
}

/// Both default lengths span a whole number of the longer period, so the
/// test split starts at the same phase as the training split.
impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_train: 1920,
            n_test: 1920,
            channels: 3,
            periods: [24.0, 96.0],
            amplitudes: [1.0, 0.5],
            noise_std: 0.05,
            spike_std: 5.0,
            shift_std: 3.0,
            shift_len: (10, 50),
            anomaly_ratio: 0.05,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyKind {
    Spike,
    LevelShift,
}

/// One injected event; `start..start + len` in test coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub kind: AnomalyKind,
    pub start: usize,
    pub len: usize,
    pub channels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub train: Array2<f64>,
    pub test: Array2<f64>,
    pub labels: Vec<u8>,
    pub injections: Vec<Injection>,
}

impl SynthSpec {
    pub fn generate(&self) -> SynthData {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise = Normal::new(0.0, self.noise_std).expect("valid noise std");
        let n = self.n_train + self.n_test;
        let tau = std::f64::consts::TAU;
        let mut all = Array2::<f64>::zeros((n, self.channels));
        for c in 0..self.channels {
            let phases = [rng.random_range(0.0..tau), rng.random_range(0.0..tau)];
            for t in 0..n {
                let tf = t as f64;
                all[[t, c]] = self.amplitudes[0] * (tau * tf / self.periods[0] + phases[0]).sin()
                    + self.amplitudes[1] * (tau * tf / self.periods[1] + phases[1]).sin()
                    + noise.sample(&mut rng);
            }
        }
        let train = all.slice(ndarray::s![..self.n_train, ..]).to_owned();
        let mut test = all.slice(ndarray::s![self.n_train.., ..]).to_owned();
        let stds: Vec<f64> = (0..self.channels)
            .map(|c| {
                let col = train.column(c);
                let m = col.mean().unwrap_or(0.0);
                (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / col.len().max(1) as f64)
                    .sqrt()
            })
            .collect();

        let mut labels = vec![0u8; self.n_test];
        let mut injections = Vec::new();
        let target = (self.anomaly_ratio * self.n_test as f64).round() as usize;
        let mut count = 0;
        let mut attempts = 0;
        while count < target && attempts < 10_000 {
            attempts += 1;
            let remaining = target - count;
            let (kind, len) = if remaining >= self.shift_len.0 && rng.random_bool(0.6) {
                let hi = self.shift_len.1.min(remaining);
                (
                    AnomalyKind::LevelShift,
                    rng.random_range(self.shift_len.0..=hi),
                )
            } else {
                (AnomalyKind::Spike, 1)
            };
            if len + 2 > self.n_test {
                break;
            }
            let start = rng.random_range(1..self.n_test - len);
            // keep a one-step gap so events never merge into one segment
            if labels[start - 1..(start + len + 1).min(self.n_test)].contains(&1) {
                continue;
            }
            let mut channels: Vec<usize> = (0..self.channels)
                .filter(|_| rng.random_bool(0.5))
                .collect();
            if channels.is_empty() {
                channels.push(rng.random_range(0..self.channels));
            }
            for &c in &channels {
                let offset = match kind {
                    AnomalyKind::Spike => self.spike_std,
                    AnomalyKind::LevelShift => self.shift_std,
                } * stds[c];
                for t in start..start + len {
                    test[[t, c]] += offset;
                }
            }
            labels[start..start + len].iter_mut().for_each(|l| *l = 1);
            count += len;
            injections.push(Injection {
                kind,
                start,
                len,
                channels,
            });
        }
        SynthData {
            train,
            test,
            labels,
            injections,
        }
    }
}

impl SynthData {
    /// Writes `train.csv`, `test.csv` and `labels.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_csv(dir.join("train.csv"), &self.train, None)?;
        write_csv(dir.join("test.csv"), &self.test, None)?;
        write_labels(dir.join("labels.csv"), &self.labels)?;
        Ok(())
    }
}
