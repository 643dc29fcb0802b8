//! Per-task seed derivation.
//!
//! Every random draw in a fit comes from a ChaCha stream keyed by
//! [`task_seed`], which depends only on the master seed and the task's
//! coordinates `(scale index, branch, channel)`. Execution order and thread
//! count therefore never influence the result.
//!
//! The mixer is the SplitMix64 finalizer applied as a chain:
//!
//! ```text
//! h0 = splitmix64(master)
//! h1 = splitmix64(h0 ^ (scale_index + 1) * 0x9E3779B97F4A7C15)
//! h2 = splitmix64(h1 ^ (branch_id   + 1) * 0xBF58476D1CE4E5B9)
//! h3 = splitmix64(h2 ^ (channel     + 1) * 0x94D049BB133111EB)
//! ```
//!
//! with wrapping arithmetic throughout.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const M1: u64 = 0xBF58_476D_1CE4_E5B9;
const M2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(M1);
    z = (z ^ (z >> 27)).wrapping_mul(M2);
    z ^ (z >> 31)
}

/// `mix64(master_seed, patch_size_index, branch_id, channel_index)`.
pub fn task_seed(master: u64, scale_index: u64, branch_id: u64, channel: u64) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ (scale_index.wrapping_add(1)).wrapping_mul(GOLDEN));
    let h = splitmix64(h ^ (branch_id.wrapping_add(1)).wrapping_mul(M1));
    splitmix64(h ^ (channel.wrapping_add(1)).wrapping_mul(M2))
}

pub fn task_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}


/// How per-task seeds are obtained inside one scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPlan {
    pub master: u64,
    pub scale_index: u64,
    /// Fault injection for determinism checks: seeds come from a flat task
    /// counter instead of the task coordinates.
    pub faulty: bool,
}

impl SeedPlan {
    pub fn new(master: u64, scale_index: usize) -> Self {
        Self {
            master,
            scale_index: scale_index as u64,
            faulty: false,
        }
    }

    pub fn seed(&self, branch_id: u64, channel: u64) -> u64 {
        if self.faulty {
            // drops the scale coordinate: every scale reuses the same draws
            task_seed(self.master, 0, 0, channel * 2 + branch_id)
        } else {
            task_seed(self.master, self.scale_index, branch_id, channel)
        }
    }
}
