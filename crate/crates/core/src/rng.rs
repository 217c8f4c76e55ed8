//! Seeded random streams and deterministic replica farming.
//!
//! Every replica draws from its own ChaCha stream addressed by
//! `(seed, stream_index)`, so results do not depend on how rayon schedules work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededRng {
    pub seed: u64,
    pub stream_index: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            stream_index: 0,
        }
    }

    pub fn with_stream(self, stream_index: u64) -> Self {
        Self {
            stream_index,
            ..self
        }
    }

    /// Independent family of streams keyed by `key`, e.g. one family per ensemble size.
    pub fn child(self, key: u64) -> Self {
        let mixed = splitmix64(self.seed ^ splitmix64(self.stream_index ^ splitmix64(key)));
        Self {
            seed: mixed,
            stream_index: 0,
        }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `f` once per replica on streams `base.stream_index + i`, in parallel,
/// returning results in replica order.
pub fn replicate<T, F>(base: SeededRng, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = base
                .with_stream(base.stream_index.wrapping_add(i as u64))
                .generator();
            f(&mut rng, i)
        })
        .collect()
}
