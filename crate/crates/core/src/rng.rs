//! Seekable random substreams for the Monte Carlo simulator.
//!
//! Every trial owns one ChaCha8 stream selected by its index, keyed by the
//! user seed. Inside a trial the word layout is fixed: one `u64` for the
//! symbol bits, then exactly three `u64` draws per receptor (unbound time,
//! ligand identity, bound time). Any receptor's draws can therefore be
//! addressed directly from `(seed, trial, receptor)`, and results never
//! depend on how trials are scheduled across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// 32-bit words consumed by the symbol draw at the start of a trial.
pub const SYMBOL_WORDS: u128 = 2;
/// 32-bit words consumed per receptor.
pub const RECEPTOR_WORDS: u128 = 6;

/// Key shared by all substreams of one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        StreamKey { key }
    }

    /// Stream for `trial`, positioned at its first word.
    pub fn trial(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(trial);
        rng
    }

    /// Stream for `trial`, positioned at the first draw of `receptor`.
    pub fn receptor(&self, trial: u64, receptor: usize) -> ChaCha8Rng {
        let mut rng = self.trial(trial);
        rng.set_word_pos(SYMBOL_WORDS + RECEPTOR_WORDS * receptor as u128);
        rng
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` with 53 random bits; consumes one `u64`.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exponential with the given rate by inversion; consumes one `u64`.
#[inline]
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -(1.0 - uniform(rng)).ln() / rate
}
