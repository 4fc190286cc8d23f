//! Presentation-order randomization.
//!
//! Each question's order comes from a ChaCha8 stream keyed by
//! SHA-256(seed, participant id, question index), so any single order can
//! be recomputed on its own without replaying earlier draws.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::plan::Strategy;

pub fn question_rng(seed: u64, participant_id: &str, question_index: usize) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((participant_id.len() as u64).to_le_bytes());
    hasher.update(participant_id.as_bytes());
    hasher.update((question_index as u64).to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

pub fn presentation_order(
    seed: u64,
    participant_id: &str,
    question_index: usize,
    conditions: &[Strategy],
) -> Vec<Strategy> {
    let mut order = conditions.to_vec();
    order.shuffle(&mut question_rng(seed, participant_id, question_index));
    order
}
