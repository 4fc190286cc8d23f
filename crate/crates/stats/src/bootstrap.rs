//! Seeded percentile bootstrap over participants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::StatsError;

pub const DEFAULT_ITERATIONS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 20240613;
pub const MIN_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    /// Mean of 0/1 indicators.
    Proportion,
}

/// 95% percentile interval. Iteration `i` draws from its own ChaCha stream
/// (`seed`, stream `i`), so the result does not depend on thread scheduling.
pub fn bootstrap_ci(
    values: &[f64],
    statistic: Statistic,
    iterations: usize,
    seed: u64,
) -> Result<(f64, f64), StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if iterations < MIN_ITERATIONS {
        return Err(StatsError::TooFewIterations(iterations));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::InvalidData("non-finite value".into()));
    }
    if statistic == Statistic::Proportion && values.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(StatsError::InvalidData("proportion input must be 0 or 1".into()));
    }

    let n = values.len();
    let mut stats: Vec<f64> = (0..iterations as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut sum = 0.0;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..n {
                let v = values[rng.random_range(0..n)];
                sum += v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            // a mean lies within its sample; clamping removes summation drift
            (sum / n as f64).clamp(lo, hi)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    Ok((percentile(&stats, 0.025), percentile(&stats, 0.975)))
}

/// Linear interpolation between closest ranks of a sorted slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
