//! Wilcoxon signed-rank test.
//!
//! Zero differences are dropped. With no zeros dropped and no tied
//! magnitudes, the two-sided p-value is exact from the null distribution of
//! W+ over all 2^n sign assignments. Otherwise it comes from the normal
//! approximation with tie-corrected variance and no continuity correction.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::ranks::{average_ranks, tie_sum};
use crate::{Method, StatsError, TestResult, TIE_EPS};

pub fn wilcoxon_signed_rank(diffs: &[f64]) -> Result<TestResult, StatsError> {
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(StatsError::InvalidData("non-finite difference".into()));
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| d.abs() > TIE_EPS).collect();
    if nonzero.is_empty() {
        return Err(StatsError::AllZero);
    }
    let n = nonzero.len();
    let zeros_dropped = n != diffs.len();
    let magnitudes: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&magnitudes);
    let w_plus: f64 = ranks.iter().zip(&nonzero).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    // an empty f64 sum is -0.0
    let w = w_plus.min(total - w_plus) + 0.0;

    let (method, p) = if !zeros_dropped && ties.is_empty() {
        (Method::WilcoxonExact, exact_two_sided(n, w.round() as u64))
    } else {
        let mean = total / 2.0;
        let var = (n * (n + 1) * (2 * n + 1)) as f64 / 24.0 - tie_sum(&ties) / 48.0;
        let p = if var <= 0.0 {
            1.0
        } else {
            let z = (w - mean) / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * normal.cdf(-z.abs())).min(1.0)
        };
        (Method::WilcoxonNormal, p)
    };
    Ok(TestResult {
        method,
        statistic: w,
        n_effective: n,
        p,
        p_holm: None,
    })
}

/// P(min(W+, W−) ≤ w) under the null, for distinct ranks 1..=n.
pub fn exact_two_sided(n: usize, w: u64) -> f64 {
    let cdf = if n <= 120 {
        let counts = subset_sum_counts(n);
        let below: u128 = counts.iter().take(w as usize + 1).sum();
        // 2^n as f64 is exact; 2·below fits u128 for n ≤ 120.
        (2 * below) as f64 / 2f64.powi(n as i32)
    } else {
        let probs = subset_sum_probs(n);
        2.0 * probs.iter().take(w as usize + 1).sum::<f64>()
    };
    cdf.min(1.0)
}

/// counts[s] = number of subsets of {1..n} summing to s.
fn subset_sum_counts(n: usize) -> Vec<u128> {
    let max = n * (n + 1) / 2;
    let mut counts = vec![0u128; max + 1];
    counts[0] = 1;
    for k in 1..=n {
        for s in (k..=max).rev() {
            counts[s] += counts[s - k];
        }
    }
    counts
}

fn subset_sum_probs(n: usize) -> Vec<f64> {
    let max = n * (n + 1) / 2;
    let mut probs = vec![0.0f64; max + 1];
    probs[0] = 1.0;
    for k in 1..=n {
        for s in (0..=max).rev() {
            let carry = if s >= k { probs[s - k] } else { 0.0 };
            probs[s] = 0.5 * (probs[s] + carry);
        }
    }
    probs
}
