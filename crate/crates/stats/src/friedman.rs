//! Friedman rank test for k related samples.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::aggregate::RankingMatrix;
use crate::ranks::{average_ranks, tie_sum};
use crate::{Method, StatsError, TestResult};

/// Friedman test on a participants × conditions matrix. Values are ranked
/// within each row (average ranks for ties) and the tie-corrected statistic
/// is referred to χ² with k − 1 degrees of freedom.
pub fn friedman(rows: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    let n = rows.len();
    if n < 2 {
        return Err(StatsError::TooSmall { what: "rows", needed: 2, got: n });
    }
    let k = rows[0].len();
    if k < 2 {
        return Err(StatsError::TooSmall { what: "conditions", needed: 2, got: k });
    }
    if rows.iter().any(|r| r.len() != k) {
        return Err(StatsError::InvalidData("ragged matrix".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::InvalidData("non-finite value".into()));
    }

    let mut rank_sums = vec![0.0; k];
    let mut ties = 0.0;
    for row in rows {
        let (ranks, groups) = average_ranks(row);
        for (sum, r) in rank_sums.iter_mut().zip(ranks) {
            *sum += r;
        }
        ties += tie_sum(&groups);
    }
    let (nf, kf) = (n as f64, k as f64);
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * rank_sums.iter().map(|r| r * r).sum::<f64>()
        - 3.0 * nf * (kf + 1.0);
    let correction = 1.0 - ties / (nf * (kf * kf * kf - kf));

    let (statistic, p) = if correction <= 1e-12 {
        (0.0, 1.0)
    } else {
        let stat = (raw / correction).max(0.0);
        let dist = ChiSquared::new(kf - 1.0).expect("df ≥ 1");
        (stat, dist.sf(stat).clamp(0.0, 1.0))
    };
    Ok(TestResult {
        method: Method::Friedman,
        statistic,
        n_effective: n,
        p,
        p_holm: None,
    })
}

pub fn friedman_test(matrix: &RankingMatrix) -> Result<TestResult, StatsError> {
    friedman(&matrix.entries)
}
