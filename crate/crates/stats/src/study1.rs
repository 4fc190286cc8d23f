//! Ranking study: descriptives, Friedman omnibus, pairwise Wilcoxon + Holm.

use scentplan_core::harness::SessionResponses;
use scentplan_core::Strategy;
use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_rankings, ConditionSummary};
use crate::friedman::{friedman, friedman_test};
use crate::holm::holm_correct;
use crate::wilcoxon::wilcoxon_signed_rank;
use crate::{AnalysisOptions, StatsError, TestResult};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FriedmanMode {
    /// One row per participant (mean ranks across their questions).
    #[default]
    Aggregated,
    /// One row per (participant, question) ranking.
    PerTrial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub a: Strategy,
    pub b: Strategy,
    pub test: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study1Report {
    pub n_participants: usize,
    pub n_trials: usize,
    pub iterations: usize,
    pub seed: u64,
    pub conditions: Vec<ConditionSummary>,
    pub friedman_mode: FriedmanMode,
    pub friedman: TestResult,
    pub pairwise: Vec<PairwiseResult>,
}

pub fn analyze_study1(
    dataset: &[SessionResponses],
    options: AnalysisOptions,
    mode: FriedmanMode,
) -> Result<Study1Report, StatsError> {
    let (matrix, summary) = aggregate_rankings(dataset, options)?;
    if matrix.k() != 3 {
        return Err(StatsError::InvalidData(format!(
            "expected 3 conditions, found {}",
            matrix.k()
        )));
    }
    let friedman = match mode {
        FriedmanMode::Aggregated => friedman_test(&matrix)?,
        FriedmanMode::PerTrial => friedman(&matrix.trial_rows())?,
    };

    let mut pairwise = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let diffs: Vec<f64> = matrix.entries.iter().map(|row| row[i] - row[j]).collect();
        pairwise.push(PairwiseResult {
            a: matrix.conditions[i],
            b: matrix.conditions[j],
            test: wilcoxon_signed_rank(&diffs)?,
        });
    }
    let adjusted = holm_correct(&pairwise.iter().map(|r| r.test.p).collect::<Vec<_>>());
    for (r, p) in pairwise.iter_mut().zip(adjusted) {
        r.test.p_holm = Some(p);
    }

    Ok(Study1Report {
        n_participants: summary.n_participants,
        n_trials: summary.n_trials,
        iterations: options.iterations,
        seed: options.seed,
        conditions: summary.conditions,
        friedman_mode: mode,
        friedman,
        pairwise,
    })
}
