//! Participant-level aggregation of ranking responses.

use scentplan_core::harness::SessionResponses;
use scentplan_core::Strategy;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_ci, Statistic};
use crate::{AnalysisOptions, StatsError};

/// Participants × conditions. `entries[p][c]` is participant `p`'s mean rank
/// of condition `c` over their questions; `trials[p]` keeps the raw
/// per-question ranks in the same column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingMatrix {
    pub conditions: Vec<Strategy>,
    pub participants: Vec<String>,
    pub entries: Vec<Vec<f64>>,
    pub trials: Vec<Vec<Vec<f64>>>,
}

impl RankingMatrix {
    pub fn n(&self) -> usize {
        self.participants.len()
    }

    pub fn k(&self) -> usize {
        self.conditions.len()
    }

    pub fn trial_count(&self) -> usize {
        self.trials.iter().map(Vec::len).sum()
    }

    /// Every (participant, question) ranking as one row.
    pub fn trial_rows(&self) -> Vec<Vec<f64>> {
        self.trials.iter().flatten().cloned().collect()
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.entries.iter().map(|row| row[c]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: Strategy,
    pub mean_rank: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub rank1_rate: f64,
    pub rank1_ci_low: f64,
    pub rank1_ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub n_participants: usize,
    pub n_trials: usize,
    pub conditions: Vec<ConditionSummary>,
}

/// Builds the ranking matrix. Sessions sharing a participant id are merged.
pub fn ranking_matrix(dataset: &[SessionResponses]) -> Result<RankingMatrix, StatsError> {
    let first = dataset
        .iter()
        .flat_map(|s| &s.responses)
        .next()
        .ok_or(StatsError::EmptyDataset)?;
    let first_ranking = first
        .ranking
        .as_ref()
        .ok_or_else(|| StatsError::InvalidData(format!("response {} has no ranking", first.question_id)))?;
    let conditions: Vec<Strategy> = Strategy::ALL
        .into_iter()
        .filter(|s| first_ranking.contains(s))
        .collect();
    let k = conditions.len();

    let mut participants: Vec<String> = Vec::new();
    let mut trials: Vec<Vec<Vec<f64>>> = Vec::new();
    for session in dataset {
        let slot = match participants.iter().position(|p| *p == session.participant_id) {
            Some(i) => i,
            None => {
                participants.push(session.participant_id.clone());
                trials.push(Vec::new());
                participants.len() - 1
            }
        };
        for record in &session.responses {
            let ranking = record.ranking.as_ref().ok_or_else(|| {
                StatsError::InvalidData(format!(
                    "session {} {} has no ranking",
                    session.session_id, record.question_id
                ))
            })?;
            let is_permutation = ranking.len() == k && conditions.iter().all(|c| ranking.contains(c));
            if !is_permutation {
                return Err(StatsError::InvalidData(format!(
                    "session {} {} ranking is not a permutation of the conditions",
                    session.session_id, record.question_id
                )));
            }
            let ranks = conditions
                .iter()
                .map(|c| (ranking.iter().position(|s| s == c).expect("checked") + 1) as f64)
                .collect();
            trials[slot].push(ranks);
        }
    }
    // sessions with no responses contribute nothing
    let keep: Vec<bool> = trials.iter().map(|t| !t.is_empty()).collect();
    let mut keep_iter = keep.iter();
    participants.retain(|_| *keep_iter.next().unwrap());
    trials.retain(|t| !t.is_empty());

    let entries = trials
        .iter()
        .map(|rows| {
            (0..k)
                .map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / rows.len() as f64)
                .collect()
        })
        .collect();
    Ok(RankingMatrix {
        conditions,
        participants,
        entries,
        trials,
    })
}

pub fn summarize(matrix: &RankingMatrix, options: AnalysisOptions) -> Result<RankSummary, StatsError> {
    let n = matrix.n();
    let total_trials = matrix.trial_count();
    let mut conditions = Vec::with_capacity(matrix.k());
    for (c, &condition) in matrix.conditions.iter().enumerate() {
        let ranks = matrix.column(c);
        let mean_rank = ranks.iter().sum::<f64>() / n as f64;
        let (ci_low, ci_high) = bootstrap_ci(&ranks, Statistic::Mean, options.iterations, options.seed)?;

        let firsts: Vec<usize> = matrix
            .trials
            .iter()
            .map(|rows| rows.iter().filter(|r| r[c] == 1.0).count())
            .collect();
        let rank1_rate = firsts.iter().sum::<usize>() as f64 / total_trials as f64;
        let per_participant: Vec<f64> = firsts
            .iter()
            .zip(&matrix.trials)
            .map(|(&f, rows)| f as f64 / rows.len() as f64)
            .collect();
        let (rank1_ci_low, rank1_ci_high) =
            bootstrap_ci(&per_participant, Statistic::Mean, options.iterations, options.seed)?;
        conditions.push(ConditionSummary {
            condition,
            mean_rank,
            ci_low,
            ci_high,
            rank1_rate,
            rank1_ci_low,
            rank1_ci_high,
        });
    }
    Ok(RankSummary {
        n_participants: n,
        n_trials: total_trials,
        conditions,
    })
}

pub fn aggregate_rankings(
    dataset: &[SessionResponses],
    options: AnalysisOptions,
) -> Result<(RankingMatrix, RankSummary), StatsError> {
    let matrix = ranking_matrix(dataset)?;
    let summary = summarize(&matrix, options)?;
    Ok((matrix, summary))
}
