//! Rating study: per-construct participant differences against the baseline.

use scentplan_core::harness::SessionResponses;
use scentplan_core::Strategy;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_ci, Statistic};
use crate::holm::holm_correct;
use crate::wilcoxon::wilcoxon_signed_rank;
use crate::{AnalysisOptions, StatsError, TestResult, TIE_EPS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructSpec {
    pub construct_id: String,
    /// Negatively framed: Δ is baseline − system so that positive still
    /// favours the system.
    pub reversed: bool,
}

impl ConstructSpec {
    pub fn defaults() -> Vec<ConstructSpec> {
        [
            ("immersion", false),
            ("distraction", true),
            ("coherence", false),
            ("easy_to_imagine", false),
        ]
        .into_iter()
        .map(|(id, reversed)| ConstructSpec {
            construct_id: id.into(),
            reversed,
        })
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructSummary {
    pub construct_id: String,
    pub delta_mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub preference_rate: f64,
    pub pref_ci_low: f64,
    pub pref_ci_high: f64,
    pub test: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study2Report {
    pub n_participants: usize,
    pub baseline: Strategy,
    pub iterations: usize,
    pub seed: u64,
    pub constructs: Vec<ConstructSummary>,
}

fn baseline_of(dataset: &[SessionResponses]) -> Result<Strategy, StatsError> {
    let likert = dataset
        .iter()
        .flat_map(|s| &s.responses)
        .find_map(|r| r.likert.as_ref())
        .ok_or(StatsError::EmptyDataset)?;
    let mut seen: Vec<Strategy> = likert.values().flat_map(|m| m.keys().copied()).collect();
    seen.sort();
    seen.dedup();
    match seen.as_slice() {
        [a, b] if *a == Strategy::System => Ok(*b),
        _ => Err(StatsError::InvalidData(
            "expected ratings for the system plan and exactly one baseline".into(),
        )),
    }
}

/// Participant-aggregated Δ for one construct, in participant order.
pub fn participant_deltas(
    dataset: &[SessionResponses],
    construct: &ConstructSpec,
    baseline: Strategy,
) -> Result<Vec<f64>, StatsError> {
    let mut participants: Vec<&str> = Vec::new();
    // (Σ system, Σ baseline, count)
    let mut sums: Vec<(f64, f64, usize)> = Vec::new();
    for session in dataset {
        for record in &session.responses {
            let scores = record
                .likert
                .as_ref()
                .and_then(|l| l.get(&construct.construct_id))
                .ok_or_else(|| {
                    StatsError::InvalidData(format!(
                        "session {} {} has no {} rating",
                        session.session_id, record.question_id, construct.construct_id
                    ))
                })?;
            let (Some(&sys), Some(&base)) = (scores.get(&Strategy::System), scores.get(&baseline)) else {
                return Err(StatsError::InvalidData(format!(
                    "session {} {} {} rating is missing a condition",
                    session.session_id, record.question_id, construct.construct_id
                )));
            };
            let slot = match participants.iter().position(|p| *p == session.participant_id) {
                Some(i) => i,
                None => {
                    participants.push(&session.participant_id);
                    sums.push((0.0, 0.0, 0));
                    sums.len() - 1
                }
            };
            sums[slot].0 += f64::from(sys);
            sums[slot].1 += f64::from(base);
            sums[slot].2 += 1;
        }
    }
    Ok(sums
        .into_iter()
        .map(|(sys, base, count)| {
            let (sys, base) = (sys / count as f64, base / count as f64);
            if construct.reversed {
                base - sys
            } else {
                sys - base
            }
        })
        .collect())
}

pub fn analyze_study2(
    dataset: &[SessionResponses],
    constructs: &[ConstructSpec],
    options: AnalysisOptions,
) -> Result<Study2Report, StatsError> {
    let baseline = baseline_of(dataset)?;
    let mut summaries = Vec::with_capacity(constructs.len());
    let mut n_participants = 0;
    for construct in constructs {
        let deltas = participant_deltas(dataset, construct, baseline)?;
        n_participants = deltas.len();
        let delta_mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
        let (ci_low, ci_high) = bootstrap_ci(&deltas, Statistic::Mean, options.iterations, options.seed)?;
        let prefers: Vec<f64> = deltas.iter().map(|&d| if d > TIE_EPS { 1.0 } else { 0.0 }).collect();
        let preference_rate = prefers.iter().sum::<f64>() / prefers.len() as f64;
        let (pref_ci_low, pref_ci_high) =
            bootstrap_ci(&prefers, Statistic::Proportion, options.iterations, options.seed)?;
        summaries.push(ConstructSummary {
            construct_id: construct.construct_id.clone(),
            delta_mean,
            ci_low,
            ci_high,
            preference_rate,
            pref_ci_low,
            pref_ci_high,
            test: wilcoxon_signed_rank(&deltas)?,
        });
    }
    let adjusted = holm_correct(&summaries.iter().map(|s| s.test.p).collect::<Vec<_>>());
    for (s, p) in summaries.iter_mut().zip(adjusted) {
        s.test.p_holm = Some(p);
    }
    Ok(Study2Report {
        n_participants,
        baseline,
        iterations: options.iterations,
        seed: options.seed,
        constructs: summaries,
    })
}
