//! Scripted participants for offline runs. They answer through the same
//! slot-based submission path as the web client; only the latent appeal of
//! each condition needs the (otherwise hidden) presentation order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::store::{Harness, HarnessError};
use super::types::{Session, SlotSubmission, StudyId, TaskKind, LIKERT_POINTS};
use crate::plan::Strategy;

/// Latent appeal per condition; higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct Appeal(pub BTreeMap<Strategy, f64>);

impl Default for Appeal {
    fn default() -> Self {
        Appeal(BTreeMap::from([
            (Strategy::System, 1.2),
            (Strategy::OverInclusive, 0.4),
            (Strategy::Naive, -0.6),
        ]))
    }
}

impl Appeal {
    fn of(&self, s: Strategy) -> f64 {
        self.0.get(&s).copied().unwrap_or(0.0)
    }
}

fn gumbel(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random_range(1e-12..1.0);
    -(-u.ln()).ln()
}

/// Roughly normal noise with unit variance.
fn noise(rng: &mut impl Rng) -> f64 {
    (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0
}

fn likert(rng: &mut impl Rng, appeal: f64) -> u8 {
    let raw = 4.0 + 1.4 * appeal + 0.8 * noise(rng);
    raw.round().clamp(1.0, f64::from(LIKERT_POINTS)) as u8
}

/// Creates a session for `participant_id` and answers its first `answer`
/// questions. Responses are a deterministic function of `seed`.
pub fn simulate_participant(
    harness: &Harness,
    study: StudyId,
    participant_id: &str,
    answer: usize,
    appeal: &Appeal,
    seed: u64,
) -> Result<Session, HarnessError> {
    let session = harness.create_session(study.as_str(), participant_id)?;
    let config = harness
        .study_config(study)
        .ok_or_else(|| HarnessError::UnknownStudy(study.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=answer.min(config.question_count()) {
        let task = harness.task(&session.session_id, n)?;
        let order = &session.orders[n - 1];
        let submission = match task.kind {
            TaskKind::Rank => {
                let mut scored: Vec<(f64, usize)> = order
                    .iter()
                    .enumerate()
                    .map(|(slot, &s)| (appeal.of(s) + gumbel(&mut rng), slot))
                    .collect();
                scored.sort_by(|a, b| b.0.total_cmp(&a.0));
                SlotSubmission {
                    question: n,
                    ranking: Some(scored.into_iter().map(|(_, slot)| slot).collect()),
                    likert: None,
                    preference: None,
                    free_text: Some(format!("Answer {n} from {participant_id}")),
                }
            }
            TaskKind::Rate => {
                let mut scores = BTreeMap::new();
                for item in &task.likert_items {
                    // negatively framed item: more appeal, less distraction
                    let sign = if item.construct_id == "distraction" { -1.0 } else { 1.0 };
                    let per_slot = order.iter().map(|&s| likert(&mut rng, sign * appeal.of(s))).collect();
                    scores.insert(item.construct_id.clone(), per_slot);
                }
                let preference = order
                    .iter()
                    .enumerate()
                    .map(|(slot, &s)| (appeal.of(s) + gumbel(&mut rng), slot))
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, slot)| slot);
                SlotSubmission {
                    question: n,
                    ranking: None,
                    likert: Some(scores),
                    preference,
                    free_text: None,
                }
            }
        };
        harness.submit_slots(&session.session_id, submission)?;
    }
    Ok(harness.session(&session.session_id).expect("session exists"))
}
