use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::plan::Strategy;

pub const LIKERT_POINTS: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyId {
    Study1,
    Study2,
}

impl StudyId {
    pub fn as_str(&self) -> &'static str {
        match self {
            StudyId::Study1 => "study1",
            StudyId::Study2 => "study2",
        }
    }
}

impl fmt::Display for StudyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StudyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "study1" => Ok(StudyId::Study1),
            "study2" => Ok(StudyId::Study2),
            other => Err(format!("unknown study \"{other}\"")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Rank,
    Rate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertItem {
    pub construct_id: String,
    pub prompt: String,
    pub scale_points: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub study_id: StudyId,
    pub clip_ids: Vec<String>,
    pub conditions: Vec<Strategy>,
    #[serde(default)]
    pub likert_items: Vec<LikertItem>,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid study config {study}: {reason}")]
pub struct StudyConfigError {
    pub study: StudyId,
    pub reason: String,
}

impl StudyConfig {
    /// Ranking study over all three strategies.
    pub fn study1(clip_ids: Vec<String>, seed: u64) -> Self {
        Self {
            study_id: StudyId::Study1,
            clip_ids,
            conditions: Strategy::ALL.to_vec(),
            likert_items: Vec::new(),
            seed,
        }
    }

    /// Rating study of the system plan against the over-inclusive plan.
    pub fn study2(clip_ids: Vec<String>, seed: u64) -> Self {
        let item = |id: &str, prompt: &str| LikertItem {
            construct_id: id.into(),
            prompt: prompt.into(),
            scale_points: LIKERT_POINTS,
        };
        Self {
            study_id: StudyId::Study2,
            clip_ids,
            conditions: vec![Strategy::System, Strategy::OverInclusive],
            likert_items: vec![
                item("immersion", "This scent plan would enhance my sense of immersion in the video."),
                item("distraction", "This scent plan would distract me from the video."),
                item("coherence", "This scent plan fits how the video progresses."),
                item("easy_to_imagine", "This scent plan is easy to imagine while watching."),
            ],
            seed,
        }
    }

    pub fn task_kind(&self) -> TaskKind {
        match self.study_id {
            StudyId::Study1 => TaskKind::Rank,
            StudyId::Study2 => TaskKind::Rate,
        }
    }

    pub fn question_count(&self) -> usize {
        self.clip_ids.len()
    }

    pub fn question_id(index: usize) -> String {
        format!("q{}", index + 1)
    }

    /// 0-based index of a `q<n>` question id.
    pub fn question_index(&self, question_id: &str) -> Option<usize> {
        let n: usize = question_id.strip_prefix('q')?.parse().ok()?;
        (1..=self.question_count()).contains(&n).then(|| n - 1)
    }

    pub fn validate(&self) -> Result<(), StudyConfigError> {
        let fail = |reason: &str| {
            Err(StudyConfigError {
                study: self.study_id,
                reason: reason.to_string(),
            })
        };
        if self.clip_ids.is_empty() {
            return fail("no clips");
        }
        let mut sorted = self.conditions.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.conditions.len() {
            return fail("duplicate conditions");
        }
        match self.study_id {
            StudyId::Study1 => {
                if self.conditions.len() != 3 {
                    return fail("study1 ranks exactly 3 conditions");
                }
                if !self.likert_items.is_empty() {
                    return fail("study1 has ranking tasks only");
                }
            }
            StudyId::Study2 => {
                if sorted != [Strategy::System, Strategy::OverInclusive] {
                    return fail("study2 compares the system and over-inclusive plans");
                }
                if self.likert_items.is_empty() {
                    return fail("study2 needs Likert items");
                }
            }
        }
        if self.likert_items.iter().any(|i| i.scale_points != LIKERT_POINTS) {
            return fail("Likert items use 7-point scales");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub participant_id: String,
    pub study_id: StudyId,
    /// One presentation order per question.
    pub orders: Vec<Vec<Strategy>>,
    pub created_at: DateTime<Utc>,
    pub completed: bool,
}

/// What a participant sees of their session: no presentation orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub participant_id: String,
    pub study_id: StudyId,
    pub question_count: usize,
    pub created_at: DateTime<Utc>,
    pub completed: bool,
}

impl From<&Session> for SessionView {
    fn from(s: &Session) -> Self {
        Self {
            session_id: s.session_id.clone(),
            participant_id: s.participant_id.clone(),
            study_id: s.study_id,
            question_count: s.orders.len(),
            created_at: s.created_at,
            completed: s.completed,
        }
    }
}

/// Per construct, per condition Likert score.
pub type LikertScores = BTreeMap<String, BTreeMap<Strategy, u8>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub session_id: String,
    pub question_id: String,
    pub clip_id: String,
    /// Most to least suitable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<Strategy>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likert: Option<LikertScores>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference: Option<Strategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_text: Option<String>,
}

/// Served plan text in a blinded slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotText {
    pub slot: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPayload {
    pub session_id: String,
    pub question: usize,
    pub question_count: usize,
    pub clip_id: String,
    pub clip_url: String,
    pub kind: TaskKind,
    pub plans: Vec<SlotText>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub likert_items: Vec<LikertItem>,
}

/// A participant's answer in terms of slots as served.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSubmission {
    /// 1-based question number.
    pub question: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<usize>>,
    /// Construct id to one score per slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likert: Option<BTreeMap<String, Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub accepted: bool,
    pub superseded: bool,
    pub completed: bool,
}

/// One exported session: participant metadata plus its responses in
/// question order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionResponses {
    pub session_id: String,
    pub participant_id: String,
    pub study_id: StudyId,
    pub responses: Vec<ResponseRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedSession {
    pub session_id: String,
    pub participant_id: String,
    pub answered: usize,
    pub missing_questions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionSidecar {
    pub study_id: StudyId,
    pub total_sessions: usize,
    pub included: usize,
    pub excluded: usize,
    pub reason: String,
    pub sessions: Vec<ExcludedSession>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Export {
    pub dataset: Vec<SessionResponses>,
    pub exclusions: ExclusionSidecar,
}
