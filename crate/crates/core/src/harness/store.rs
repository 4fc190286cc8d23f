//! Session state backed by an append-only JSONL log per study.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::Utc;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::order::presentation_order;
use super::types::*;
use crate::plan::Strategy;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown study \"{0}\"")]
    UnknownStudy(String),
    #[error("unknown session \"{0}\"")]
    UnknownSession(String),
    #[error("unknown question \"{0}\"")]
    UnknownQuestion(String),
    #[error("session \"{0}\" is already completed")]
    SessionCompleted(String),
    #[error("ranking is not a permutation of the presented plans")]
    NotAPermutation,
    #[error("Likert value {0} out of range 1..=7")]
    LikertOutOfRange(u8),
    #[error("invalid response: {0}")]
    InvalidResponse(String),
    #[error("no stimulus text for clip \"{clip_id}\" strategy {strategy}")]
    MissingStimulus { clip_id: String, strategy: Strategy },
    #[error("study {0} has no sessions")]
    NoSessions(StudyId),
    #[error(transparent)]
    Config(#[from] StudyConfigError),
    #[error("store: {0}")]
    Store(String),
}

/// Rendered plan text per clip and strategy, plus a reference to each clip.
#[derive(Debug, Clone, Default)]
pub struct StimulusSet {
    pub texts: BTreeMap<String, BTreeMap<Strategy, String>>,
    pub clip_files: BTreeMap<String, PathBuf>,
}

impl StimulusSet {
    pub fn insert(&mut self, clip_id: &str, strategy: Strategy, text: String) {
        self.texts.entry(clip_id.to_string()).or_default().insert(strategy, text);
    }

    fn text(&self, clip_id: &str, strategy: Strategy) -> Option<&str> {
        self.texts.get(clip_id)?.get(&strategy).map(String::as_str)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
enum LogEntry {
    SessionCreated { session: Session },
    Response { record: ResponseRecord },
    Superseded { session_id: String, question_id: String },
    Completed { session_id: String },
}

#[derive(Debug)]
struct SessionState {
    session: Session,
    responses: BTreeMap<usize, ResponseRecord>,
}

#[derive(Debug)]
struct StudyState {
    config: StudyConfig,
    sessions: BTreeMap<String, SessionState>,
    log: File,
    log_path: PathBuf,
}

#[derive(Debug)]
struct Inner {
    studies: BTreeMap<StudyId, StudyState>,
    session_study: BTreeMap<String, StudyId>,
    created: u64,
}

/// The study service. All operations take one lock, so writes to a
/// session are serialized and exports see a consistent snapshot.
#[derive(Debug)]
pub struct Harness {
    inner: Mutex<Inner>,
    stimuli: StimulusSet,
}

fn is_complete(config: &StudyConfig, record: &ResponseRecord) -> bool {
    match config.task_kind() {
        TaskKind::Rank => record.ranking.is_some(),
        TaskKind::Rate => {
            let Some(likert) = &record.likert else {
                return false;
            };
            record.preference.is_some()
                && config.likert_items.iter().all(|item| {
                    likert
                        .get(&item.construct_id)
                        .is_some_and(|scores| config.conditions.iter().all(|c| scores.contains_key(c)))
                })
        }
    }
}

impl SessionState {
    fn complete_questions(&self, config: &StudyConfig) -> usize {
        self.responses.values().filter(|r| is_complete(config, r)).count()
    }

    fn is_complete(&self, config: &StudyConfig) -> bool {
        self.complete_questions(config) == config.question_count()
    }
}

impl Harness {
    /// Opens (or creates) the store under `dir`, replaying each study's log.
    /// Every clip and condition of every study must have a stimulus text.
    pub fn open(dir: &Path, configs: Vec<StudyConfig>, stimuli: StimulusSet) -> Result<Self, HarnessError> {
        for config in &configs {
            config.validate()?;
            for clip_id in &config.clip_ids {
                for &strategy in &config.conditions {
                    if stimuli.text(clip_id, strategy).is_none() {
                        return Err(HarnessError::MissingStimulus {
                            clip_id: clip_id.clone(),
                            strategy,
                        });
                    }
                }
            }
        }
        let mut harness = Self::open_store(dir, configs)?;
        harness.stimuli = stimuli;
        Ok(harness)
    }

    /// Opens the response store without stimuli: enough for export, but
    /// tasks cannot be served.
    pub fn open_store(dir: &Path, configs: Vec<StudyConfig>) -> Result<Self, HarnessError> {
        let mut studies = BTreeMap::new();
        let mut session_study = BTreeMap::new();
        let mut created = 0;
        for config in configs {
            config.validate()?;
            let study_dir = dir.join(config.study_id.as_str());
            std::fs::create_dir_all(&study_dir).map_err(|e| HarnessError::Store(e.to_string()))?;
            let log_path = study_dir.join("log.jsonl");
            let mut sessions: BTreeMap<String, SessionState> = BTreeMap::new();
            if log_path.exists() {
                let file = File::open(&log_path).map_err(|e| HarnessError::Store(e.to_string()))?;
                for (lineno, line) in BufReader::new(file).lines().enumerate() {
                    let line = line.map_err(|e| HarnessError::Store(e.to_string()))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let entry: LogEntry = serde_json::from_str(&line).map_err(|e| {
                        HarnessError::Store(format!("{}:{}: {e}", log_path.display(), lineno + 1))
                    })?;
                    match entry {
                        LogEntry::SessionCreated { session } => {
                            created += 1;
                            session_study.insert(session.session_id.clone(), config.study_id);
                            sessions.insert(
                                session.session_id.clone(),
                                SessionState {
                                    session,
                                    responses: BTreeMap::new(),
                                },
                            );
                        }
                        LogEntry::Response { record } => {
                            if let (Some(state), Some(q)) = (
                                sessions.get_mut(&record.session_id),
                                config.question_index(&record.question_id),
                            ) {
                                state.responses.insert(q, record);
                            }
                        }
                        LogEntry::Completed { session_id } => {
                            if let Some(state) = sessions.get_mut(&session_id) {
                                state.session.completed = true;
                            }
                        }
                        LogEntry::Superseded { .. } => {}
                    }
                }
            }
            let log = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&log_path)
                .map_err(|e| HarnessError::Store(e.to_string()))?;
            studies.insert(
                config.study_id,
                StudyState {
                    config,
                    sessions,
                    log,
                    log_path,
                },
            );
        }
        Ok(Self {
            inner: Mutex::new(Inner {
                studies,
                session_study,
                created,
            }),
            stimuli: StimulusSet::default(),
        })
    }

    pub fn stimuli(&self) -> &StimulusSet {
        &self.stimuli
    }

    pub fn study_config(&self, study_id: StudyId) -> Option<StudyConfig> {
        self.inner.lock().unwrap().studies.get(&study_id).map(|s| s.config.clone())
    }

    pub fn session(&self, session_id: &str) -> Option<Session> {
        let inner = self.inner.lock().unwrap();
        let study = inner.session_study.get(session_id)?;
        Some(inner.studies[study].sessions[session_id].session.clone())
    }

    pub fn create_session(&self, study_id: &str, participant_id: &str) -> Result<Session, HarnessError> {
        let study: StudyId = study_id
            .parse()
            .map_err(|_| HarnessError::UnknownStudy(study_id.to_string()))?;
        let mut guard = self.inner.lock().unwrap();
        let inner = &mut *guard;
        let state = inner
            .studies
            .get_mut(&study)
            .ok_or_else(|| HarnessError::UnknownStudy(study_id.to_string()))?;
        let config = &state.config;
        let orders = (0..config.question_count())
            .map(|q| presentation_order(config.seed, participant_id, q, &config.conditions))
            .collect();
        let session_id = {
            let mut hasher = Sha256::new();
            hasher.update(study.as_str().as_bytes());
            hasher.update(config.seed.to_le_bytes());
            hasher.update(inner.created.to_le_bytes());
            hasher.update(participant_id.as_bytes());
            let digest = hasher.finalize();
            digest[..8].iter().map(|b| format!("{b:02x}")).collect::<String>()
        };
        let session = Session {
            session_id: session_id.clone(),
            participant_id: participant_id.to_string(),
            study_id: study,
            orders,
            created_at: Utc::now(),
            completed: false,
        };
        append(state, &LogEntry::SessionCreated { session: session.clone() })?;
        inner.created += 1;
        inner.session_study.insert(session_id.clone(), study);
        state.sessions.insert(
            session_id,
            SessionState {
                session: session.clone(),
                responses: BTreeMap::new(),
            },
        );
        Ok(session)
    }

    /// The blinded task for 1-based question `n`.
    pub fn task(&self, session_id: &str, n: usize) -> Result<TaskPayload, HarnessError> {
        let inner = self.inner.lock().unwrap();
        let (config, state) = lookup(&inner, session_id)?;
        let index = n
            .checked_sub(1)
            .filter(|&i| i < config.question_count())
            .ok_or_else(|| HarnessError::UnknownQuestion(n.to_string()))?;
        let clip_id = &config.clip_ids[index];
        let plans = state.session.orders[index]
            .iter()
            .enumerate()
            .map(|(slot, &strategy)| {
                let text = self.stimuli.text(clip_id, strategy).ok_or_else(|| {
                    HarnessError::MissingStimulus {
                        clip_id: clip_id.clone(),
                        strategy,
                    }
                })?;
                Ok(SlotText {
                    slot,
                    text: text.to_string(),
                })
            })
            .collect::<Result<_, HarnessError>>()?;
        Ok(TaskPayload {
            session_id: session_id.to_string(),
            question: n,
            question_count: config.question_count(),
            clip_id: clip_id.clone(),
            clip_url: format!("/clips/{clip_id}"),
            kind: config.task_kind(),
            plans,
            likert_items: config.likert_items.clone(),
        })
    }

    /// Maps a slot-based answer onto strategies using the session's
    /// presentation order, then stores it.
    pub fn submit_slots(&self, session_id: &str, submission: SlotSubmission) -> Result<Ack, HarnessError> {
        let record = {
            let inner = self.inner.lock().unwrap();
            let (config, state) = lookup(&inner, session_id)?;
            let index = submission
                .question
                .checked_sub(1)
                .filter(|&i| i < config.question_count())
                .ok_or_else(|| HarnessError::UnknownQuestion(submission.question.to_string()))?;
            let order = &state.session.orders[index];
            let slot = |s: usize| {
                order
                    .get(s)
                    .copied()
                    .ok_or_else(|| HarnessError::InvalidResponse(format!("no plan in slot {s}")))
            };
            let ranking = submission
                .ranking
                .map(|slots| slots.into_iter().map(slot).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let likert = submission
                .likert
                .map(|items| {
                    items
                        .into_iter()
                        .map(|(construct, scores)| {
                            if scores.len() != order.len() {
                                return Err(HarnessError::InvalidResponse(format!(
                                    "construct \"{construct}\" needs one score per plan"
                                )));
                            }
                            let per_condition = scores
                                .into_iter()
                                .enumerate()
                                .map(|(s, v)| Ok((slot(s)?, v)))
                                .collect::<Result<BTreeMap<_, _>, HarnessError>>()?;
                            Ok((construct, per_condition))
                        })
                        .collect::<Result<LikertScores, HarnessError>>()
                })
                .transpose()?;
            ResponseRecord {
                session_id: session_id.to_string(),
                question_id: StudyConfig::question_id(index),
                clip_id: config.clip_ids[index].clone(),
                ranking,
                likert,
                preference: submission.preference.map(slot).transpose()?,
                free_text: submission.free_text,
            }
        };
        self.submit_response(session_id, record)
    }

    pub fn submit_response(&self, session_id: &str, record: ResponseRecord) -> Result<Ack, HarnessError> {
        let mut guard = self.inner.lock().unwrap();
        let study = *guard
            .session_study
            .get(session_id)
            .ok_or_else(|| HarnessError::UnknownSession(session_id.to_string()))?;
        let state = guard.studies.get_mut(&study).expect("indexed study exists");
        let config = state.config.clone();
        let session = &state.sessions[session_id];
        if session.session.completed {
            return Err(HarnessError::SessionCompleted(session_id.to_string()));
        }
        let index = config
            .question_index(&record.question_id)
            .ok_or_else(|| HarnessError::UnknownQuestion(record.question_id.clone()))?;
        if record.session_id != session_id {
            return Err(HarnessError::InvalidResponse("session id mismatch".into()));
        }
        if record.clip_id != config.clip_ids[index] {
            return Err(HarnessError::InvalidResponse(format!(
                "question {} shows clip \"{}\", not \"{}\"",
                record.question_id, config.clip_ids[index], record.clip_id
            )));
        }
        check_record(&config, &record)?;

        let superseded = session.responses.contains_key(&index);
        append(state, &LogEntry::Response { record: record.clone() })?;
        if superseded {
            tracing::info!(session_id, question_id = %record.question_id, "response superseded");
            append(
                state,
                &LogEntry::Superseded {
                    session_id: session_id.to_string(),
                    question_id: record.question_id.clone(),
                },
            )?;
        }
        let session = state.sessions.get_mut(session_id).expect("checked above");
        session.responses.insert(index, record);
        let completed = session.is_complete(&config);
        if completed {
            session.session.completed = true;
            append(
                state,
                &LogEntry::Completed {
                    session_id: session_id.to_string(),
                },
            )?;
        }
        Ok(Ack {
            accepted: true,
            superseded,
            completed,
        })
    }

    /// Complete sessions only, ordered by session id; incomplete ones are
    /// listed in the exclusion sidecar.
    pub fn export(&self, study_id: StudyId) -> Result<Export, HarnessError> {
        let inner = self.inner.lock().unwrap();
        let state = inner
            .studies
            .get(&study_id)
            .ok_or_else(|| HarnessError::UnknownStudy(study_id.to_string()))?;
        if state.sessions.is_empty() {
            return Err(HarnessError::NoSessions(study_id));
        }
        let config = &state.config;
        let mut dataset = Vec::new();
        let mut excluded = Vec::new();
        for s in state.sessions.values() {
            if s.is_complete(config) {
                dataset.push(SessionResponses {
                    session_id: s.session.session_id.clone(),
                    participant_id: s.session.participant_id.clone(),
                    study_id,
                    responses: s.responses.values().cloned().collect(),
                });
            } else {
                let answered: BTreeSet<usize> = s
                    .responses
                    .iter()
                    .filter(|(_, r)| is_complete(config, r))
                    .map(|(&q, _)| q)
                    .collect();
                excluded.push(ExcludedSession {
                    session_id: s.session.session_id.clone(),
                    participant_id: s.session.participant_id.clone(),
                    answered: answered.len(),
                    missing_questions: (0..config.question_count())
                        .filter(|q| !answered.contains(q))
                        .map(StudyConfig::question_id)
                        .collect(),
                });
            }
        }
        let reason = if dataset.is_empty() {
            "no session has a complete response to every question".to_string()
        } else {
            "sessions without a complete response to every question are excluded".to_string()
        };
        Ok(Export {
            exclusions: ExclusionSidecar {
                study_id,
                total_sessions: state.sessions.len(),
                included: dataset.len(),
                excluded: excluded.len(),
                reason,
                sessions: excluded,
            },
            dataset,
        })
    }

    /// Syncs every study log to disk.
    pub fn flush(&self) -> Result<(), HarnessError> {
        let inner = self.inner.lock().unwrap();
        for state in inner.studies.values() {
            state
                .log
                .sync_all()
                .map_err(|e| HarnessError::Store(format!("{}: {e}", state.log_path.display())))?;
        }
        Ok(())
    }
}

fn lookup<'a>(inner: &'a Inner, session_id: &str) -> Result<(&'a StudyConfig, &'a SessionState), HarnessError> {
    let study = inner
        .session_study
        .get(session_id)
        .ok_or_else(|| HarnessError::UnknownSession(session_id.to_string()))?;
    let state = &inner.studies[study];
    Ok((&state.config, &state.sessions[session_id]))
}

fn append(state: &mut StudyState, entry: &LogEntry) -> Result<(), HarnessError> {
    let line = serde_json::to_string(entry).expect("log entries serialize");
    writeln!(state.log, "{line}")
        .and_then(|_| state.log.flush())
        .map_err(|e| HarnessError::Store(format!("{}: {e}", state.log_path.display())))
}

fn check_record(config: &StudyConfig, record: &ResponseRecord) -> Result<(), HarnessError> {
    if let Some(ranking) = &record.ranking {
        let mut sorted = ranking.clone();
        sorted.sort();
        let mut expected = config.conditions.clone();
        expected.sort();
        if sorted != expected {
            return Err(HarnessError::NotAPermutation);
        }
    }
    if let Some(likert) = &record.likert {
        for (construct, scores) in likert {
            if !config.likert_items.iter().any(|i| &i.construct_id == construct) {
                return Err(HarnessError::InvalidResponse(format!(
                    "unknown construct \"{construct}\""
                )));
            }
            for (strategy, &value) in scores {
                if !config.conditions.contains(strategy) {
                    return Err(HarnessError::InvalidResponse(format!(
                        "condition {strategy} is not part of this study"
                    )));
                }
                if !(1..=LIKERT_POINTS).contains(&value) {
                    return Err(HarnessError::LikertOutOfRange(value));
                }
            }
        }
    }
    if let Some(pref) = record.preference {
        if !config.conditions.contains(&pref) {
            return Err(HarnessError::InvalidResponse(format!(
                "preference {pref} is not part of this study"
            )));
        }
    }
    Ok(())
}
