//! Stimulus generation: three plans per clip (system, over-inclusive,
//! naive), persisted with transcripts and a failure manifest.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::baselines::{plan_naive, plan_over_inclusive};
use super::provider::{ModelProvider, Stage};
use super::stages::{extract_timeline, plan_system, StageError, DEFAULT_MAX_REPAIR_ATTEMPTS};
use crate::ingest::ClipRecord;
use crate::io::{read_document, write_document, DocumentError};
use crate::plan::{ScentPlan, Strategy, DEFAULT_MAX_CONCURRENT};
use crate::schema::OdorSchema;
use crate::timeline::VisualTimeline;
use crate::workspace::Workspace;

/// Stage A runs on the vision provider, Stage B on the planner provider.
#[derive(Debug, Clone, Copy)]
pub struct StageProviders<'a> {
    pub vision: &'a ModelProvider,
    pub planner: &'a ModelProvider,
}

#[derive(Debug, Clone)]
pub struct StimuliOptions {
    pub strategies: BTreeSet<Strategy>,
    pub max_concurrent: usize,
    pub max_repairs: u32,
}

impl Default for StimuliOptions {
    fn default() -> Self {
        Self {
            strategies: Strategy::ALL.into_iter().collect(),
            max_concurrent: DEFAULT_MAX_CONCURRENT,
            max_repairs: DEFAULT_MAX_REPAIR_ATTEMPTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FailureEntry {
    pub clip_id: String,
    pub strategy: Strategy,
    pub stage: Stage,
    pub error: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FailureManifest {
    pub failures: Vec<FailureEntry>,
}

#[derive(Debug, Default)]
pub struct StimuliOutcome {
    pub plans: BTreeMap<String, Vec<ScentPlan>>,
    pub failures: Vec<FailureEntry>,
}

impl StimuliOutcome {
    pub fn plan_count(&self) -> usize {
        self.plans.values().map(Vec::len).sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StimuliError {
    #[error(transparent)]
    Document(#[from] DocumentError),
}

struct ClipOutcome {
    clip_id: String,
    plans: Vec<ScentPlan>,
    failures: Vec<FailureEntry>,
}

fn failure(clip_id: &str, strategy: Strategy, stage: Stage, err: &StageError) -> FailureEntry {
    FailureEntry {
        clip_id: clip_id.to_string(),
        strategy,
        stage,
        error: err.to_string(),
    }
}

/// Uses the persisted timeline when one exists; otherwise runs Stage A.
fn obtain_timeline(
    ws: &Workspace,
    clip: &ClipRecord,
    vision: &ModelProvider,
    max_repairs: u32,
) -> Result<Result<VisualTimeline, StageError>, StimuliError> {
    let path = ws.timeline_path(&clip.clip_id);
    if path.is_file() {
        let timeline: VisualTimeline = read_document(&path)?;
        return Ok(timeline
            .validate()
            .map(|_| timeline)
            .map_err(|e| StageError::InvalidTimeline(e.to_string())));
    }
    match extract_timeline(clip, vision, max_repairs) {
        Ok((timeline, transcript)) => {
            write_document(&path, &timeline)?;
            write_document(&ws.transcript_path(&clip.clip_id, Stage::A), &transcript)?;
            Ok(Ok(timeline))
        }
        Err(err) => {
            if let Some(t) = err.transcript() {
                write_document(&ws.transcript_path(&clip.clip_id, Stage::A), t)?;
            }
            Ok(Err(err))
        }
    }
}

fn process_clip(
    ws: &Workspace,
    clip: &ClipRecord,
    schema: &OdorSchema,
    providers: StageProviders<'_>,
    options: &StimuliOptions,
) -> Result<ClipOutcome, StimuliError> {
    let mut outcome = ClipOutcome {
        clip_id: clip.clip_id.clone(),
        plans: Vec::new(),
        failures: Vec::new(),
    };
    let timeline = match obtain_timeline(ws, clip, providers.vision, options.max_repairs)? {
        Ok(t) => t,
        Err(err) => {
            for &strategy in &options.strategies {
                outcome.failures.push(failure(&clip.clip_id, strategy, Stage::A, &err));
            }
            return Ok(outcome);
        }
    };
    for &strategy in &options.strategies {
        let plan = match strategy {
            Strategy::System => {
                match plan_system(
                    &timeline,
                    schema,
                    providers.planner,
                    options.max_concurrent,
                    options.max_repairs,
                ) {
                    Ok((plan, transcript)) => {
                        write_document(&ws.transcript_path(&clip.clip_id, Stage::B), &transcript)?;
                        plan
                    }
                    Err(err) => {
                        if let Some(t) = err.transcript() {
                            write_document(&ws.transcript_path(&clip.clip_id, Stage::B), t)?;
                        }
                        outcome.failures.push(failure(&clip.clip_id, strategy, Stage::B, &err));
                        continue;
                    }
                }
            }
            Strategy::OverInclusive => plan_over_inclusive(&timeline, schema),
            Strategy::Naive => plan_naive(&timeline, schema),
        };
        write_document(&ws.plan_path(&clip.clip_id, strategy), &plan)?;
        outcome.plans.push(plan);
    }
    Ok(outcome)
}

/// Generates the requested plans for every clip. Clips are processed in
/// parallel; a failed planner never prevents the other strategies.
pub fn generate_stimuli(
    ws: &Workspace,
    clips: &[ClipRecord],
    schema: &OdorSchema,
    providers: StageProviders<'_>,
    options: &StimuliOptions,
) -> Result<StimuliOutcome, StimuliError> {
    let per_clip: Vec<ClipOutcome> = clips
        .par_iter()
        .map(|clip| process_clip(ws, clip, schema, providers, options))
        .collect::<Result<_, _>>()?;
    let mut outcome = StimuliOutcome::default();
    for clip in per_clip {
        outcome.failures.extend(clip.failures);
        outcome.plans.insert(clip.clip_id, clip.plans);
    }
    outcome.failures.sort();
    write_document(
        &ws.failures_path(),
        &FailureManifest {
            failures: outcome.failures.clone(),
        },
    )?;
    Ok(outcome)
}

/// Loads every persisted plan for `clip_id`, keyed by strategy.
pub fn load_plans(ws: &Workspace, clip_id: &str) -> Result<BTreeMap<Strategy, ScentPlan>, DocumentError> {
    let mut out = BTreeMap::new();
    for strategy in Strategy::ALL {
        let path = ws.plan_path(clip_id, strategy);
        if path.is_file() {
            out.insert(strategy, read_document(&path)?);
        }
    }
    Ok(out)
}
