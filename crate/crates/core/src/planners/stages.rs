//! Stage A (frames to visual timeline) and Stage B (timeline to system plan),
//! both driven through a bounded parse-validate-repair loop.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::prompts;
use super::provider::{ModelProvider, ModelRequest, ProviderError, Stage};
use super::structured::parse_document;
use crate::ingest::ClipRecord;
use crate::plan::{validate_plan, ScentEvent, ScentPlan, Strategy, ValidationReport};
use crate::schema::OdorSchema;
use crate::timeline::VisualTimeline;

pub const DEFAULT_MAX_REPAIR_ATTEMPTS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub prompt_text: String,
    pub raw_response: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
}

/// Audit record of one stage run. `prompt_text` is the initial prompt,
/// `raw_response` the last response received; every round trip is kept in
/// `exchanges`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTranscript {
    pub stage: Stage,
    pub clip_id: String,
    pub prompt_version: String,
    pub prompt_text: String,
    pub raw_response: String,
    pub attempts: u32,
    pub parsed_ok: bool,
    pub exchanges: Vec<Exchange>,
}

#[derive(Debug, thiserror::Error)]
pub enum StageError {
    #[error("clip \"{0}\" has no sampled frames")]
    NotSampled(String),
    #[error("invalid input timeline: {0}")]
    InvalidTimeline(String),
    #[error(transparent)]
    Provider(ProviderError),
    #[error("unparseable response after {attempts} attempt(s): {last_problem}")]
    Unparseable {
        attempts: u32,
        last_problem: String,
        transcript: Box<StageTranscript>,
    },
    #[error("plan invalid after repairs: {report}")]
    PlanInvalid {
        report: ValidationReport,
        transcript: Box<StageTranscript>,
    },
}

impl StageError {
    pub fn transcript(&self) -> Option<&StageTranscript> {
        match self {
            StageError::Unparseable { transcript, .. } | StageError::PlanInvalid { transcript, .. } => {
                Some(transcript)
            }
            _ => None,
        }
    }
}

enum Rejection {
    Parse(Vec<String>),
    Invalid(ValidationReport),
}

impl Rejection {
    fn problems(&self) -> Vec<String> {
        match self {
            Rejection::Parse(p) => p.clone(),
            Rejection::Invalid(r) => r.messages(),
        }
    }
}

/// Issues the initial prompt, then up to `max_repairs` repair prompts that
/// quote the problems found in the previous answer.
fn run_with_repairs<T>(
    provider: &ModelProvider,
    stage: Stage,
    clip_id: &str,
    prompt: String,
    images: &[std::path::PathBuf],
    max_repairs: u32,
    accept: impl Fn(&Value) -> Result<T, Rejection>,
) -> Result<(T, StageTranscript), StageError> {
    let mut transcript = StageTranscript {
        stage,
        clip_id: clip_id.to_string(),
        prompt_version: prompts::PROMPT_VERSION.to_string(),
        prompt_text: prompt.clone(),
        raw_response: String::new(),
        attempts: 0,
        parsed_ok: false,
        exchanges: Vec::new(),
    };
    let mut current_prompt = prompt.clone();
    let mut last_rejection = None;
    for attempt in 1..=max_repairs + 1 {
        let request = ModelRequest {
            stage,
            clip_id: clip_id.to_string(),
            attempt,
            prompt: current_prompt.clone(),
            images: images.to_vec(),
        };
        let response = provider.call(&request).map_err(StageError::Provider)?;
        transcript.attempts = attempt;
        transcript.raw_response = response.clone();
        let verdict = parse_document(&response)
            .map_err(|p| Rejection::Parse(vec![p]))
            .and_then(|value| accept(&value));
        match verdict {
            Ok(value) => {
                transcript.parsed_ok = true;
                transcript.exchanges.push(Exchange {
                    prompt_text: current_prompt,
                    raw_response: response,
                    problems: Vec::new(),
                });
                return Ok((value, transcript));
            }
            Err(rejection) => {
                let problems = rejection.problems();
                tracing::debug!(%stage, clip_id, attempt, ?problems, "response rejected");
                current_prompt = prompts::fill(
                    prompts::REPAIR,
                    &[
                        ("problems", &problems.iter().map(|p| format!("- {p}")).collect::<Vec<_>>().join("\n")),
                        ("previous_response", response.trim()),
                        ("original_prompt", &prompt),
                    ],
                );
                transcript.exchanges.push(Exchange {
                    prompt_text: request.prompt,
                    raw_response: response,
                    problems,
                });
                last_rejection = Some(rejection);
            }
        }
    }
    let attempts = transcript.attempts;
    Err(match last_rejection.expect("at least one attempt ran") {
        Rejection::Invalid(report) => StageError::PlanInvalid {
            report,
            transcript: Box::new(transcript),
        },
        Rejection::Parse(problems) => StageError::Unparseable {
            attempts,
            last_problem: problems.join("; "),
            transcript: Box::new(transcript),
        },
    })
}

pub fn stage_a_prompt(clip: &ClipRecord) -> String {
    let fps = clip.fps_sampled.unwrap_or_default();
    let stamps = clip
        .frame_stamps()
        .iter()
        .map(|s| s.at_ms.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    prompts::fill(
        prompts::STAGE_A,
        &[
            ("clip_id", &clip.clip_id),
            ("duration_ms", &clip.duration_ms.to_string()),
            ("fps", &format!("{fps}")),
            ("frame_count", &clip.frame_paths.len().to_string()),
            ("frame_stamps", &stamps),
        ],
    )
}

pub fn extract_timeline(
    clip: &ClipRecord,
    provider: &ModelProvider,
    max_repairs: u32,
) -> Result<(VisualTimeline, StageTranscript), StageError> {
    if !clip.is_sampled() {
        return Err(StageError::NotSampled(clip.clip_id.clone()));
    }
    run_with_repairs(
        provider,
        Stage::A,
        &clip.clip_id,
        stage_a_prompt(clip),
        &clip.frame_paths,
        max_repairs,
        |value| {
            let mut timeline: VisualTimeline = serde_json::from_value(value.clone())
                .map_err(|e| Rejection::Parse(vec![format!("timeline document: {e}")]))?;
            let mut problems = Vec::new();
            if timeline.clip_id != clip.clip_id {
                problems.push(format!(
                    "clip_id must be \"{}\", got \"{}\"",
                    clip.clip_id, timeline.clip_id
                ));
            }
            if timeline.duration_ms != clip.duration_ms {
                problems.push(format!(
                    "duration_ms must be {}, got {}",
                    clip.duration_ms, timeline.duration_ms
                ));
            }
            problems.extend(timeline.violations().iter().map(ToString::to_string));
            if problems.is_empty() {
                timeline.clip_id = clip.clip_id.clone();
                Ok(timeline)
            } else {
                Err(Rejection::Parse(problems))
            }
        },
    )
}

pub fn schema_listing(schema: &OdorSchema) -> String {
    let mut out = String::new();
    for family in &schema.families {
        let ids: Vec<String> = family
            .descriptors
            .iter()
            .map(|d| format!("{} ({})", d.descriptor_id, d.name))
            .collect();
        out.push_str(&format!("- {}: {}\n", family.name, ids.join(", ")));
    }
    out.trim_end().to_string()
}

pub fn stage_b_prompt(timeline: &VisualTimeline, schema: &OdorSchema, max_concurrent: usize) -> String {
    prompts::fill(
        prompts::STAGE_B,
        &[
            ("max_concurrent", &max_concurrent.to_string()),
            ("duration_ms", &timeline.duration_ms.to_string()),
            ("schema_id", &schema.schema_id),
            ("schema_descriptors", &schema_listing(schema)),
            ("timeline_json", crate::io::to_canonical_json(timeline).trim_end()),
        ],
    )
}

#[derive(Deserialize)]
struct PlanDraft {
    events: Vec<ScentEvent>,
}

pub fn plan_system(
    timeline: &VisualTimeline,
    schema: &OdorSchema,
    provider: &ModelProvider,
    max_concurrent: usize,
    max_repairs: u32,
) -> Result<(ScentPlan, StageTranscript), StageError> {
    timeline
        .validate()
        .map_err(|e| StageError::InvalidTimeline(e.to_string()))?;
    run_with_repairs(
        provider,
        Stage::B,
        &timeline.clip_id,
        stage_b_prompt(timeline, schema, max_concurrent),
        &[],
        max_repairs,
        |value| {
            let draft: PlanDraft = serde_json::from_value(value.clone())
                .map_err(|e| Rejection::Parse(vec![format!("plan document: {e}")]))?;
            let mut events = draft.events;
            events.sort_by(|a, b| a.canonical_cmp(b));
            let mut plan = ScentPlan {
                plan_id: ScentPlan::plan_id_for(&timeline.clip_id, Strategy::System),
                clip_id: timeline.clip_id.clone(),
                strategy: Strategy::System,
                events,
                rendered_text: String::new(),
            };
            let report = validate_plan(&plan, timeline, schema, max_concurrent)
                .expect("plan is built for this timeline");
            if !report.is_valid() {
                return Err(Rejection::Invalid(report));
            }
            plan.rendered_text = crate::render::render_plan_text(&plan, schema)
                .expect("validated descriptors render");
            Ok(plan)
        },
    )
}
