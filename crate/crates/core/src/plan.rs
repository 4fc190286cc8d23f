//! Scent-plan IR and its validator.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::schema::OdorSchema;
use crate::timeline::VisualTimeline;

pub const DEFAULT_MAX_CONCURRENT: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    System,
    OverInclusive,
    Naive,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::System, Strategy::OverInclusive, Strategy::Naive];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::System => "system",
            Strategy::OverInclusive => "over_inclusive",
            Strategy::Naive => "naive",
        }
    }

    /// Short label used in report tables.
    pub fn display_name(&self) -> &'static str {
        match self {
            Strategy::System => "System",
            Strategy::OverInclusive => "Over",
            Strategy::Naive => "Naive",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "system" => Ok(Strategy::System),
            "over_inclusive" | "over-inclusive" | "over" => Ok(Strategy::OverInclusive),
            "naive" => Ok(Strategy::Naive),
            other => Err(format!("unknown strategy \"{other}\"")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    Step,
    RampIn,
    RampOut,
    RampBoth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScentEvent {
    pub descriptor_id: String,
    pub onset_ms: u64,
    pub offset_ms: u64,
    pub intensity: f64,
    pub envelope: Envelope,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale_element_id: Option<String>,
}

impl ScentEvent {
    /// Total order used wherever plans must be canonical.
    pub(crate) fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.onset_ms
            .cmp(&other.onset_ms)
            .then(self.offset_ms.cmp(&other.offset_ms))
            .then_with(|| self.descriptor_id.cmp(&other.descriptor_id))
            .then(self.intensity.total_cmp(&other.intensity))
            .then(self.envelope.cmp(&other.envelope))
            .then_with(|| self.rationale_element_id.cmp(&other.rationale_element_id))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScentPlan {
    pub plan_id: String,
    pub clip_id: String,
    pub strategy: Strategy,
    #[serde(default)]
    pub events: Vec<ScentEvent>,
    #[serde(default)]
    pub rendered_text: String,
}

impl ScentPlan {
    pub fn plan_id_for(clip_id: &str, strategy: Strategy) -> String {
        format!("{clip_id}.{strategy}")
    }

    /// Builds a plan with events in canonical order and its text rendered.
    pub fn assemble(
        clip_id: &str,
        strategy: Strategy,
        mut events: Vec<ScentEvent>,
        schema: &OdorSchema,
    ) -> Result<Self, crate::render::RenderError> {
        events.sort_by(ScentEvent::canonical_cmp);
        let mut plan = ScentPlan {
            plan_id: Self::plan_id_for(clip_id, strategy),
            clip_id: clip_id.to_string(),
            strategy,
            events,
            rendered_text: String::new(),
        };
        plan.rendered_text = crate::render::render_plan_text(&plan, schema)?;
        Ok(plan)
    }

    pub fn descriptor_ids(&self) -> BTreeSet<&str> {
        self.events.iter().map(|e| e.descriptor_id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownDescriptor { descriptor_id: String },
    EmptySpan { index: usize, onset_ms: u64, offset_ms: u64 },
    OutsideClip { index: usize, offset_ms: u64, duration_ms: u64 },
    IntensityOutOfRange { index: usize, intensity: f64 },
    Unsorted { index: usize },
    Concurrency { count: usize, at_ms: u64 },
    UnresolvedRationale { element_id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownDescriptor { descriptor_id } => {
                write!(f, "descriptor \"{descriptor_id}\" is not in the odor schema")
            }
            Self::EmptySpan { index, onset_ms, offset_ms } => write!(
                f,
                "event {index} onset {onset_ms}ms is not before offset {offset_ms}ms"
            ),
            Self::OutsideClip { index, offset_ms, duration_ms } => write!(
                f,
                "event {index} ends at {offset_ms}ms, past the clip duration {duration_ms}ms"
            ),
            Self::IntensityOutOfRange { index, intensity } => {
                write!(f, "event {index} intensity {intensity} outside (0, 1]")
            }
            Self::Unsorted { index } => write!(f, "event {index} is out of onset order"),
            Self::Concurrency { count, at_ms } => write!(f, "{count} concurrent at {at_ms}ms"),
            Self::UnresolvedRationale { element_id } => write!(
                f,
                "rationale element \"{element_id}\" does not exist in the timeline"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub plan_id: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "{}: valid", self.plan_id);
        }
        write!(f, "{}: {}", self.plan_id, self.messages().join("; "))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("plan clip \"{plan_clip}\" does not match timeline clip \"{timeline_clip}\"")]
pub struct ClipMismatch {
    pub plan_clip: String,
    pub timeline_clip: String,
}

/// Checks every plan invariant. Violations are returned as data.
pub fn validate_plan(
    plan: &ScentPlan,
    timeline: &VisualTimeline,
    schema: &OdorSchema,
    max_concurrent: usize,
) -> Result<ValidationReport, ClipMismatch> {
    if plan.clip_id != timeline.clip_id {
        return Err(ClipMismatch {
            plan_clip: plan.clip_id.clone(),
            timeline_clip: timeline.clip_id.clone(),
        });
    }
    let mut violations = Vec::new();
    let mut unknown = BTreeSet::new();
    for (index, ev) in plan.events.iter().enumerate() {
        if !schema.contains(&ev.descriptor_id) && unknown.insert(ev.descriptor_id.clone()) {
            violations.push(Violation::UnknownDescriptor {
                descriptor_id: ev.descriptor_id.clone(),
            });
        }
        if ev.onset_ms >= ev.offset_ms {
            violations.push(Violation::EmptySpan {
                index,
                onset_ms: ev.onset_ms,
                offset_ms: ev.offset_ms,
            });
        }
        if ev.offset_ms > timeline.duration_ms {
            violations.push(Violation::OutsideClip {
                index,
                offset_ms: ev.offset_ms,
                duration_ms: timeline.duration_ms,
            });
        }
        if !(ev.intensity > 0.0 && ev.intensity <= 1.0) {
            violations.push(Violation::IntensityOutOfRange {
                index,
                intensity: ev.intensity,
            });
        }
        if index > 0 && plan.events[index - 1].onset_ms > ev.onset_ms {
            violations.push(Violation::Unsorted { index });
        }
    }
    if plan.strategy == Strategy::System {
        violations.extend(concurrency_violations(&plan.events, max_concurrent));
        let mut seen = BTreeSet::new();
        for ev in &plan.events {
            if let Some(id) = &ev.rationale_element_id {
                if timeline.element(id).is_none() && seen.insert(id.clone()) {
                    violations.push(Violation::UnresolvedRationale {
                        element_id: id.clone(),
                    });
                }
            }
        }
    }
    Ok(ValidationReport {
        plan_id: plan.plan_id.clone(),
        violations,
    })
}

/// Sweep over event boundaries with half-open `[onset, offset)` spans.
/// Ends sort before starts at the same instant, so back-to-back events do
/// not overlap. Reports each start that pushes the active count past `cap`.
fn concurrency_violations(events: &[ScentEvent], cap: usize) -> Vec<Violation> {
    let mut boundaries: Vec<(u64, i8)> = events
        .iter()
        .filter(|e| e.onset_ms < e.offset_ms)
        .flat_map(|e| [(e.onset_ms, 1i8), (e.offset_ms, -1i8)])
        .collect();
    boundaries.sort();
    let mut active = 0usize;
    let mut out = Vec::new();
    for (at_ms, delta) in boundaries {
        if delta > 0 {
            active += 1;
            if active > cap {
                out.push(Violation::Concurrency { count: active, at_ms });
            }
        } else {
            active -= 1;
        }
    }
    out
}
