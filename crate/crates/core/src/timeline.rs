//! Visual timeline: time-aligned elements and events of one clip, with no
//! olfactory content.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementCategory {
    Object,
    Action,
    Environment,
    Person,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Appear,
    Disappear,
    ActionOnset,
    ActionOffset,
    SceneChange,
}

/// Half-open visibility interval in milliseconds, serialized as `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span(pub u64, pub u64);

impl Span {
    pub fn start_ms(&self) -> u64 {
        self.0
    }

    pub fn end_ms(&self) -> u64 {
        self.1
    }

    pub fn len_ms(&self) -> u64 {
        self.1.saturating_sub(self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineElement {
    pub element_id: String,
    pub label: String,
    pub category: ElementCategory,
    pub salience: f64,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineEvent {
    pub event_id: String,
    pub kind: EventKind,
    pub at_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_id: Option<String>,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualTimeline {
    pub clip_id: String,
    pub duration_ms: u64,
    #[serde(default)]
    pub elements: Vec<TimelineElement>,
    #[serde(default)]
    pub events: Vec<TimelineEvent>,
}

/// A broken timeline invariant, phrased so it can be quoted back to a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimelineViolation {
    DuplicateElement(String),
    InvertedSpan { element_id: String, start_ms: u64, end_ms: u64 },
    SpanOutsideClip { element_id: String, end_ms: u64, duration_ms: u64 },
    SalienceOutOfRange { element_id: String },
    UnknownElementRef { event_id: String, element_id: String },
    EventOutsideClip { event_id: String, at_ms: u64 },
    EventsUnsorted { event_id: String },
}

impl fmt::Display for TimelineViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateElement(id) => write!(f, "duplicate element id \"{id}\""),
            Self::InvertedSpan { element_id, start_ms, end_ms } => write!(
                f,
                "element \"{element_id}\" span starts after it ends ({start_ms}ms > {end_ms}ms)"
            ),
            Self::SpanOutsideClip { element_id, end_ms, duration_ms } => write!(
                f,
                "element \"{element_id}\" ends at {end_ms}ms, past the clip duration {duration_ms}ms"
            ),
            Self::SalienceOutOfRange { element_id } => {
                write!(f, "element \"{element_id}\" salience outside [0, 1]")
            }
            Self::UnknownElementRef { event_id, element_id } => write!(
                f,
                "event \"{event_id}\" references unknown element \"{element_id}\""
            ),
            Self::EventOutsideClip { event_id, at_ms } => {
                write!(f, "event \"{event_id}\" at {at_ms}ms lies outside the clip")
            }
            Self::EventsUnsorted { event_id } => {
                write!(f, "event \"{event_id}\" is out of time order")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid timeline for clip \"{clip_id}\": {}", violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct TimelineError {
    pub clip_id: String,
    pub violations: Vec<TimelineViolation>,
}

impl VisualTimeline {
    pub fn empty(clip_id: impl Into<String>, duration_ms: u64) -> Self {
        Self {
            clip_id: clip_id.into(),
            duration_ms,
            elements: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn violations(&self) -> Vec<TimelineViolation> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for el in &self.elements {
            if !ids.insert(el.element_id.as_str()) {
                out.push(TimelineViolation::DuplicateElement(el.element_id.clone()));
            }
            if el.span.0 > el.span.1 {
                out.push(TimelineViolation::InvertedSpan {
                    element_id: el.element_id.clone(),
                    start_ms: el.span.0,
                    end_ms: el.span.1,
                });
            }
            if el.span.1 > self.duration_ms {
                out.push(TimelineViolation::SpanOutsideClip {
                    element_id: el.element_id.clone(),
                    end_ms: el.span.1,
                    duration_ms: self.duration_ms,
                });
            }
            if !(0.0..=1.0).contains(&el.salience) {
                out.push(TimelineViolation::SalienceOutOfRange {
                    element_id: el.element_id.clone(),
                });
            }
        }
        let mut last = 0;
        for ev in &self.events {
            if let Some(element_id) = &ev.element_id {
                if !ids.contains(element_id.as_str()) {
                    out.push(TimelineViolation::UnknownElementRef {
                        event_id: ev.event_id.clone(),
                        element_id: element_id.clone(),
                    });
                }
            }
            if ev.at_ms > self.duration_ms {
                out.push(TimelineViolation::EventOutsideClip {
                    event_id: ev.event_id.clone(),
                    at_ms: ev.at_ms,
                });
            }
            if ev.at_ms < last {
                out.push(TimelineViolation::EventsUnsorted {
                    event_id: ev.event_id.clone(),
                });
            }
            last = last.max(ev.at_ms);
        }
        out
    }

    pub fn validate(&self) -> Result<(), TimelineError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(TimelineError {
                clip_id: self.clip_id.clone(),
                violations,
            })
        }
    }

    pub fn element(&self, element_id: &str) -> Option<&TimelineElement> {
        self.elements.iter().find(|e| e.element_id == element_id)
    }
}
