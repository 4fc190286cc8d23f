//! Model-free baseline planners. Both are pure functions of
//! `(timeline, schema)`.

use std::cmp::Ordering;

use crate::plan::{Envelope, ScentEvent, ScentPlan, Strategy};
use crate::schema::OdorSchema;
use crate::timeline::{TimelineElement, VisualTimeline};

/// Lowest intensity a baseline emits; rules may carry 0.
const MIN_INTENSITY: f64 = 0.01;
/// Window given to elements whose visibility span is a single instant.
const INSTANT_WINDOW_MS: u64 = 1000;

fn event_span(element: &TimelineElement, duration_ms: u64) -> (u64, u64) {
    let (start, end) = (element.span.0, element.span.1.min(duration_ms));
    if start < end {
        return (start, end);
    }
    let onset = start.min(duration_ms.saturating_sub(INSTANT_WINDOW_MS));
    (onset, (onset + INSTANT_WINDOW_MS).min(duration_ms))
}

/// One step event per mapped element over its whole visibility span,
/// without prioritization or a concurrency cap.
pub fn plan_over_inclusive(timeline: &VisualTimeline, schema: &OdorSchema) -> ScentPlan {
    let events = timeline
        .elements
        .iter()
        .filter_map(|el| {
            let rule = schema.lookup(&el.label)?;
            let (onset_ms, offset_ms) = event_span(el, timeline.duration_ms);
            Some(ScentEvent {
                descriptor_id: rule.descriptor_id.clone(),
                onset_ms,
                offset_ms,
                intensity: rule.default_intensity.max(MIN_INTENSITY),
                envelope: Envelope::Step,
                rationale_element_id: Some(el.element_id.clone()),
            })
        })
        .collect();
    ScentPlan::assemble(&timeline.clip_id, Strategy::OverInclusive, events, schema)
        .expect("mapping targets are validated schema descriptors")
}

/// Salience descending, then longer span, then element id.
fn naive_order(a: &&TimelineElement, b: &&TimelineElement) -> Ordering {
    b.salience
        .total_cmp(&a.salience)
        .then(b.span.len_ms().cmp(&a.span.len_ms()))
        .then_with(|| a.element_id.cmp(&b.element_id))
}

/// A single whole-clip step event for the most salient mapped element.
pub fn plan_naive(timeline: &VisualTimeline, schema: &OdorSchema) -> ScentPlan {
    let mut ranked: Vec<&TimelineElement> = timeline.elements.iter().collect();
    ranked.sort_by(naive_order);
    let events = ranked
        .into_iter()
        .find_map(|el| schema.lookup(&el.label).map(|rule| (el, rule)))
        .filter(|_| timeline.duration_ms > 0)
        .map(|(el, rule)| ScentEvent {
            descriptor_id: rule.descriptor_id.clone(),
            onset_ms: 0,
            offset_ms: timeline.duration_ms,
            intensity: rule.default_intensity.max(MIN_INTENSITY),
            envelope: Envelope::Step,
            rationale_element_id: Some(el.element_id.clone()),
        })
        .into_iter()
        .collect();
    ScentPlan::assemble(&timeline.clip_id, Strategy::Naive, events, schema)
        .expect("mapping targets are validated schema descriptors")
}
