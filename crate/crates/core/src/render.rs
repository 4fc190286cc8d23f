//! Standardized plain-text rendering of scent plans.
//!
//! The output never names the strategy or the clip, so rendered plans can be
//! shown to study participants as blind conditions.

use crate::plan::{Envelope, ScentEvent, ScentPlan};
use crate::schema::OdorSchema;

pub const SILENT_PLAN_TEXT: &str = "No scent.";

#[derive(Debug, thiserror::Error)]
#[error("unknown descriptor id \"{0}\"")]
pub struct RenderError(pub String);

pub fn intensity_word(intensity: f64) -> &'static str {
    if intensity <= 0.33 {
        "low"
    } else if intensity <= 0.66 {
        "medium"
    } else {
        "high"
    }
}

pub fn envelope_phrase(envelope: Envelope) -> &'static str {
    match envelope {
        Envelope::Step => "steady",
        Envelope::RampIn => "fading in",
        Envelope::RampOut => "fading out",
        Envelope::RampBoth => "fading in and out",
    }
}

/// `m:ss`, rounded to the nearest whole second.
pub fn format_clock(ms: u64) -> String {
    let secs = (ms + 500) / 1000;
    format!("{}:{:02}", secs / 60, secs % 60)
}

pub fn render_plan_text(plan: &ScentPlan, schema: &OdorSchema) -> Result<String, RenderError> {
    if plan.events.is_empty() {
        return Ok(SILENT_PLAN_TEXT.to_string());
    }
    let names = schema.names();
    let mut events: Vec<&ScentEvent> = plan.events.iter().collect();
    events.sort_by(|a, b| a.canonical_cmp(b));

    let count = events.len();
    let mut lines = Vec::with_capacity(count + 1);
    lines.push(format!(
        "Scent plan: {count} {}",
        if count == 1 { "cue" } else { "cues" }
    ));
    for ev in events {
        let name = names
            .get(ev.descriptor_id.as_str())
            .ok_or_else(|| RenderError(ev.descriptor_id.clone()))?;
        lines.push(format!(
            "{}–{} — {}, {} intensity, {}",
            format_clock(ev.onset_ms),
            format_clock(ev.offset_ms),
            name,
            intensity_word(ev.intensity),
            envelope_phrase(ev.envelope),
        ));
    }
    Ok(lines.join("\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::Strategy;

    fn ev(descriptor: &str, onset: u64, offset: u64, intensity: f64, envelope: Envelope) -> ScentEvent {
        ScentEvent {
            descriptor_id: descriptor.into(),
            onset_ms: onset,
            offset_ms: offset,
            intensity,
            envelope,
            rationale_element_id: None,
        }
    }

    fn plan(events: Vec<ScentEvent>) -> ScentPlan {
        ScentPlan {
            plan_id: "kitchen-01.system".into(),
            clip_id: "kitchen-01".into(),
            strategy: Strategy::System,
            events,
            rendered_text: String::new(),
        }
    }

    #[test]
    fn golden_single_event() {
        let text = render_plan_text(
            &plan(vec![ev("citrus.lemon", 2000, 8000, 0.8, Envelope::RampIn)]),
            &OdorSchema::builtin(),
        )
        .unwrap();
        assert_eq!(text, "Scent plan: 1 cue\n0:02–0:08 — lemon, high intensity, fading in");
    }

    #[test]
    fn golden_multi_event() {
        let text = render_plan_text(
            &plan(vec![
                ev("dairy-savory.butter", 61_400, 75_000, 0.33, Envelope::Step),
                ev("herbal-green.basil", 500, 12_499, 0.34, Envelope::RampBoth),
                ev("roasted-smoky.coffee", 500, 9_000, 0.66, Envelope::RampOut),
            ]),
            &OdorSchema::builtin(),
        )
        .unwrap();
        assert_eq!(
            text,
            "Scent plan: 3 cues\n\
             0:01–0:09 — roasted coffee, medium intensity, fading out\n\
             0:01–0:12 — fresh basil, medium intensity, fading in and out\n\
             1:01–1:15 — melted butter, low intensity, steady"
        );
    }

    #[test]
    fn empty_plan() {
        assert_eq!(
            render_plan_text(&plan(vec![]), &OdorSchema::builtin()).unwrap(),
            "No scent."
        );
    }

    #[test]
    fn input_order_does_not_matter() {
        let a = ev("citrus.lemon", 0, 4000, 0.5, Envelope::Step);
        let b = ev("floral.rose", 2000, 9000, 0.9, Envelope::RampOut);
        let schema = OdorSchema::builtin();
        assert_eq!(
            render_plan_text(&plan(vec![a.clone(), b.clone()]), &schema).unwrap(),
            render_plan_text(&plan(vec![b, a]), &schema).unwrap()
        );
    }

    #[test]
    fn unknown_descriptor_errors() {
        let err = render_plan_text(
            &plan(vec![ev("citrus.yuzu", 0, 1000, 0.5, Envelope::Step)]),
            &OdorSchema::builtin(),
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "unknown descriptor id \"citrus.yuzu\"");
    }

    #[test]
    fn intensity_bands() {
        assert_eq!(intensity_word(0.0), "low");
        assert_eq!(intensity_word(0.33), "low");
        assert_eq!(intensity_word(0.331), "medium");
        assert_eq!(intensity_word(0.66), "medium");
        assert_eq!(intensity_word(0.661), "high");
        assert_eq!(intensity_word(1.0), "high");
    }
}
