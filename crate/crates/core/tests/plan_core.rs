use proptest::prelude::*;
use scentplan_core::io::{read_document, to_canonical_json, write_document};
use scentplan_core::plan::{validate_plan, Envelope, ScentEvent, ScentPlan, Strategy as PlanStrategy, Violation};
use scentplan_core::{render_plan_text, OdorSchema, Span, TimelineElement, VisualTimeline};

fn descriptor_ids(schema: &OdorSchema) -> Vec<String> {
    schema.descriptors().map(|d| d.descriptor_id.clone()).collect()
}

fn arb_event(ids: Vec<String>, duration: u64) -> impl Strategy<Value = ScentEvent> {
    (
        proptest::sample::select(ids),
        0..duration,
        1..=duration,
        0.01f64..=1.0,
        prop_oneof![
            Just(Envelope::Step),
            Just(Envelope::RampIn),
            Just(Envelope::RampOut),
            Just(Envelope::RampBoth)
        ],
    )
        .prop_map(|(descriptor_id, a, b, intensity, envelope)| {
            let (onset_ms, offset_ms) = if a < b { (a, b) } else { (b.saturating_sub(1).min(a), a + 1) };
            ScentEvent {
                descriptor_id,
                onset_ms,
                offset_ms,
                intensity,
                envelope,
                rationale_element_id: None,
            }
        })
}

fn plan(strategy: PlanStrategy, events: Vec<ScentEvent>) -> ScentPlan {
    let mut events = events;
    events.sort_by(|a, b| a.onset_ms.cmp(&b.onset_ms));
    ScentPlan {
        plan_id: ScentPlan::plan_id_for("c", strategy),
        clip_id: "c".into(),
        strategy,
        events,
        rendered_text: String::new(),
    }
}

/// Maximum number of events covering any single millisecond.
fn brute_force_peak(events: &[ScentEvent], duration: u64) -> usize {
    (0..duration)
        .map(|t| events.iter().filter(|e| e.onset_ms <= t && t < e.offset_ms).count())
        .max()
        .unwrap_or(0)
}

#[test]
fn builtin_schema_is_consistent() {
    let schema = OdorSchema::builtin();
    schema.validate().unwrap();
    assert_eq!(schema.descriptor_count(), 48);
    for rule in &schema.mapping {
        assert!(schema.contains(&rule.descriptor_id), "{}", rule.descriptor_id);
    }
}

#[test]
fn schema_round_trips() {
    let schema = OdorSchema::builtin();
    let again = OdorSchema::from_json(&schema.to_json()).unwrap();
    assert_eq!(schema, again);
}

#[test]
fn default_mapping_examples() {
    let schema = OdorSchema::builtin();
    assert_eq!(schema.lookup("lemon").unwrap().descriptor_id, "citrus.lemon");
    assert!(schema.lookup("cutting board").is_none());
    assert_eq!(schema.lookup("rosemary").unwrap().descriptor_id, "herbal-green.rosemary");
    assert_eq!(schema.lookup("roses").unwrap().descriptor_id, "floral.rose");
    assert_eq!(schema.lookup("metal surfaces").unwrap().descriptor_id, "clean-chemical.metallic");
}

#[test]
fn plan_documents_round_trip() {
    let schema = OdorSchema::builtin();
    let p = ScentPlan::assemble(
        "kitchen-01",
        PlanStrategy::System,
        vec![ScentEvent {
            descriptor_id: "citrus.lemon".into(),
            onset_ms: 2000,
            offset_ms: 8000,
            intensity: 0.8,
            envelope: Envelope::RampIn,
            rationale_element_id: Some("e1".into()),
        }],
        &schema,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kitchen-01.system.plan.json");
    write_document(&path, &p).unwrap();
    let back: ScentPlan = read_document(&path).unwrap();
    assert_eq!(back, p);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), to_canonical_json(&back));
}

#[test]
fn three_way_overlap_reports_concurrency() {
    let schema = OdorSchema::builtin();
    let ev = |d: &str, on, off| ScentEvent {
        descriptor_id: d.into(),
        onset_ms: on,
        offset_ms: off,
        intensity: 0.5,
        envelope: Envelope::Step,
        rationale_element_id: None,
    };
    let p = plan(
        PlanStrategy::System,
        vec![
            ev("citrus.lemon", 0, 6000),
            ev("herbal-green.basil", 2000, 6000),
            ev("clean-chemical.metallic", 4500, 9000),
        ],
    );
    let report = validate_plan(&p, &VisualTimeline::empty("c", 10_000), &schema, 2).unwrap();
    assert_eq!(report.violations, vec![Violation::Concurrency { count: 3, at_ms: 4500 }]);
    assert!(report.to_string().contains("3 concurrent at 4500ms"));

    // the cap does not apply to baselines
    let mut over = p.clone();
    over.strategy = PlanStrategy::OverInclusive;
    assert!(validate_plan(&over, &VisualTimeline::empty("c", 10_000), &schema, 2).unwrap().is_valid());
}

#[test]
fn unknown_descriptor_is_reported() {
    let schema = OdorSchema::builtin();
    let p = plan(
        PlanStrategy::System,
        vec![ScentEvent {
            descriptor_id: "citrus.yuzu".into(),
            onset_ms: 0,
            offset_ms: 1000,
            intensity: 0.5,
            envelope: Envelope::Step,
            rationale_element_id: None,
        }],
    );
    let report = validate_plan(&p, &VisualTimeline::empty("c", 10_000), &schema, 2).unwrap();
    assert!(matches!(report.violations[0], Violation::UnknownDescriptor { .. }));
}

#[test]
fn clip_mismatch_is_an_error() {
    let p = plan(PlanStrategy::Naive, vec![]);
    assert!(validate_plan(&p, &VisualTimeline::empty("other", 1000), &OdorSchema::builtin(), 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn concurrency_check_agrees_with_brute_force(
        events in proptest::collection::vec(arb_event(descriptor_ids(&OdorSchema::builtin()), 400), 0..7),
        cap in 1usize..4,
    ) {
        let schema = OdorSchema::builtin();
        let p = plan(PlanStrategy::System, events);
        let report = validate_plan(&p, &VisualTimeline::empty("c", 401), &schema, cap).unwrap();
        let flagged = report.violations.iter().any(|v| matches!(v, Violation::Concurrency { .. }));
        prop_assert_eq!(flagged, brute_force_peak(&p.events, 401) > cap);
    }

    #[test]
    fn rendering_ignores_event_order(
        events in proptest::collection::vec(arb_event(descriptor_ids(&OdorSchema::builtin()), 600_000), 0..8),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let schema = OdorSchema::builtin();
        let mut shuffled = events.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = ScentPlan { events, ..plan(PlanStrategy::System, vec![]) };
        let b = ScentPlan { events: shuffled, ..plan(PlanStrategy::System, vec![]) };
        prop_assert_eq!(render_plan_text(&a, &schema).unwrap(), render_plan_text(&b, &schema).unwrap());
    }

    #[test]
    fn rendered_text_never_names_a_strategy(
        events in proptest::collection::vec(arb_event(descriptor_ids(&OdorSchema::builtin()), 60_000), 0..6),
    ) {
        let text = render_plan_text(&plan(PlanStrategy::System, events), &OdorSchema::builtin()).unwrap();
        prop_assert!(scentplan_core::harness::blinding_leaks(&text).is_empty());
    }
}

#[test]
fn timeline_with_elements_validates() {
    let tl = VisualTimeline {
        clip_id: "c".into(),
        duration_ms: 5000,
        elements: vec![TimelineElement {
            element_id: "e1".into(),
            label: "lemon".into(),
            category: scentplan_core::ElementCategory::Object,
            salience: 0.9,
            span: Span(0, 5000),
        }],
        events: vec![],
    };
    tl.validate().unwrap();
}
