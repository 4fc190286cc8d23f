use std::collections::BTreeMap;
use std::path::Path;

use scentplan_core::demo::DemoBundle;
use scentplan_core::harness::simulate::{simulate_participant, Appeal};
use scentplan_core::harness::{
    blinding_leaks, presentation_order, write_export, Harness, HarnessError, ResponseRecord, SessionView,
    SlotSubmission, StimulusSet, StudyConfig, StudyId,
};
use scentplan_core::planners::{plan_naive, plan_over_inclusive};
use scentplan_core::{OdorSchema, Strategy};

fn stimuli() -> StimulusSet {
    let schema = OdorSchema::builtin();
    let mut set = StimulusSet::default();
    for clip in DemoBundle::builtin().clips {
        let over = plan_over_inclusive(&clip.timeline, &schema);
        let naive = plan_naive(&clip.timeline, &schema);
        let mut system = over.clone();
        system.events.truncate(1);
        let system_text = scentplan_core::render_plan_text(&system, &schema).unwrap();
        set.insert(&clip.clip_id, Strategy::System, system_text);
        set.insert(&clip.clip_id, Strategy::OverInclusive, over.rendered_text);
        set.insert(&clip.clip_id, Strategy::Naive, naive.rendered_text);
        set.clip_files.insert(clip.clip_id.clone(), format!("{}.mp4", clip.clip_id).into());
    }
    set
}

fn configs() -> Vec<StudyConfig> {
    let clips = DemoBundle::builtin().clip_ids();
    vec![
        StudyConfig::study1(clips.clone(), 20240613),
        StudyConfig::study2(clips[..3].to_vec(), 20240613),
    ]
}

fn open(dir: &Path) -> Harness {
    Harness::open(dir, configs(), stimuli()).unwrap()
}

fn run_study1(harness: &Harness) {
    for p in 0..22 {
        let answered = if p % 11 < 4 { 3 + p % 5 } else { 10 };
        simulate_participant(harness, StudyId::Study1, &format!("p{p:02}"), answered, &Appeal::default(), p as u64)
            .unwrap();
    }
}

#[test]
fn export_keeps_complete_sessions_only() {
    let dir = tempfile::tempdir().unwrap();
    let harness = open(dir.path());
    run_study1(&harness);
    let export = harness.export(StudyId::Study1).unwrap();
    assert_eq!(export.dataset.len(), 14);
    assert_eq!(export.exclusions.excluded, 8);
    assert_eq!(export.exclusions.total_sessions, 22);
    for session in &export.dataset {
        assert_eq!(session.responses.len(), 10);
        for r in &session.responses {
            let mut ranking = r.ranking.clone().unwrap();
            ranking.sort();
            assert_eq!(ranking, Strategy::ALL.to_vec());
        }
    }
    for excluded in &export.exclusions.sessions {
        assert_eq!(excluded.missing_questions.len(), 10 - excluded.answered);
    }

    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_export(a.path(), &export).unwrap();
    write_export(b.path(), &harness.export(StudyId::Study1).unwrap()).unwrap();
    for name in ["study1.dataset.jsonl", "study1.exclusions.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn store_replays_from_log() {
    let dir = tempfile::tempdir().unwrap();
    let before = {
        let harness = open(dir.path());
        run_study1(&harness);
        harness.flush().unwrap();
        serde_json::to_string(&harness.export(StudyId::Study1).unwrap()).unwrap()
    };
    let reopened = open(dir.path());
    assert_eq!(serde_json::to_string(&reopened.export(StudyId::Study1).unwrap()).unwrap(), before);
}

#[test]
fn no_complete_sessions_gives_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let harness = open(dir.path());
    simulate_participant(&harness, StudyId::Study1, "p", 2, &Appeal::default(), 1).unwrap();
    let export = harness.export(StudyId::Study1).unwrap();
    assert!(export.dataset.is_empty());
    assert_eq!(export.exclusions.excluded, 1);
    assert!(export.exclusions.reason.contains("no session"));
    assert!(matches!(harness.export(StudyId::Study2), Err(HarnessError::NoSessions(_))));
}

fn record(session_id: &str, q: usize, clip: &str, ranking: Vec<Strategy>) -> ResponseRecord {
    ResponseRecord {
        session_id: session_id.into(),
        question_id: format!("q{q}"),
        clip_id: clip.into(),
        ranking: Some(ranking),
        likert: None,
        preference: None,
        free_text: None,
    }
}

#[test]
fn submission_validation() {
    use Strategy::*;
    let dir = tempfile::tempdir().unwrap();
    let harness = open(dir.path());
    let s = harness.create_session("study1", "p").unwrap();
    let id = s.session_id.as_str();

    let ack = harness.submit_response(id, record(id, 1, "kitchen-01", vec![OverInclusive, System, Naive])).unwrap();
    assert!(ack.accepted && !ack.superseded);
    let ack = harness.submit_response(id, record(id, 1, "kitchen-01", vec![System, OverInclusive, Naive])).unwrap();
    assert!(ack.superseded);

    let err = harness.submit_response(id, record(id, 2, "cafe-02", vec![System, System, Naive])).unwrap_err();
    assert!(err.to_string().contains("not a permutation"), "{err}");
    let err = harness
        .submit_slots(id, SlotSubmission { question: 2, ranking: Some(vec![0, 0, 2]), ..Default::default() })
        .unwrap_err();
    assert!(err.to_string().contains("not a permutation"), "{err}");
    let err = harness.submit_response(id, record(id, 11, "cafe-02", Strategy::ALL.to_vec())).unwrap_err();
    assert!(matches!(err, HarnessError::UnknownQuestion(_)));
    assert!(matches!(harness.task(id, 0), Err(HarnessError::UnknownQuestion(_))));
    assert!(matches!(harness.task("nope", 1), Err(HarnessError::UnknownSession(_))));
    assert!(matches!(harness.create_session("study3", "p"), Err(HarnessError::UnknownStudy(_))));

    let s2 = harness.create_session("study2", "p").unwrap();
    let err = harness
        .submit_slots(
            &s2.session_id,
            SlotSubmission {
                question: 1,
                likert: Some(BTreeMap::from([("immersion".to_string(), vec![9, 4])])),
                ..Default::default()
            },
        )
        .unwrap_err();
    assert!(err.to_string().contains("out of range"), "{err}");
}

#[test]
fn completed_sessions_are_closed() {
    let dir = tempfile::tempdir().unwrap();
    let harness = open(dir.path());
    let s = simulate_participant(&harness, StudyId::Study2, "rater", 3, &Appeal::default(), 5).unwrap();
    assert!(s.completed);
    let err = harness
        .submit_slots(&s.session_id, SlotSubmission { question: 1, preference: Some(0), ..Default::default() })
        .unwrap_err();
    assert!(matches!(err, HarnessError::SessionCompleted(_)));
    let export = harness.export(StudyId::Study2).unwrap();
    let likert = export.dataset[0].responses[0].likert.as_ref().unwrap();
    assert_eq!(likert.len(), 4);
    assert!(likert.values().all(|m| m.len() == 2 && m.values().all(|v| (1..=7).contains(v))));
}

#[test]
fn orders_are_deterministic_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let harness = open(dir.path());
    let a = harness.create_session("study1", "p-01").unwrap();
    let b = harness.create_session("study1", "p-01").unwrap();
    assert_eq!(a.orders, b.orders);
    assert_eq!(a.orders.len(), 10);

    let code = |seed: u64| -> Vec<String> {
        (0..10)
            .map(|q| {
                presentation_order(seed, "p-01", q, &Strategy::ALL)
                    .iter()
                    .map(|s| s.display_name().chars().next().unwrap())
                    .collect()
            })
            .collect()
    };
    assert_eq!(code(1).join(" "), "SNO NSO NOS SON OSN OSN SON NSO NSO NOS");
    assert_eq!(code(2).join(" "), "NOS NOS SNO SNO OSN SON ONS ONS SNO NOS");
}

/// Chi-square goodness of fit over the 6 orderings; df = 5.
pub fn ordering_chi_square(orders: &[Vec<Strategy>]) -> (f64, BTreeMap<Vec<Strategy>, usize>) {
    let mut counts: BTreeMap<Vec<Strategy>, usize> = BTreeMap::new();
    for o in orders {
        *counts.entry(o.clone()).or_default() += 1;
    }
    let expected = orders.len() as f64 / 6.0;
    let stat = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    (stat, counts)
}

#[test]
fn presentation_orders_are_uniform() {
    let orders: Vec<Vec<Strategy>> = (0..600)
        .flat_map(|p| (0..10).map(move |q| presentation_order(20240613, &format!("p{p}"), q, &Strategy::ALL)))
        .collect();
    assert_eq!(orders.len(), 6000);
    let (stat, counts) = ordering_chi_square(&orders);
    assert_eq!(counts.len(), 6);
    // χ²₅ critical value at α = 0.01
    assert!(stat < 15.086, "chi-square {stat}");
    for c in counts.values() {
        assert!((*c as f64 / 6000.0 - 1.0 / 6.0).abs() <= 0.02);
    }
}

#[test]
fn served_payloads_are_blind() {
    let dir = tempfile::tempdir().unwrap();
    let harness = open(dir.path());
    for study in [StudyId::Study1, StudyId::Study2] {
        let session = harness.create_session(study.as_str(), "blind").unwrap();
        let view = serde_json::to_string(&SessionView::from(&session)).unwrap();
        assert!(blinding_leaks(&view).is_empty(), "{view}");
        for n in 1..=session.orders.len() {
            let body = serde_json::to_string(&harness.task(&session.session_id, n).unwrap()).unwrap();
            assert!(blinding_leaks(&body).is_empty(), "{body}");
        }
    }
}
