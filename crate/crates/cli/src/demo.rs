use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;
use scentplan_core::demo::{DemoBundle, FixtureMedia};
use scentplan_core::harness::simulate::{simulate_participant, Appeal};
use scentplan_core::harness::{Harness, StudyConfig, StudyId};
use scentplan_core::ingest::DEFAULT_FPS;
use scentplan_core::io::{read_document, write_document};
use scentplan_core::planners::{generate_stimuli, StageProviders, StimuliOptions};
use scentplan_core::{validate_plan, VisualTimeline, Workspace};
use scentplan_stats::{AnalysisOptions, FriedmanMode};

use crate::{analyze, config, ingest, plan, GlobalArgs};

const MARKER: &str = ".scentplan-demo";
const CLIPS_DIR: &str = "clips";
const STUDY1_PARTICIPANTS: usize = 22;
const STUDY2_PARTICIPANTS: usize = 8;
const STUDY2_CLIPS: usize = 3;

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Bootstrap resamples for the report.
    #[arg(long, default_value_t = scentplan_stats::DEFAULT_ITERATIONS)]
    pub iterations: usize,
}

/// Study 1 participant `p` (1-based) stops early when `p % 11 < 4`,
/// leaving 14 complete sessions out of 22.
pub fn study1_answers(p: usize, questions: usize) -> usize {
    if p % 11 < 4 {
        (3 + p % 5).min(questions - 1)
    } else {
        questions
    }
}

/// Refuses to touch a non-empty directory that is not a demo workspace,
/// then clears everything a previous demo run produced.
fn prepare(ws: &Workspace) -> anyhow::Result<()> {
    let root = ws.root();
    let is_demo = root.join(MARKER).is_file();
    let is_empty = std::fs::read_dir(root)?.next().is_none();
    if !is_demo && !is_empty {
        bail!(
            "{} is not empty; run the demo in an empty directory (--workspace)",
            root.display()
        );
    }
    for dir in [
        ws.frames_dir(),
        ws.timelines_dir(),
        ws.plans_dir(),
        ws.transcripts_dir(),
        ws.mock_dir(),
        ws.harness_dir(),
        ws.exports_dir(),
        ws.reports_dir(),
        root.join(CLIPS_DIR),
    ] {
        if dir.exists() {
            std::fs::remove_dir_all(&dir).with_context(|| format!("cannot clear {}", dir.display()))?;
        }
    }
    for file in [ws.manifest_path(), ws.studies_path()] {
        if file.exists() {
            std::fs::remove_file(&file)?;
        }
    }
    std::fs::write(root.join(MARKER), "")?;
    Ok(())
}

pub fn run(g: &GlobalArgs, args: DemoArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let ws = config::workspace(g)?;
    prepare(&ws)?;
    let schema = config::schema(g)?;
    let bundle = DemoBundle::builtin();
    bundle.write_mock_fixtures(&ws.mock_dir())?;

    let manifest = config::manifest(&ws)?;
    for (_, path) in bundle.write_placeholder_clips(&ws.root().join(CLIPS_DIR))? {
        ingest::ingest_one(&manifest, &FixtureMedia, &path, DEFAULT_FPS, &ws.frames_dir())?;
    }
    println!("ingested {} clips", manifest.len());

    let (vision, planner) = plan::providers(&ws, true, None)?;
    let outcome = generate_stimuli(
        &ws,
        &manifest.records(),
        &schema,
        StageProviders { vision: &vision, planner: &planner },
        &StimuliOptions::default(),
    )?;
    let mut valid = 0;
    for (clip_id, plans) in &outcome.plans {
        let timeline: VisualTimeline = read_document(&ws.timeline_path(clip_id))?;
        for p in plans {
            if validate_plan(p, &timeline, &schema, scentplan_core::DEFAULT_MAX_CONCURRENT)?.is_valid() {
                valid += 1;
            }
        }
    }
    plan::report(&outcome, &ws)?;
    println!("{valid} of {} plans valid", outcome.plan_count());

    let clips = bundle.clip_ids();
    let configs = vec![
        StudyConfig::study1(clips.clone(), g.seed),
        StudyConfig::study2(clips[..STUDY2_CLIPS].to_vec(), g.seed),
    ];
    write_document(&ws.studies_path(), &configs)?;
    let stimuli = config::stimuli(&ws, &configs)?;
    let harness = Harness::open(&ws.harness_dir(), configs.clone(), stimuli)?;
    let appeal = Appeal::default();
    let q1 = configs[0].question_count();
    for p in 1..=STUDY1_PARTICIPANTS {
        let id = format!("p-{p:02}");
        simulate_participant(&harness, StudyId::Study1, &id, study1_answers(p, q1), &appeal, g.seed + p as u64)?;
    }
    let q2 = configs[1].question_count();
    for p in 1..=STUDY2_PARTICIPANTS {
        let id = format!("r-{p:02}");
        simulate_participant(&harness, StudyId::Study2, &id, q2, &appeal, g.seed + 1000 + p as u64)?;
    }
    harness.flush()?;
    println!(
        "simulated {STUDY1_PARTICIPANTS} ranking and {STUDY2_PARTICIPANTS} rating sessions\n"
    );

    let options = AnalysisOptions {
        iterations: args.iterations,
        seed: g.seed,
    };
    let analyses = analyze::analyze_store(
        &ws,
        &harness,
        &[StudyId::Study1, StudyId::Study2],
        true,
        options,
        FriedmanMode::Aggregated,
    )?;
    analyze::print(&analyses);
    println!("demo finished in {:.1} s", started.elapsed().as_secs_f64());
    Ok(())
}
