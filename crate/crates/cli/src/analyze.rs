use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use scentplan_core::harness::{
    read_dataset, write_export, Harness, HarnessError, SessionResponses, StudyId,
};
use scentplan_core::io::write_document;
use scentplan_core::Workspace;
use scentplan_stats::{
    analyze_study1, analyze_study2, AnalysisOptions, ConstructSpec, FriedmanMode,
};
use scentplan_stats::report::AnalysisReport;

use crate::{config, GlobalArgs};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Study to analyze; all studies with sessions when omitted.
    #[arg(long, value_parser = crate::parse_study)]
    pub study: Option<StudyId>,
    /// Analyze an exported dataset file instead of the harness store.
    #[arg(long, requires = "study")]
    pub dataset: Option<PathBuf>,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = scentplan_stats::DEFAULT_ITERATIONS)]
    pub iterations: usize,
    /// Friedman test over individual trials rather than participant means.
    #[arg(long)]
    pub per_trial: bool,
}

pub struct Analysis {
    pub report: AnalysisReport,
    pub json_path: PathBuf,
    pub text_path: PathBuf,
}

pub fn analyze_dataset(
    study: StudyId,
    dataset: &[SessionResponses],
    options: AnalysisOptions,
    mode: FriedmanMode,
) -> anyhow::Result<AnalysisReport> {
    Ok(match study {
        StudyId::Study1 => AnalysisReport {
            study1: Some(analyze_study1(dataset, options, mode)?),
            study2: None,
        },
        StudyId::Study2 => AnalysisReport {
            study1: None,
            study2: Some(analyze_study2(dataset, &ConstructSpec::defaults(), options)?),
        },
    })
}

/// Writes `<study>.report.json` and `<study>.tables.txt` under reports/.
pub fn write_report(ws: &Workspace, study: StudyId, report: AnalysisReport) -> anyhow::Result<Analysis> {
    let dir = ws.reports_dir();
    let json_path = dir.join(format!("{study}.report.json"));
    let text_path = dir.join(format!("{study}.tables.txt"));
    write_document(&json_path, &report)?;
    std::fs::write(&text_path, report.to_text())
        .with_context(|| format!("cannot write {}", text_path.display()))?;
    Ok(Analysis {
        report,
        json_path,
        text_path,
    })
}

/// Exports each study from the store and analyzes it. Studies without
/// sessions are skipped unless explicitly requested.
pub fn analyze_store(
    ws: &Workspace,
    harness: &Harness,
    studies: &[StudyId],
    explicit: bool,
    options: AnalysisOptions,
    mode: FriedmanMode,
) -> anyhow::Result<Vec<Analysis>> {
    let mut out = Vec::new();
    for &study in studies {
        let export = match harness.export(study) {
            Ok(export) => export,
            Err(HarnessError::NoSessions(_)) if !explicit => continue,
            Err(e) => return Err(e.into()),
        };
        write_export(&ws.exports_dir(), &export)
            .with_context(|| format!("cannot write export to {}", ws.exports_dir().display()))?;
        let report = analyze_dataset(study, &export.dataset, options, mode)
            .with_context(|| format!("cannot analyze {study}"))?;
        out.push(write_report(ws, study, report)?);
    }
    if out.is_empty() {
        bail!("no sessions recorded in {}", ws.harness_dir().display());
    }
    Ok(out)
}

pub fn print(analyses: &[Analysis]) {
    for (i, a) in analyses.iter().enumerate() {
        if i > 0 {
            println!();
        }
        print!("{}", a.report.to_text());
    }
    println!();
    for a in analyses {
        println!("wrote {} and {}", a.json_path.display(), a.text_path.display());
    }
}

pub fn run(g: &GlobalArgs, args: AnalyzeArgs) -> anyhow::Result<()> {
    let ws = config::workspace(g)?;
    let options = AnalysisOptions {
        iterations: args.iterations,
        seed: g.seed,
    };
    let mode = if args.per_trial {
        FriedmanMode::PerTrial
    } else {
        FriedmanMode::Aggregated
    };
    let analyses = if let Some(path) = &args.dataset {
        let study = args.study.expect("clap requires --study with --dataset");
        let dataset = read_dataset(path).with_context(|| format!("cannot read dataset {}", path.display()))?;
        let report = analyze_dataset(study, &dataset, options, mode)?;
        vec![write_report(&ws, study, report)?]
    } else {
        let configs = config::studies(&ws, g.seed)?;
        let harness = Harness::open_store(&ws.harness_dir(), configs)?;
        let (studies, explicit) = match args.study {
            Some(s) => (vec![s], true),
            None => (vec![StudyId::Study1, StudyId::Study2], false),
        };
        analyze_store(&ws, &harness, &studies, explicit, options, mode)?
    };
    print(&analyses);
    Ok(())
}
