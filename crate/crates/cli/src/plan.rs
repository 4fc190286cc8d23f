use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use scentplan_core::plan::DEFAULT_MAX_CONCURRENT;
use scentplan_core::planners::http::ChatCompletionsTransport;
use scentplan_core::planners::mock::MockTransport;
use scentplan_core::planners::{
    generate_stimuli, ModelProvider, ProviderConfig, StageProviders, StimuliOptions, StimuliOutcome,
    DEFAULT_MAX_REPAIR_ATTEMPTS,
};
use scentplan_core::{Strategy, Workspace};

use crate::{config, GlobalArgs};

/// Budget of the fixture provider; fixtures cost nothing.
const MOCK_BUDGET: u64 = 1_000_000;

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("which").required(true).args(["clips", "all"])))]
pub struct PlanArgs {
    /// Clip ids to plan.
    pub clips: Vec<String>,
    /// Plan every registered clip.
    #[arg(long)]
    pub all: bool,
    /// Only these strategies (repeatable): system, over_inclusive, naive.
    #[arg(long = "strategy", value_parser = crate::parse_strategy)]
    pub strategies: Vec<Strategy>,
    /// Use recorded fixture responses from the workspace's mock/ directory.
    #[arg(long)]
    pub mock: bool,
    /// Provider config (defaults to providers.toml in the workspace).
    #[arg(long)]
    pub providers: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_CONCURRENT, value_parser = crate::positive_usize)]
    pub max_concurrent: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_REPAIR_ATTEMPTS)]
    pub max_repairs: u32,
}

fn mock_config(id: &str) -> ProviderConfig {
    ProviderConfig {
        provider_id: id.into(),
        endpoint: "mock://fixtures".into(),
        model_name: "fixture".into(),
        credential_env: String::new(),
        budget: MOCK_BUDGET,
    }
}

pub fn providers(ws: &Workspace, mock: bool, path: Option<PathBuf>) -> anyhow::Result<(ModelProvider, ModelProvider)> {
    if mock {
        let make = |id| ModelProvider::new(&mock_config(id), Box::new(MockTransport::new(ws.mock_dir())));
        return Ok((make("mock-vision"), make("mock-planner")));
    }
    let path = path.unwrap_or_else(|| config::default_providers_path(ws));
    let file = config::providers(&path)?;
    let make = |cfg: &ProviderConfig| -> anyhow::Result<ModelProvider> {
        let transport = ChatCompletionsTransport::from_config(cfg)
            .with_context(|| format!("provider \"{}\"", cfg.provider_id))?;
        Ok(ModelProvider::new(cfg, Box::new(transport)))
    };
    Ok((make(&file.vision)?, make(&file.planner)?))
}

pub fn run(g: &GlobalArgs, args: PlanArgs) -> anyhow::Result<()> {
    let ws = config::workspace(g)?;
    let schema = config::schema(g)?;
    let manifest = config::manifest(&ws)?;
    let clips = if args.all {
        manifest.records()
    } else {
        args.clips
            .iter()
            .map(|id| manifest.get(id).with_context(|| format!("unknown clip \"{id}\"")))
            .collect::<anyhow::Result<Vec<_>>>()?
    };
    if clips.is_empty() {
        bail!("no clips registered in {}", ws.manifest_path().display());
    }
    let strategies: BTreeSet<Strategy> = if args.strategies.is_empty() {
        Strategy::ALL.into_iter().collect()
    } else {
        args.strategies.into_iter().collect()
    };
    // baselines never call a model, so they need no provider config
    let needs_models = strategies.contains(&Strategy::System)
        || clips.iter().any(|c| !ws.timeline_path(&c.clip_id).is_file());
    let (vision, planner) = if needs_models {
        providers(&ws, args.mock, args.providers)?
    } else {
        providers(&ws, true, None)?
    };
    let options = StimuliOptions {
        strategies,
        max_concurrent: args.max_concurrent,
        max_repairs: args.max_repairs,
    };
    let outcome = generate_stimuli(
        &ws,
        &clips,
        &schema,
        StageProviders { vision: &vision, planner: &planner },
        &options,
    )?;
    report(&outcome, &ws)
}

pub fn report(outcome: &StimuliOutcome, ws: &Workspace) -> anyhow::Result<()> {
    for (clip, plans) in &outcome.plans {
        let summary: Vec<String> = plans
            .iter()
            .map(|p| format!("{} ({} cue{})", p.strategy, p.events.len(), if p.events.len() == 1 { "" } else { "s" }))
            .collect();
        println!("{clip}: {}", summary.join(", "));
    }
    for f in &outcome.failures {
        eprintln!("failed: {} {} (stage {}): {}", f.clip_id, f.strategy, f.stage, f.error);
    }
    println!("{} plan(s) written to {}", outcome.plan_count(), ws.plans_dir().display());
    if !outcome.failures.is_empty() {
        bail!(
            "{} plan(s) failed; see {}",
            outcome.failures.len(),
            ws.failures_path().display()
        );
    }
    Ok(())
}
