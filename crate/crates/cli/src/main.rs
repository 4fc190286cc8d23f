use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scentplan_core::harness::StudyId;
use scentplan_core::Strategy;

mod analyze;
mod config;
mod demo;
mod ingest;
mod plan;
mod serve;

#[derive(Debug, Parser)]
#[command(name = "scentplan", version, about = "Scent-plan generation, study harness and analysis")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Workspace directory holding clips, plans, the study store and reports.
    #[arg(long, global = true, default_value = ".")]
    pub workspace: PathBuf,
    /// Odor schema file, or "default" for the bundled schema.
    #[arg(long, global = true, default_value = "default")]
    pub schema: String,
    /// Seed for presentation orders and bootstrap resampling.
    #[arg(long, global = true, default_value_t = scentplan_stats::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Register clips and sample frames.
    Ingest(ingest::IngestArgs),
    /// Generate scent plans for registered clips.
    Plan(plan::PlanArgs),
    /// Serve the study harness HTTP API.
    Serve(serve::ServeArgs),
    /// Export responses and write the report tables.
    Analyze(analyze::AnalyzeArgs),
    /// Run the whole pipeline offline on the bundled fixtures.
    Demo(demo::DemoArgs),
    /// Compare two plan files for the same clip.
    Diff { a: PathBuf, b: PathBuf },
}

pub fn positive_fps(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("fps must be greater than 0".into())
    }
}

pub fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

pub fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

pub fn parse_study(s: &str) -> Result<StudyId, String> {
    s.parse()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let g = cli.global;
    match cli.command {
        Command::Ingest(args) => ingest::run(&g, args),
        Command::Plan(args) => plan::run(&g, args),
        Command::Serve(args) => serve::run(&g, args),
        Command::Analyze(args) => analyze::run(&g, args),
        Command::Demo(args) => demo::run(&g, args),
        Command::Diff { a, b } => {
            let a: scentplan_core::ScentPlan = scentplan_core::io::read_document(&a)?;
            let b: scentplan_core::ScentPlan = scentplan_core::io::read_document(&b)?;
            print!("{}", scentplan_core::diff_plans(&a, &b)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
