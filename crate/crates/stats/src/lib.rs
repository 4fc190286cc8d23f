//! Analysis of scent-plan study exports: ranking aggregation, Friedman
//! test, Wilcoxon signed-rank test (exact and tie-corrected normal), Holm
//! step-down correction, seeded percentile bootstrap, and report tables.

pub mod aggregate;
pub mod bootstrap;
pub mod friedman;
pub mod holm;
pub mod ranks;
pub mod report;
pub mod study1;
pub mod study2;
pub mod wilcoxon;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate_rankings, ConditionSummary, RankSummary, RankingMatrix};
pub use bootstrap::{bootstrap_ci, Statistic, DEFAULT_ITERATIONS, DEFAULT_SEED};
pub use friedman::{friedman, friedman_test};
pub use holm::holm_correct;
pub use study1::{analyze_study1, FriedmanMode, Study1Report};
pub use study2::{analyze_study2, ConstructSpec, ConstructSummary, Study2Report};
pub use wilcoxon::wilcoxon_signed_rank;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("empty input")]
    EmptyInput,
    #[error("all differences are zero")]
    AllZero,
    #[error("need at least {needed} {what}, got {got}")]
    TooSmall { what: &'static str, needed: usize, got: usize },
    #[error("at least 1000 bootstrap iterations are required, got {0}")]
    TooFewIterations(usize),
    #[error("invalid data: {0}")]
    InvalidData(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Friedman,
    WilcoxonExact,
    WilcoxonNormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    /// χ² for Friedman, W for Wilcoxon.
    pub statistic: f64,
    pub n_effective: usize,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_holm: Option<f64>,
}

/// Bootstrap settings shared by both study analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub iterations: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
        }
    }
}

/// Values closer than this are treated as tied (or as zero differences).
pub(crate) const TIE_EPS: f64 = 1e-9;
