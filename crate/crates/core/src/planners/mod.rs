//! Stage A / Stage B planners behind a provider abstraction, and the two
//! model-free baselines.

mod baselines;
pub mod http;
pub mod mock;
pub mod prompts;
mod provider;
mod stages;
mod stimuli;
pub mod structured;

pub use baselines::{plan_naive, plan_over_inclusive};
pub use provider::{
    ModelProvider, ModelRequest, ProviderConfig, ProviderError, Stage, Transport, TransportError,
};
pub use stages::{
    extract_timeline, plan_system, stage_a_prompt, stage_b_prompt, Exchange, StageError,
    StageTranscript, DEFAULT_MAX_REPAIR_ATTEMPTS,
};
pub use stimuli::{
    generate_stimuli, load_plans, FailureEntry, FailureManifest, StageProviders, StimuliError,
    StimuliOptions, StimuliOutcome,
};
