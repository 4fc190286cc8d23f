//! Provider-abstracted model access with a per-provider request budget.

use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    A,
    B,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::A => "A",
            Stage::B => "B",
        })
    }
}

/// Provider config file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider_id: String,
    pub endpoint: String,
    pub model_name: String,
    /// Name of the environment variable holding the API credential.
    pub credential_env: String,
    pub budget: u64,
}

#[derive(Debug, Clone)]
pub struct ModelRequest {
    pub stage: Stage,
    pub clip_id: String,
    /// 1-based attempt number within one repair loop.
    pub attempt: u32,
    pub prompt: String,
    pub images: Vec<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("missing credential: environment variable {0} is not set")]
    MissingCredential(String),
    #[error("transport failure: {0}")]
    Failed(String),
}

pub trait Transport: Send + Sync {
    fn complete(&self, request: &ModelRequest) -> Result<String, TransportError>;
}

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("request budget exhausted for provider \"{0}\"")]
    BudgetExhausted(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

pub struct ModelProvider {
    pub provider_id: String,
    pub endpoint: String,
    pub model_name: String,
    remaining: AtomicU64,
    transport: Box<dyn Transport>,
}

impl fmt::Debug for ModelProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelProvider")
            .field("provider_id", &self.provider_id)
            .field("model_name", &self.model_name)
            .field("remaining", &self.remaining())
            .finish()
    }
}

impl ModelProvider {
    pub fn new(config: &ProviderConfig, transport: Box<dyn Transport>) -> Self {
        Self {
            provider_id: config.provider_id.clone(),
            endpoint: config.endpoint.clone(),
            model_name: config.model_name.clone(),
            remaining: AtomicU64::new(config.budget),
            transport,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining.load(Ordering::SeqCst)
    }

    /// Spends one unit of budget, then forwards to the transport. Calls
    /// beyond the budget are rejected without reaching the transport.
    pub fn call(&self, request: &ModelRequest) -> Result<String, ProviderError> {
        self.remaining
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |left| left.checked_sub(1))
            .map_err(|_| ProviderError::BudgetExhausted(self.provider_id.clone()))?;
        Ok(self.transport.complete(request)?)
    }
}
