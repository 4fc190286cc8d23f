//! Fixture-backed transport for offline runs and tests.
//!
//! Responses live at `<root>/<stage>/<clip_id>/<attempt>.txt`; when the
//! attempt-specific file is missing, `<root>/<stage>/<clip_id>/default.txt`
//! is used instead.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::provider::{ModelRequest, Stage, Transport, TransportError};

#[derive(Debug)]
pub struct MockTransport {
    root: PathBuf,
    log: Mutex<Vec<(Stage, String, u32)>>,
}

impl MockTransport {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn fixture_path(root: &Path, stage: Stage, clip_id: &str, attempt: Option<u32>) -> PathBuf {
        let name = match attempt {
            Some(n) => format!("{n}.txt"),
            None => "default.txt".to_string(),
        };
        root.join(stage.to_string()).join(clip_id).join(name)
    }

    /// Requests served so far, as `(stage, clip_id, attempt)`.
    pub fn served(&self) -> Vec<(Stage, String, u32)> {
        self.log.lock().unwrap().clone()
    }
}

impl Transport for MockTransport {
    fn complete(&self, request: &ModelRequest) -> Result<String, TransportError> {
        self.log
            .lock()
            .unwrap()
            .push((request.stage, request.clip_id.clone(), request.attempt));
        let specific = Self::fixture_path(&self.root, request.stage, &request.clip_id, Some(request.attempt));
        let fallback = Self::fixture_path(&self.root, request.stage, &request.clip_id, None);
        let path = if specific.is_file() { specific } else { fallback };
        std::fs::read_to_string(&path).map_err(|e| {
            TransportError::Failed(format!("no mock fixture at {}: {e}", path.display()))
        })
    }
}
