//! Study harness: sessions with randomized blinded plan order, response
//! capture, and analysis-ready export.

pub mod http;
mod order;
pub mod simulate;
mod store;
mod types;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use order::{presentation_order, question_rng};
pub use store::{Harness, HarnessError, StimulusSet};
pub use types::*;

use crate::io::to_canonical_json;

/// Tokens that must never appear in a participant-facing payload.
pub const BLINDING_TOKENS: [&str; 4] = ["system", "over", "naive", "baseline"];

/// Blinding tokens found as whole words in `body` (case-insensitive).
pub fn blinding_leaks(body: &str) -> Vec<String> {
    crate::schema::tokenize(body)
        .into_iter()
        .filter(|t| BLINDING_TOKENS.contains(&t.as_str()))
        .collect()
}

pub fn dataset_path(dir: &Path, study: StudyId) -> PathBuf {
    dir.join(format!("{study}.dataset.jsonl"))
}

pub fn exclusions_path(dir: &Path, study: StudyId) -> PathBuf {
    dir.join(format!("{study}.exclusions.json"))
}

/// Writes the dataset (one session document per line) and the sidecar.
pub fn write_export(dir: &Path, export: &Export) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let study = export.exclusions.study_id;
    let mut file = std::fs::File::create(dataset_path(dir, study))?;
    for session in &export.dataset {
        let value = serde_json::to_value(session).expect("sessions serialize");
        writeln!(file, "{}", serde_json::to_string(&value).expect("values serialize"))?;
    }
    file.sync_all()?;
    std::fs::write(exclusions_path(dir, study), to_canonical_json(&export.exclusions))
}

pub fn read_dataset(path: &Path) -> Result<Vec<SessionResponses>, crate::io::DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::io::DocumentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|source| crate::io::DocumentError::Json {
                path: path.display().to_string(),
                source,
            })
        })
        .collect()
}
