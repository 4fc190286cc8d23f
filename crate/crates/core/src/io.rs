//! Canonical JSON documents on disk (`.plan.json`, `.timeline.json`, ...).
//!
//! Canonical means: keys sorted lexicographically at every level, two-space
//! indentation, UTF-8, trailing newline.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub const PLAN_SUFFIX: &str = ".plan.json";
pub const TIMELINE_SUFFIX: &str = ".timeline.json";
pub const TRANSCRIPT_SUFFIX: &str = ".transcript.json";

/// Serializes through `serde_json::Value`, whose map type keeps keys sorted.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("document types serialize to JSON");
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    text.push('\n');
    text
}

pub fn write_document<T: Serialize>(path: &Path, value: &T) -> Result<(), DocumentError> {
    let io_err = |source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err)?;
    }
    std::fs::write(path, to_canonical_json(value)).map_err(io_err)
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| DocumentError::Json {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Unsorted {
        zeta: u8,
        alpha: u8,
    }

    #[test]
    fn keys_are_sorted() {
        let text = to_canonical_json(&Unsorted { zeta: 1, alpha: 2 });
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
        assert!(text.ends_with('\n'));
    }
}
