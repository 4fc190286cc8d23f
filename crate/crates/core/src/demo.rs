//! Bundled offline fixtures: ten short clips with their visual timelines
//! and recorded model responses for both stages, plus a media backend that
//! works on placeholder clip files instead of real video.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ingest::media::{MediaBackend, MediaError, ProbeInfo};
use crate::planners::mock::MockTransport;
use crate::planners::Stage;
use crate::timeline::VisualTimeline;

const BUNDLE: &str = include_str!("../data/demo_fixtures.json");
const PLACEHOLDER_MAGIC: &str = "scentplan-fixture-clip";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoClip {
    pub clip_id: String,
    pub duration_ms: u64,
    pub timeline: VisualTimeline,
    /// Responses in attempt order; the last one also serves as the default.
    pub stage_a: Vec<String>,
    pub stage_b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoBundle {
    pub clips: Vec<DemoClip>,
}

impl DemoBundle {
    pub fn builtin() -> Self {
        serde_json::from_str(BUNDLE).expect("bundled demo fixtures parse")
    }

    pub fn clip_ids(&self) -> Vec<String> {
        self.clips.iter().map(|c| c.clip_id.clone()).collect()
    }

    /// Lays the responses out in the mock transport's directory format.
    pub fn write_mock_fixtures(&self, root: &Path) -> std::io::Result<()> {
        for clip in &self.clips {
            for (stage, responses) in [(Stage::A, &clip.stage_a), (Stage::B, &clip.stage_b)] {
                for (i, text) in responses.iter().enumerate() {
                    write(&MockTransport::fixture_path(root, stage, &clip.clip_id, Some(i as u32 + 1)), text)?;
                }
                if let Some(last) = responses.last() {
                    write(&MockTransport::fixture_path(root, stage, &clip.clip_id, None), last)?;
                }
            }
        }
        Ok(())
    }

    /// Writes one placeholder clip file per fixture clip into `dir`.
    pub fn write_placeholder_clips(&self, dir: &Path) -> std::io::Result<Vec<(String, PathBuf)>> {
        std::fs::create_dir_all(dir)?;
        self.clips
            .iter()
            .map(|clip| {
                let path = dir.join(format!("{}.clip", clip.clip_id));
                write_placeholder_clip(&path, clip.duration_ms)?;
                Ok((clip.clip_id.clone(), path))
            })
            .collect()
    }
}

fn write(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)
}

pub fn write_placeholder_clip(path: &Path, duration_ms: u64) -> std::io::Result<()> {
    write(path, &format!("{PLACEHOLDER_MAGIC} duration_ms={duration_ms}\n"))
}

/// Reads durations from placeholder clip files and writes small
/// placeholder frames.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixtureMedia;

impl MediaBackend for FixtureMedia {
    fn probe(&self, path: &Path) -> Result<ProbeInfo, MediaError> {
        let text = std::fs::read_to_string(path).map_err(|_| MediaError::Unreadable(path.display().to_string()))?;
        let duration_ms = text
            .strip_prefix(PLACEHOLDER_MAGIC)
            .and_then(|rest| rest.trim().strip_prefix("duration_ms="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| MediaError::NoVideoStream(path.display().to_string()))?;
        Ok(ProbeInfo { duration_ms })
    }

    fn extract_frames(&self, input: &Path, frames: &[(u64, PathBuf)]) -> Result<(), MediaError> {
        let name = input.file_stem().unwrap_or_default().to_string_lossy();
        for (at_ms, output) in frames {
            std::fs::write(output, format!("placeholder frame {name} @ {at_ms}ms\n"))
                .map_err(|e| MediaError::Decoder(format!("{}: {e}", output.display())))?;
        }
        Ok(())
    }
}
