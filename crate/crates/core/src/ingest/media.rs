//! External media tooling behind a narrow contract: probe a file for its
//! video duration, and decode single frames at given timestamps into image
//! files. The default backend shells out to ffprobe/ffmpeg through
//! configurable command templates.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum MediaError {
    #[error("unreadable file {0}")]
    Unreadable(String),
    #[error("{0} has no video stream")]
    NoVideoStream(String),
    #[error("zero-duration stream in {0}")]
    ZeroDuration(String),
    #[error("media tool `{program}` failed: {detail}")]
    Tool { program: String, detail: String },
    #[error("decoder failure: {0}")]
    Decoder(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeInfo {
    pub duration_ms: u64,
}

pub trait MediaBackend: Send + Sync {
    fn probe(&self, path: &Path) -> Result<ProbeInfo, MediaError>;

    /// Writes one image per `(at_ms, output)` pair.
    fn extract_frames(&self, input: &Path, frames: &[(u64, PathBuf)]) -> Result<(), MediaError>;
}

/// Command templates. Placeholders: `{input}`, `{output}`, `{at_secs}`, `{at_ms}`.
///
/// The probe command must print `key=value` lines including
/// `codec_type=video` and `duration=<seconds>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandMedia {
    pub probe: Vec<String>,
    pub decode: Vec<String>,
}

impl Default for CommandMedia {
    fn default() -> Self {
        let owned = |args: &[&str]| args.iter().map(|s| s.to_string()).collect();
        Self {
            probe: owned(&[
                "ffprobe",
                "-v",
                "error",
                "-select_streams",
                "v:0",
                "-show_entries",
                "stream=codec_type:format=duration",
                "-of",
                "default=noprint_wrappers=1",
                "{input}",
            ]),
            decode: owned(&[
                "ffmpeg", "-v", "error", "-y", "-ss", "{at_secs}", "-i", "{input}", "-frames:v",
                "1", "{output}",
            ]),
        }
    }
}

fn fill(template: &[String], input: &Path, output: Option<&Path>, at_ms: u64) -> Vec<String> {
    template
        .iter()
        .map(|arg| {
            let mut arg = arg.replace("{input}", &input.to_string_lossy());
            if let Some(out) = output {
                arg = arg.replace("{output}", &out.to_string_lossy());
            }
            arg.replace("{at_secs}", &format!("{:.3}", at_ms as f64 / 1000.0))
                .replace("{at_ms}", &at_ms.to_string())
        })
        .collect()
}

fn run(args: &[String]) -> Result<String, MediaError> {
    let (program, rest) = args.split_first().ok_or_else(|| MediaError::Tool {
        program: String::new(),
        detail: "empty command template".into(),
    })?;
    let output = Command::new(program)
        .args(rest)
        .output()
        .map_err(|e| MediaError::Tool {
            program: program.clone(),
            detail: e.to_string(),
        })?;
    if !output.status.success() {
        return Err(MediaError::Tool {
            program: program.clone(),
            detail: format!(
                "{}: {}",
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            ),
        });
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

/// Parses probe output of `key=value` lines.
pub fn parse_probe_output(path: &Path, text: &str) -> Result<ProbeInfo, MediaError> {
    let mut has_video = false;
    let mut duration = None;
    for line in text.lines() {
        match line.trim().split_once('=') {
            Some(("codec_type", "video")) => has_video = true,
            Some(("duration", value)) => {
                if let Ok(secs) = value.trim().parse::<f64>() {
                    duration = Some(secs);
                }
            }
            _ => {}
        }
    }
    let shown = path.display().to_string();
    if !has_video {
        return Err(MediaError::NoVideoStream(shown));
    }
    match duration {
        Some(secs) if secs.is_finite() && secs > 0.0 => Ok(ProbeInfo {
            duration_ms: (secs * 1000.0).round() as u64,
        }),
        _ => Err(MediaError::ZeroDuration(shown)),
    }
}

impl MediaBackend for CommandMedia {
    fn probe(&self, path: &Path) -> Result<ProbeInfo, MediaError> {
        let text = run(&fill(&self.probe, path, None, 0))?;
        parse_probe_output(path, &text)
    }

    fn extract_frames(&self, input: &Path, frames: &[(u64, PathBuf)]) -> Result<(), MediaError> {
        for (at_ms, output) in frames {
            run(&fill(&self.decode, input, Some(output), *at_ms))
                .map_err(|e| MediaError::Decoder(e.to_string()))?;
            if !output.is_file() {
                return Err(MediaError::Decoder(format!(
                    "no frame written to {}",
                    output.display()
                )));
            }
        }
        Ok(())
    }
}
