//! Clip registration and uniform frame sampling.

mod manifest;
pub mod media;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use manifest::ClipManifest;
pub use media::{CommandMedia, MediaBackend, MediaError, ProbeInfo};

pub const DEFAULT_FPS: f64 = 1.0;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("unreadable file {0}")]
    Unreadable(String),
    #[error("id already registered: \"{0}\"")]
    DuplicateId(String),
    #[error("clip \"{0}\" is not registered")]
    UnknownClip(String),
    #[error("sampling rate must be positive, got {0}")]
    InvalidFps(f64),
    #[error("only {produced} frame(s) would be produced for clip \"{clip_id}\"; at least 2 are required")]
    TooFewFrames { clip_id: String, produced: usize },
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error("clip manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub clip_id: String,
    pub path: PathBuf,
    pub duration_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fps_sampled: Option<f64>,
    #[serde(default)]
    pub frame_paths: Vec<PathBuf>,
}

impl ClipRecord {
    pub fn is_sampled(&self) -> bool {
        self.fps_sampled.is_some() && !self.frame_paths.is_empty()
    }

    /// Timestamps of the sampled frames, in frame order.
    pub fn frame_stamps(&self) -> Vec<FrameStamp> {
        match self.fps_sampled {
            Some(fps) => (0..self.frame_paths.len())
                .map(|i| FrameStamp::new(i as u64, fps))
                .collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameStamp {
    pub index: u64,
    pub at_ms: u64,
}

impl FrameStamp {
    pub fn new(index: u64, fps: f64) -> Self {
        Self {
            index,
            at_ms: (index as f64 / fps * 1000.0).round() as u64,
        }
    }
}

/// Uniform stamps `0, 1/fps, 2/fps, ...` strictly inside the clip.
pub fn uniform_stamps(duration_ms: u64, fps: f64) -> Result<Vec<FrameStamp>, IngestError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(IngestError::InvalidFps(fps));
    }
    let count = (duration_ms as f64 * fps / 1000.0 + 1e-9).floor() as u64;
    Ok((0..count)
        .map(|i| FrameStamp::new(i, fps))
        .filter(|s| s.at_ms < duration_ms)
        .collect())
}

pub fn frame_file_name(index: u64) -> String {
    format!("frame_{index:06}.jpg")
}

/// Probes `path` and records the clip in the manifest (without frames).
pub fn register_clip(
    manifest: &ClipManifest,
    media: &dyn MediaBackend,
    path: &Path,
    clip_id: &str,
) -> Result<ClipRecord, IngestError> {
    if manifest.contains(clip_id) {
        return Err(IngestError::DuplicateId(clip_id.to_string()));
    }
    if std::fs::File::open(path).is_err() || !path.is_file() {
        return Err(IngestError::Unreadable(path.display().to_string()));
    }
    let info = media.probe(path)?;
    if info.duration_ms == 0 {
        return Err(MediaError::ZeroDuration(path.display().to_string()).into());
    }
    let record = ClipRecord {
        clip_id: clip_id.to_string(),
        path: path.to_path_buf(),
        duration_ms: info.duration_ms,
        fps_sampled: None,
        frame_paths: Vec::new(),
    };
    manifest.insert_new(record.clone())?;
    Ok(record)
}

/// Decodes uniformly spaced frames into `frames_root/<clip_id>/`.
///
/// Any previous frames for the clip are removed first, so re-sampling
/// yields exactly the files for the requested rate.
pub fn sample_frames(
    clip: &ClipRecord,
    fps: f64,
    media: &dyn MediaBackend,
    frames_root: &Path,
) -> Result<ClipRecord, IngestError> {
    let stamps = uniform_stamps(clip.duration_ms, fps)?;
    if stamps.len() < 2 {
        return Err(IngestError::TooFewFrames {
            clip_id: clip.clip_id.clone(),
            produced: stamps.len(),
        });
    }
    let dir = frames_root.join(&clip.clip_id);
    if dir.exists() {
        std::fs::remove_dir_all(&dir).map_err(|e| MediaError::Decoder(e.to_string()))?;
    }
    std::fs::create_dir_all(&dir).map_err(|e| MediaError::Decoder(e.to_string()))?;
    let jobs: Vec<(u64, PathBuf)> = stamps
        .iter()
        .map(|s| (s.at_ms, dir.join(frame_file_name(s.index))))
        .collect();
    media.extract_frames(&clip.path, &jobs)?;
    Ok(ClipRecord {
        fps_sampled: Some(fps),
        frame_paths: jobs.into_iter().map(|(_, p)| p).collect(),
        ..clip.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct FakeMedia {
        duration_ms: u64,
        decodes: AtomicUsize,
    }

    impl MediaBackend for FakeMedia {
        fn probe(&self, _: &Path) -> Result<ProbeInfo, MediaError> {
            Ok(ProbeInfo { duration_ms: self.duration_ms })
        }

        fn extract_frames(&self, _: &Path, frames: &[(u64, PathBuf)]) -> Result<(), MediaError> {
            for (at, out) in frames {
                self.decodes.fetch_add(1, Ordering::SeqCst);
                std::fs::write(out, at.to_string()).unwrap();
            }
            Ok(())
        }
    }

    fn fake(duration_ms: u64) -> FakeMedia {
        FakeMedia { duration_ms, decodes: AtomicUsize::new(0) }
    }

    #[test]
    fn stamps_at_one_fps() {
        let at: Vec<u64> = uniform_stamps(10_000, 1.0).unwrap().iter().map(|s| s.at_ms).collect();
        assert_eq!(at, (0..10).map(|i| i * 1000).collect::<Vec<_>>());
    }

    #[test]
    fn stamps_at_half_fps() {
        let at: Vec<u64> = uniform_stamps(10_000, 0.5).unwrap().iter().map(|s| s.at_ms).collect();
        assert_eq!(at, vec![0, 2000, 4000, 6000, 8000]);
    }

    #[test]
    fn zero_fps_rejected() {
        assert!(matches!(uniform_stamps(10_000, 0.0), Err(IngestError::InvalidFps(_))));
        assert!(matches!(uniform_stamps(10_000, -1.0), Err(IngestError::InvalidFps(_))));
    }

    #[test]
    fn register_and_sample() {
        let dir = tempfile::tempdir().unwrap();
        let video = dir.path().join("a.mp4");
        std::fs::write(&video, b"not really a video").unwrap();
        let manifest = ClipManifest::open(dir.path().join(ClipManifest::FILE_NAME)).unwrap();
        let media = fake(10_000);

        let clip = register_clip(&manifest, &media, &video, "kitchen-01").unwrap();
        assert_eq!(clip.duration_ms, 10_000);
        assert!(matches!(
            register_clip(&manifest, &media, &video, "kitchen-01"),
            Err(IngestError::DuplicateId(_))
        ));
        let missing = register_clip(&manifest, &media, &dir.path().join("nope.mp4"), "x").unwrap_err();
        assert!(missing.to_string().contains("unreadable file"));

        let frames = dir.path().join("frames");
        let sampled = sample_frames(&clip, 1.0, &media, &frames).unwrap();
        assert_eq!(sampled.frame_paths.len(), 10);
        let again = sample_frames(&clip, 1.0, &media, &frames).unwrap();
        assert_eq!(sampled, again);
        assert_eq!(std::fs::read_dir(frames.join("kitchen-01")).unwrap().count(), 10);

        let coarse = sample_frames(&clip, 0.5, &media, &frames).unwrap();
        assert_eq!(coarse.frame_paths.len(), 5);
        assert_eq!(std::fs::read_dir(frames.join("kitchen-01")).unwrap().count(), 5);
        assert_eq!(
            coarse.frame_stamps().iter().map(|s| s.at_ms).collect::<Vec<_>>(),
            vec![0, 2000, 4000, 6000, 8000]
        );

        manifest.upsert(coarse.clone()).unwrap();
        let reopened = ClipManifest::open(manifest.path()).unwrap();
        assert_eq!(reopened.get("kitchen-01").unwrap(), coarse);
    }

    #[test]
    fn too_few_frames() {
        let clip = ClipRecord {
            clip_id: "short".into(),
            path: "x".into(),
            duration_ms: 1500,
            fps_sampled: None,
            frame_paths: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            sample_frames(&clip, 1.0, &fake(1500), dir.path()),
            Err(IngestError::TooFewFrames { produced: 1, .. })
        ));
    }
}
