use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use scentplan_core::demo::FixtureMedia;
use scentplan_core::ingest::media::MediaBackend;
use scentplan_core::ingest::{register_clip, sample_frames, ClipRecord, DEFAULT_FPS};

use crate::{config, GlobalArgs};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Video files; each clip id is the file stem.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Frame sampling rate.
    #[arg(long, default_value_t = DEFAULT_FPS, value_parser = crate::positive_fps)]
    pub fps: f64,
    /// Read placeholder clip files instead of invoking the media tools.
    #[arg(long)]
    pub fixture_media: bool,
}

pub fn run(g: &GlobalArgs, args: IngestArgs) -> anyhow::Result<()> {
    let ws = config::workspace(g)?;
    let manifest = config::manifest(&ws)?;
    let command_media;
    let media: &dyn MediaBackend = if args.fixture_media {
        &FixtureMedia
    } else {
        command_media = config::media(&ws)?;
        &command_media
    };
    for path in &args.paths {
        let clip = ingest_one(&manifest, media, path, args.fps, &ws.frames_dir())?;
        println!("{}: {} frames ({} ms)", clip.clip_id, clip.frame_paths.len(), clip.duration_ms);
    }
    println!("{} clip(s) in {}", manifest.len(), ws.manifest_path().display());
    Ok(())
}

/// Registers (or, for an unchanged path, re-samples) one clip.
pub fn ingest_one(
    manifest: &scentplan_core::ingest::ClipManifest,
    media: &dyn MediaBackend,
    path: &std::path::Path,
    fps: f64,
    frames_dir: &std::path::Path,
) -> anyhow::Result<ClipRecord> {
    let clip_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .with_context(|| format!("cannot derive a clip id from {}", path.display()))?;
    let record = match manifest.get(clip_id) {
        Some(existing) if existing.path == path => existing,
        _ => register_clip(manifest, media, path, clip_id)
            .with_context(|| format!("cannot register {}", path.display()))?,
    };
    let sampled = sample_frames(&record, fps, media, frames_dir)
        .with_context(|| format!("cannot sample frames from {}", path.display()))?;
    manifest.upsert(sampled.clone())?;
    Ok(sampled)
}
