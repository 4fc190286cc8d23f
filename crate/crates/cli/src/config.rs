//! Run configuration read from the workspace.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use scentplan_core::harness::{StimulusSet, StudyConfig};
use scentplan_core::ingest::media::CommandMedia;
use scentplan_core::ingest::ClipManifest;
use scentplan_core::planners::{load_plans, ProviderConfig};
use scentplan_core::{load_schema, OdorSchema, Workspace};
use serde::Deserialize;

use crate::GlobalArgs;

pub const PROVIDERS_FILE: &str = "providers.toml";
pub const MEDIA_FILE: &str = "media.toml";
/// Clips in the default rating study when no study file exists.
const STUDY2_DEFAULT_CLIPS: usize = 3;

#[derive(Debug, Deserialize)]
pub struct ProvidersFile {
    /// Stage A (frames → timeline).
    pub vision: ProviderConfig,
    /// Stage B (timeline → plan).
    pub planner: ProviderConfig,
}

pub fn workspace(g: &GlobalArgs) -> anyhow::Result<Workspace> {
    std::fs::create_dir_all(&g.workspace)
        .with_context(|| format!("cannot create workspace {}", g.workspace.display()))?;
    Ok(Workspace::new(&g.workspace))
}

pub fn schema(g: &GlobalArgs) -> anyhow::Result<OdorSchema> {
    load_schema(&g.schema).with_context(|| format!("cannot load schema {}", g.schema))
}

pub fn manifest(ws: &Workspace) -> anyhow::Result<ClipManifest> {
    ClipManifest::open(ws.manifest_path())
        .with_context(|| format!("cannot open clip manifest {}", ws.manifest_path().display()))
}

pub fn providers(path: &Path) -> anyhow::Result<ProvidersFile> {
    let text = std::fs::read_to_string(path).with_context(|| {
        format!(
            "cannot read provider config {} (use --mock for the fixture provider)",
            path.display()
        )
    })?;
    toml::from_str(&text).with_context(|| format!("invalid provider config {}", path.display()))
}

pub fn media(ws: &Workspace) -> anyhow::Result<CommandMedia> {
    let path = ws.root().join(MEDIA_FILE);
    if !path.is_file() {
        return Ok(CommandMedia::default());
    }
    let text = std::fs::read_to_string(&path)?;
    toml::from_str(&text).with_context(|| format!("invalid media config {}", path.display()))
}

/// Study definitions from `studies.json`, or defaults over the registered
/// clips: the ranking study on every clip, the rating study on the first
/// three.
pub fn studies(ws: &Workspace, seed: u64) -> anyhow::Result<Vec<StudyConfig>> {
    let path = ws.studies_path();
    if path.is_file() {
        let text = std::fs::read_to_string(&path)?;
        return serde_json::from_str(&text).with_context(|| format!("invalid study file {}", path.display()));
    }
    let clips: Vec<String> = manifest(ws)?.records().into_iter().map(|c| c.clip_id).collect();
    if clips.is_empty() {
        bail!("no clips registered in {}", ws.manifest_path().display());
    }
    let rated = clips[..clips.len().min(STUDY2_DEFAULT_CLIPS)].to_vec();
    Ok(vec![StudyConfig::study1(clips, seed), StudyConfig::study2(rated, seed)])
}

/// Rendered plan texts and clip files for every clip used by `configs`.
pub fn stimuli(ws: &Workspace, configs: &[StudyConfig]) -> anyhow::Result<StimulusSet> {
    let manifest = manifest(ws)?;
    let clips: BTreeSet<&String> = configs.iter().flat_map(|c| &c.clip_ids).collect();
    let mut set = StimulusSet::default();
    for clip_id in clips {
        for (strategy, plan) in load_plans(ws, clip_id)? {
            set.insert(clip_id, strategy, plan.rendered_text);
        }
        if let Some(record) = manifest.get(clip_id) {
            set.clip_files.insert(clip_id.clone(), record.path);
        }
    }
    Ok(set)
}

pub fn default_providers_path(ws: &Workspace) -> PathBuf {
    ws.root().join(PROVIDERS_FILE)
}
