//! On-disk layout of a run workspace.

use std::path::{Path, PathBuf};

use crate::io::{PLAN_SUFFIX, TIMELINE_SUFFIX, TRANSCRIPT_SUFFIX};
use crate::plan::Strategy;
use crate::planners::Stage;

#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join(crate::ingest::ClipManifest::FILE_NAME)
    }

    pub fn frames_dir(&self) -> PathBuf {
        self.root.join("frames")
    }

    pub fn timelines_dir(&self) -> PathBuf {
        self.root.join("timelines")
    }

    pub fn plans_dir(&self) -> PathBuf {
        self.root.join("plans")
    }

    pub fn transcripts_dir(&self) -> PathBuf {
        self.root.join("transcripts")
    }

    pub fn mock_dir(&self) -> PathBuf {
        self.root.join("mock")
    }

    pub fn harness_dir(&self) -> PathBuf {
        self.root.join("harness")
    }

    pub fn exports_dir(&self) -> PathBuf {
        self.root.join("exports")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.root.join("reports")
    }

    pub fn studies_path(&self) -> PathBuf {
        self.root.join("studies.json")
    }

    pub fn timeline_path(&self, clip_id: &str) -> PathBuf {
        self.timelines_dir().join(format!("{clip_id}{TIMELINE_SUFFIX}"))
    }

    pub fn plan_path(&self, clip_id: &str, strategy: Strategy) -> PathBuf {
        self.plans_dir().join(format!("{clip_id}.{strategy}{PLAN_SUFFIX}"))
    }

    pub fn transcript_path(&self, clip_id: &str, stage: Stage) -> PathBuf {
        self.transcripts_dir()
            .join(format!("{clip_id}.{stage}{TRANSCRIPT_SUFFIX}"))
    }

    pub fn failures_path(&self) -> PathBuf {
        self.plans_dir().join("failures.json")
    }
}
