//! Clip manifest: one JSON record per line. Writers serialize through a
//! mutex; every update rewrites the file through a temporary sibling.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{ClipRecord, IngestError};

#[derive(Debug)]
pub struct ClipManifest {
    path: PathBuf,
    records: Mutex<BTreeMap<String, ClipRecord>>,
}

impl ClipManifest {
    pub const FILE_NAME: &'static str = "clips.jsonl";

    /// Opens the manifest at `path`, creating an empty one if absent.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, IngestError> {
        let path = path.into();
        let mut records = BTreeMap::new();
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| IngestError::Manifest(e.to_string()))?;
            for (lineno, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let record: ClipRecord = serde_json::from_str(line).map_err(|e| {
                    IngestError::Manifest(format!("{}:{}: {e}", path.display(), lineno + 1))
                })?;
                records.insert(record.clip_id.clone(), record);
            }
        }
        Ok(Self {
            path,
            records: Mutex::new(records),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, clip_id: &str) -> Option<ClipRecord> {
        self.records.lock().unwrap().get(clip_id).cloned()
    }

    pub fn contains(&self, clip_id: &str) -> bool {
        self.records.lock().unwrap().contains_key(clip_id)
    }

    /// Records ordered by clip id.
    pub fn records(&self) -> Vec<ClipRecord> {
        self.records.lock().unwrap().values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.records.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert_new(&self, record: ClipRecord) -> Result<(), IngestError> {
        let mut records = self.records.lock().unwrap();
        if records.contains_key(&record.clip_id) {
            return Err(IngestError::DuplicateId(record.clip_id));
        }
        records.insert(record.clip_id.clone(), record);
        self.flush(&records)
    }

    pub fn upsert(&self, record: ClipRecord) -> Result<(), IngestError> {
        let mut records = self.records.lock().unwrap();
        records.insert(record.clip_id.clone(), record);
        self.flush(&records)
    }

    fn flush(&self, records: &BTreeMap<String, ClipRecord>) -> Result<(), IngestError> {
        let err = |e: std::io::Error| IngestError::Manifest(format!("{}: {e}", self.path.display()));
        if let Some(parent) = self.path.parent() {
            std::fs::create_dir_all(parent).map_err(err)?;
        }
        let tmp = self.path.with_extension("jsonl.tmp");
        let mut file = std::fs::File::create(&tmp).map_err(err)?;
        for record in records.values() {
            let line = serde_json::to_string(record).expect("clip records serialize");
            writeln!(file, "{line}").map_err(err)?;
        }
        file.sync_all().map_err(err)?;
        std::fs::rename(&tmp, &self.path).map_err(err)
    }
}
