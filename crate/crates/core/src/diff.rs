//! Descriptor-level comparison of two plans for the same clip.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::plan::ScentPlan;

#[derive(Debug, thiserror::Error)]
#[error("cannot diff plans for different clips (\"{0}\" vs \"{1}\")")]
pub struct DiffClipMismatch(pub String, pub String);

/// Timing and intensity change of a descriptor present in both plans,
/// expressed as `b - a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorDelta {
    pub descriptor_id: String,
    pub onset_delta_ms: i64,
    pub offset_delta_ms: i64,
    pub intensity_delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanDiff {
    pub only_in_a: Vec<String>,
    pub only_in_b: Vec<String>,
    pub changed: Vec<DescriptorDelta>,
}

impl PlanDiff {
    pub fn is_empty(&self) -> bool {
        self.only_in_a.is_empty() && self.only_in_b.is_empty() && self.changed.is_empty()
    }
}

impl fmt::Display for PlanDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "no differences");
        }
        for id in &self.only_in_a {
            writeln!(f, "{id} only in a")?;
        }
        for id in &self.only_in_b {
            writeln!(f, "{id} only in b")?;
        }
        for d in &self.changed {
            writeln!(
                f,
                "{}: onset {:+}ms, offset {:+}ms, intensity {:+.2}",
                d.descriptor_id, d.onset_delta_ms, d.offset_delta_ms, d.intensity_delta
            )?;
        }
        Ok(())
    }
}

/// Per descriptor: earliest onset, latest offset, peak intensity.
fn footprint(plan: &ScentPlan) -> BTreeMap<&str, (u64, u64, f64)> {
    let mut map: BTreeMap<&str, (u64, u64, f64)> = BTreeMap::new();
    for ev in &plan.events {
        map.entry(ev.descriptor_id.as_str())
            .and_modify(|(on, off, peak)| {
                *on = (*on).min(ev.onset_ms);
                *off = (*off).max(ev.offset_ms);
                *peak = peak.max(ev.intensity);
            })
            .or_insert((ev.onset_ms, ev.offset_ms, ev.intensity));
    }
    map
}

pub fn diff_plans(a: &ScentPlan, b: &ScentPlan) -> Result<PlanDiff, DiffClipMismatch> {
    if a.clip_id != b.clip_id {
        return Err(DiffClipMismatch(a.clip_id.clone(), b.clip_id.clone()));
    }
    let fa = footprint(a);
    let fb = footprint(b);
    let mut diff = PlanDiff::default();
    for (id, &(on_a, off_a, int_a)) in &fa {
        match fb.get(id) {
            None => diff.only_in_a.push(id.to_string()),
            Some(&(on_b, off_b, int_b)) => {
                let delta = DescriptorDelta {
                    descriptor_id: id.to_string(),
                    onset_delta_ms: on_b as i64 - on_a as i64,
                    offset_delta_ms: off_b as i64 - off_a as i64,
                    intensity_delta: int_b - int_a,
                };
                if delta.onset_delta_ms != 0
                    || delta.offset_delta_ms != 0
                    || delta.intensity_delta != 0.0
                {
                    diff.changed.push(delta);
                }
            }
        }
    }
    diff.only_in_b = fb
        .keys()
        .filter(|id| !fa.contains_key(*id))
        .map(|id| id.to_string())
        .collect();
    Ok(diff)
}
