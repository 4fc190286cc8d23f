//! The fixed odor schema: odor families, their descriptors, and the
//! visual-label to descriptor mapping table used by the baseline planners.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Source argument accepted by [`load_schema`] to select the shipped schema.
pub const DEFAULT_SCHEMA_SENTINEL: &str = "default";

const DEFAULT_SCHEMA_JSON: &str = include_str!("../data/default_schema.json");

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("schema document does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read schema file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate descriptor id \"{0}\"")]
    DuplicateDescriptor(String),
    #[error("duplicate family id \"{0}\"")]
    DuplicateFamily(String),
    #[error("dangling mapping target \"{0}\"")]
    DanglingMappingTarget(String),
    #[error("empty schema: {0}")]
    Empty(String),
    #[error("invalid mapping rule \"{pattern}\": {reason}")]
    InvalidRule { pattern: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub descriptor_id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdorFamily {
    pub family_id: String,
    pub name: String,
    pub descriptors: Vec<Descriptor>,
}

/// Maps visual labels onto a descriptor.
///
/// The pattern is a whitespace-separated token sequence matched
/// case-insensitively against the tokens of a label. A token ending in `*`
/// matches any label token with that prefix. The pattern matches when its
/// tokens occur contiguously in the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingRule {
    pub visual_label_pattern: String,
    pub descriptor_id: String,
    pub default_intensity: f64,
}

impl MappingRule {
    pub fn matches(&self, label: &str) -> bool {
        let pattern: Vec<String> = self
            .visual_label_pattern
            .split_whitespace()
            .map(str::to_lowercase)
            .collect();
        if pattern.is_empty() {
            return false;
        }
        let tokens = tokenize(label);
        tokens.windows(pattern.len()).any(|window| {
            window
                .iter()
                .zip(&pattern)
                .all(|(tok, pat)| match pat.strip_suffix('*') {
                    Some(prefix) => tok.starts_with(prefix),
                    None => tok == pat,
                })
        })
    }

    fn check(&self) -> Result<(), SchemaError> {
        let invalid = |reason: &str| SchemaError::InvalidRule {
            pattern: self.visual_label_pattern.clone(),
            reason: reason.to_string(),
        };
        let tokens: Vec<&str> = self.visual_label_pattern.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(invalid("pattern is empty"));
        }
        for tok in tokens {
            let stem = tok.strip_suffix('*').unwrap_or(tok);
            if stem.is_empty() || !stem.chars().all(char::is_alphanumeric) {
                return Err(invalid("tokens must be alphanumeric with an optional trailing '*'"));
            }
        }
        if !(0.0..=1.0).contains(&self.default_intensity) {
            return Err(invalid("default_intensity outside [0, 1]"));
        }
        Ok(())
    }
}

/// Lowercased alphanumeric tokens of a label.
pub fn tokenize(label: &str) -> Vec<String> {
    label
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdorSchema {
    pub schema_id: String,
    pub families: Vec<OdorFamily>,
    pub mapping: Vec<MappingRule>,
}

impl OdorSchema {
    /// The schema shipped with the crate (12 families, 48 descriptors).
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_SCHEMA_JSON).expect("bundled schema is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let schema: OdorSchema = serde_json::from_str(text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_canonical_json(self)
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.families.is_empty() {
            return Err(SchemaError::Empty("no odor families".into()));
        }
        let mut family_ids = BTreeSet::new();
        let mut descriptor_ids = BTreeSet::new();
        for family in &self.families {
            if !family_ids.insert(family.family_id.as_str()) {
                return Err(SchemaError::DuplicateFamily(family.family_id.clone()));
            }
            if family.descriptors.is_empty() {
                return Err(SchemaError::Empty(format!(
                    "family \"{}\" has no descriptors",
                    family.family_id
                )));
            }
            for d in &family.descriptors {
                if !descriptor_ids.insert(d.descriptor_id.as_str()) {
                    return Err(SchemaError::DuplicateDescriptor(d.descriptor_id.clone()));
                }
            }
        }
        for rule in &self.mapping {
            rule.check()?;
            if !descriptor_ids.contains(rule.descriptor_id.as_str()) {
                return Err(SchemaError::DanglingMappingTarget(rule.descriptor_id.clone()));
            }
        }
        Ok(())
    }

    pub fn descriptor(&self, descriptor_id: &str) -> Option<&Descriptor> {
        self.descriptors().find(|d| d.descriptor_id == descriptor_id)
    }

    pub fn contains(&self, descriptor_id: &str) -> bool {
        self.descriptor(descriptor_id).is_some()
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &Descriptor> {
        self.families.iter().flat_map(|f| f.descriptors.iter())
    }

    pub fn descriptor_count(&self) -> usize {
        self.families.iter().map(|f| f.descriptors.len()).sum()
    }

    /// First mapping rule (in table order) whose pattern matches `label`.
    pub fn lookup(&self, label: &str) -> Option<&MappingRule> {
        self.mapping.iter().find(|rule| rule.matches(label))
    }

    /// Descriptor id to display name, for rendering.
    pub fn names(&self) -> BTreeMap<&str, &str> {
        self.descriptors()
            .map(|d| (d.descriptor_id.as_str(), d.name.as_str()))
            .collect()
    }
}

impl fmt::Display for OdorSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for family in &self.families {
            writeln!(f, "{} ({}):", family.name, family.family_id)?;
            for d in &family.descriptors {
                writeln!(f, "  {}  {}", d.descriptor_id, d.name)?;
            }
        }
        Ok(())
    }
}

/// Loads a schema from a JSON file, or the built-in one for `"default"`.
pub fn load_schema(source: &str) -> Result<OdorSchema, SchemaError> {
    if source == DEFAULT_SCHEMA_SENTINEL {
        return Ok(OdorSchema::builtin());
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.display().to_string(),
        source,
    })?;
    OdorSchema::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{"schema_id":"tiny","families":[{"family_id":"citrus","name":"Citrus",
            "descriptors":[{"descriptor_id":"citrus.yuzu","name":"yuzu"}]}],"mapping":[]}"#
    }

    #[test]
    fn default_schema_counts() {
        let schema = load_schema("default").unwrap();
        assert_eq!(schema.families.len(), 12);
        assert_eq!(schema.descriptor_count(), 48);
        let ids: Vec<&str> = schema.families.iter().map(|f| f.family_id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "citrus",
                "floral",
                "herbal-green",
                "fruity",
                "sweet-gourmand",
                "roasted-smoky",
                "woody",
                "earthy",
                "marine",
                "spicy",
                "dairy-savory",
                "clean-chemical"
            ]
        );
        assert!(schema.families.iter().all(|f| f.descriptors.len() == 4));
    }

    #[test]
    fn minimal_schema_is_valid() {
        let schema = OdorSchema::from_json(minimal()).unwrap();
        assert_eq!(schema.descriptor_count(), 1);
        assert!(schema.mapping.is_empty());
    }

    #[test]
    fn dangling_target_reported() {
        let doc = minimal().replace(
            r#""mapping":[]"#,
            r#""mapping":[{"visual_label_pattern":"yuzu","descriptor_id":"citrus.yuzu2","default_intensity":0.5}]"#,
        );
        let err = OdorSchema::from_json(&doc).unwrap_err();
        assert!(matches!(err, SchemaError::DanglingMappingTarget(ref id) if id == "citrus.yuzu2"));
        assert!(err.to_string().contains("dangling mapping target"));
        assert!(err.to_string().contains("citrus.yuzu2"));
    }

    #[test]
    fn duplicate_descriptor_reported() {
        let doc = r#"{"schema_id":"dup","families":[
            {"family_id":"a","name":"A","descriptors":[{"descriptor_id":"x","name":"x"}]},
            {"family_id":"b","name":"B","descriptors":[{"descriptor_id":"x","name":"x again"}]}],"mapping":[]}"#;
        let err = OdorSchema::from_json(doc).unwrap_err();
        assert!(matches!(err, SchemaError::DuplicateDescriptor(ref id) if id == "x"));
    }

    #[test]
    fn empty_schema_rejected() {
        let err = OdorSchema::from_json(r#"{"schema_id":"e","families":[],"mapping":[]}"#)
            .unwrap_err();
        assert!(matches!(err, SchemaError::Empty(_)));
        let err = OdorSchema::from_json(
            r#"{"schema_id":"e","families":[{"family_id":"a","name":"A","descriptors":[]}],"mapping":[]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("\"a\""));
    }

    #[test]
    fn bad_intensity_rejected() {
        let doc = minimal().replace(
            r#""mapping":[]"#,
            r#""mapping":[{"visual_label_pattern":"yuzu","descriptor_id":"citrus.yuzu","default_intensity":1.5}]"#,
        );
        assert!(matches!(
            OdorSchema::from_json(&doc),
            Err(SchemaError::InvalidRule { .. })
        ));
    }

    #[test]
    fn pattern_matching() {
        let rule = |p: &str| MappingRule {
            visual_label_pattern: p.into(),
            descriptor_id: "x".into(),
            default_intensity: 0.5,
        };
        assert!(rule("lemon*").matches("Sliced Lemons"));
        assert!(rule("lemon").matches("lemon half"));
        assert!(!rule("lemon").matches("lemonade"));
        assert!(rule("christmas tree").matches("decorated Christmas-tree"));
        assert!(!rule("christmas tree").matches("tree by christmas"));
        assert!(!rule("pan").matches("panna cotta"));
    }

    #[test]
    fn default_lookup_table() {
        let schema = OdorSchema::builtin();
        assert_eq!(schema.lookup("lemon").unwrap().descriptor_id, "citrus.lemon");
        assert_eq!(
            schema.lookup("rosemary sprig").unwrap().descriptor_id,
            "herbal-green.rosemary"
        );
        assert_eq!(schema.lookup("red roses").unwrap().descriptor_id, "floral.rose");
        assert_eq!(
            schema.lookup("stainless steel bowl").unwrap().descriptor_id,
            "clean-chemical.metallic"
        );
        for unmapped in ["cutting board", "air", "lighting", "gloves", "container", "stone"] {
            assert!(schema.lookup(unmapped).is_none(), "{unmapped} should be unmapped");
        }
    }
}
