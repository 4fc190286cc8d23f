//! Extraction of the structured document from a model response.

use serde_json::Value;

/// Returns the first fenced code block (```json or bare ```), or the whole
/// text when it is itself a JSON object.
pub fn extract_block(text: &str) -> Option<&str> {
    let mut rest = text;
    while let Some(start) = rest.find("```") {
        let after = &rest[start + 3..];
        let body_start = after.find('\n').map(|i| i + 1)?;
        let info = after[..body_start].trim();
        let body = &after[body_start..];
        let end = body.find("```")?;
        if info.is_empty() || info.eq_ignore_ascii_case("json") {
            return Some(body[..end].trim());
        }
        rest = &body[end + 3..];
    }
    let trimmed = text.trim();
    (trimmed.starts_with('{') && trimmed.ends_with('}')).then_some(trimmed)
}

pub fn parse_document(text: &str) -> Result<Value, String> {
    let block = extract_block(text).ok_or_else(|| "no fenced JSON block found".to_string())?;
    let value: Value = serde_json::from_str(block).map_err(|e| format!("JSON does not parse: {e}"))?;
    if !value.is_object() {
        return Err("the JSON document must be an object".into());
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenced_json() {
        let text = "Here you go:\n```json\n{\"a\": 1}\n```\nthanks";
        assert_eq!(extract_block(text), Some("{\"a\": 1}"));
    }

    #[test]
    fn first_block_wins_and_other_languages_skipped() {
        let text = "```python\nprint(1)\n```\n```\n{\"b\": 2}\n```\n```json\n{\"c\": 3}\n```";
        assert_eq!(extract_block(text), Some("{\"b\": 2}"));
    }

    #[test]
    fn bare_object() {
        assert_eq!(extract_block("  {\"a\":1}\n"), Some("{\"a\":1}"));
    }

    #[test]
    fn malformed() {
        assert!(parse_document("I cannot help with that.").is_err());
        assert!(parse_document("```json\n{\"a\": \n```").is_err());
        assert!(parse_document("```json\n[1,2]\n```").is_err());
    }
}
