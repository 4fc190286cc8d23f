//! Versioned prompt templates. Placeholders are written `{{name}}`.

pub const PROMPT_VERSION: &str = "v1";

pub const STAGE_A: &str = include_str!("../../prompts/stage_a.v1.txt");
pub const STAGE_B: &str = include_str!("../../prompts/stage_b.v1.txt");
pub const REPAIR: &str = include_str!("../../prompts/repair.v1.txt");

pub fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (name, value) in vars {
        out = out.replace(&format!("{{{{{name}}}}}"), value);
    }
    out
}
