//! Report document and plain-text tables.

use std::fmt::Write as _;

use scentplan_core::Strategy;
use serde::{Deserialize, Serialize};

use crate::study1::Study1Report;
use crate::study2::Study2Report;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study1: Option<Study1Report>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study2: Option<Study2Report>,
}

/// Fixed decimals, ties rounded away from zero.
fn fixed(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let rounded = (x * scale).round() / scale;
    format!("{rounded:.decimals$}")
}

/// Three decimal places.
pub fn fmt3(x: f64) -> String {
    let s = fixed(x, 3);
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Three significant figures; scientific notation below 1e-4.
pub fn format_p(p: f64) -> String {
    if p == 0.0 {
        return "0".into();
    }
    if p < 1e-4 {
        return format!("{p:.2e}");
    }
    let mut decimals = (2 - p.log10().floor() as i32).max(0) as usize;
    let s = fixed(p, decimals);
    // rounding may carry into a new leading digit (0.09996 -> 0.1000)
    let reparsed: f64 = s.parse().expect("formatted float");
    if reparsed > 0.0 && reparsed.log10().floor() > p.log10().floor() && decimals > 0 {
        decimals -= 1;
        return fixed(p, decimals);
    }
    s
}

fn ci(low: f64, high: f64) -> String {
    format!("[{}, {}]", fmt3(low), fmt3(high))
}

pub fn construct_label(construct_id: &str) -> String {
    match construct_id {
        "immersion" => "Immersion".into(),
        "distraction" => "Distraction".into(),
        "coherence" => "Coherence".into(),
        "easy_to_imagine" => "Easy to Imagine".into(),
        other => other.to_string(),
    }
}

fn pair_label(a: Strategy, b: Strategy) -> String {
    format!("{} vs {}", a.display_name(), b.display_name())
}

/// Left-aligned first column, right-aligned numbers, dashed rule under the
/// header.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let width = |i: usize| {
        rows.iter()
            .map(|r| r[i].chars().count())
            .chain(std::iter::once(headers[i].chars().count()))
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..headers.len()).map(width).collect();
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, cell) in cells.iter().enumerate() {
            let pad = widths[i] - cell.chars().count();
            if i > 0 {
                out.push_str("  ");
            }
            if i == 0 {
                out.push_str(cell);
                out.push_str(&" ".repeat(pad));
            } else {
                out.push_str(&" ".repeat(pad));
                out.push_str(cell);
            }
        }
        out.trim_end().to_string()
    };
    let mut out = line(headers.to_vec());
    out.push('\n');
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

impl Study1Report {
    pub fn table1(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .conditions
            .iter()
            .map(|c| {
                vec![
                    c.condition.display_name().to_string(),
                    fmt3(c.mean_rank),
                    ci(c.ci_low, c.ci_high),
                    fmt3(c.rank1_rate),
                    ci(c.rank1_ci_low, c.rank1_ci_high),
                ]
            })
            .collect();
        table(&["Condition", "Mean Rank", "95% CI", "Rank~1 Rate", "95% CI"], &rows)
    }

    pub fn table2(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .pairwise
            .iter()
            .map(|r| {
                vec![
                    pair_label(r.a, r.b),
                    format!("{:.1}", r.test.statistic),
                    format_p(r.test.p),
                    format_p(r.test.p_holm.unwrap_or(r.test.p)),
                ]
            })
            .collect();
        table(&["Comparison", "W", "p", "p_Holm"], &rows)
    }

    pub fn friedman_line(&self) -> String {
        format!(
            "Friedman χ²({}) = {:.2}, p = {}, n = {}",
            self.conditions.len().saturating_sub(1),
            self.friedman.statistic,
            format_p(self.friedman.p),
            self.friedman.n_effective
        )
    }
}

impl Study2Report {
    pub fn table3(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .constructs
            .iter()
            .map(|c| {
                vec![
                    construct_label(&c.construct_id),
                    fmt3(c.delta_mean),
                    ci(c.ci_low, c.ci_high),
                    fmt3(c.preference_rate),
                    ci(c.pref_ci_low, c.pref_ci_high),
                    format!("{:.1}", c.test.statistic),
                    format_p(c.test.p),
                    format_p(c.test.p_holm.unwrap_or(c.test.p)),
                ]
            })
            .collect();
        table(
            &["Construct", "ΔMean", "95% CI", "Preference Rate", "95% CI", "W", "p", "p_Holm"],
            &rows,
        )
    }
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(s1) = &self.study1 {
            let _ = writeln!(
                out,
                "Study 1: aggregated rankings ({} participants, {} trials)\n",
                s1.n_participants, s1.n_trials
            );
            out.push_str(&s1.table1());
            let _ = writeln!(out, "\n{}\n", s1.friedman_line());
            out.push_str(&s1.table2());
        }
        if let Some(s2) = &self.study2 {
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(
                out,
                "Study 2: System vs {} ({} participants)\n",
                s2.baseline.display_name(),
                s2.n_participants
            );
            out.push_str(&s2.table3());
            out.push_str("\nFor distraction, Δ = Baseline − System.\n");
        }
        out
    }
}
