//! Machine-readable check reports: each verification run produces one record
//! with a stable identifier, the worst observed slack (negative means a
//! violated inequality), a verdict, and the seed needed to replay it.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Outcome of one verification: the check holds iff `worst_slack` is not
/// below the negated tolerance used at construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    /// Human-readable statement of the inequality or fact being checked.
    pub anchor: String,
    pub instances: usize,
    /// Smallest margin observed across instances; negative means violation.
    pub worst_slack: f64,
    pub verdict: Verdict,
    pub seed: u64,
    pub detail: String,
}

impl CheckReport {
    /// Build a report whose verdict is `Fail` exactly when the worst slack
    /// drops below `-tolerance`.
    pub fn from_slack(
        id: impl Into<String>,
        anchor: impl Into<String>,
        instances: usize,
        worst_slack: f64,
        tolerance: f64,
        seed: u64,
        detail: impl Into<String>,
    ) -> Self {
        let verdict = if worst_slack < -tolerance {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        CheckReport {
            id: id.into(),
            anchor: anchor.into(),
            instances,
            worst_slack,
            verdict,
            seed,
            detail: detail.into(),
        }
    }

    pub fn inconclusive(
        id: impl Into<String>,
        anchor: impl Into<String>,
        instances: usize,
        seed: u64,
        detail: impl Into<String>,
    ) -> Self {
        CheckReport {
            id: id.into(),
            anchor: anchor.into(),
            instances,
            worst_slack: 0.0,
            verdict: Verdict::Inconclusive,
            seed,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// One fixed-format console line per check.
    pub fn table_row(&self) -> String {
        format!(
            "{:<28} {:<12} instances={:<4} worst_slack={:+.6e}  {}",
            self.id, self.verdict, self.instances, self.worst_slack, self.anchor
        )
    }

    /// Deterministic JSON rendering (field order fixed, floats at 12
    /// significant digits).
    pub fn to_json(&self) -> String {
        format!(
            "{{\"id\":{},\"anchor\":{},\"instances\":{},\"worst_slack\":{},\"verdict\":\"{}\",\"seed\":{},\"detail\":{}}}",
            serde_json::json!(self.id),
            serde_json::json!(self.anchor),
            self.instances,
            crate::io::fmt_rate(self.worst_slack),
            self.verdict,
            self.seed,
            serde_json::json!(self.detail)
        )
    }
}

/// Render a suite of reports as one deterministic JSON document, ordered by
/// check id.
pub fn suite_to_json(reports: &[CheckReport]) -> String {
    let mut sorted: Vec<&CheckReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let body: Vec<String> = sorted.iter().map(|r| r.to_json()).collect();
    format!("{{\"schema\":1,\"checks\":[{}]}}", body.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_from_slack() {
        let pass = CheckReport::from_slack("a", "x", 1, -1e-9, 1e-6, 0, "");
        assert_eq!(pass.verdict, Verdict::Pass);
        let fail = CheckReport::from_slack("a", "x", 1, -1e-3, 1e-6, 0, "");
        assert_eq!(fail.verdict, Verdict::Fail);
        assert!(!fail.passed());
    }

    #[test]
    fn suite_json_is_sorted_and_deterministic() {
        let r1 = CheckReport::from_slack("b-check", "x", 1, 0.5, 1e-6, 3, "");
        let r2 = CheckReport::from_slack("a-check", "y", 2, 0.1, 1e-6, 3, "");
        let j1 = suite_to_json(&[r1.clone(), r2.clone()]);
        let j2 = suite_to_json(&[r2, r1]);
        assert_eq!(j1, j2);
        assert!(j1.find("a-check").unwrap() < j1.find("b-check").unwrap());
    }
}
