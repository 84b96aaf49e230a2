//! Report types shared by `verify` and `verify-range`.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    /// Exact verdict in favour of the claim.
    Verified,
    /// Exact certificate of an absence statement.
    Proved,
    /// Finite search found nothing; see the disclaimer.
    Bounded,
    Failed,
    /// A resource limit stopped the check.
    Capped,
}

impl CheckStatus {
    pub fn passes(self) -> bool {
        matches!(self, Self::Verified | Self::Proved | Self::Bounded)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceInfo {
    pub p: i64,
    pub m: i64,
    pub g: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub numbers: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_bounds: Option<BTreeMap<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disclaimer: Option<String>,
    /// Disagreements with printed values; informational only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paper_mismatches: Vec<String>,
}

impl Check {
    pub fn new(name: &str, status: CheckStatus) -> Self {
        Self {
            name: name.into(),
            status,
            numbers: BTreeMap::new(),
            search_bounds: None,
            disclaimer: None,
            paper_mismatches: Vec::new(),
        }
    }

    pub fn number(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.numbers.insert(key.into(), value.into());
        self
    }

    pub fn bound(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.search_bounds
            .get_or_insert_with(BTreeMap::new)
            .insert(key.into(), value.into());
        self
    }

    pub fn mismatch(mut self, note: String) -> Self {
        self.paper_mismatches.push(note);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub number: u8,
    pub title: String,
    pub cells: usize,
    pub paper_mismatches: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub surface: SurfaceInfo,
    pub checks: Vec<Check>,
    pub tables: Vec<TableSummary>,
    pub figures: Vec<String>,
    /// Wall-clock time per check, kept apart from the checks so that the
    /// rest of the report is reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<BTreeMap<String, u64>>,
}

impl Report {
    pub fn outcome(&self) -> Outcome {
        if self.checks.iter().any(|c| c.status == CheckStatus::Capped) {
            Outcome::Capped
        } else if self.checks.iter().all(|c| c.status.passes()) {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let x = &self.surface;
        let _ = writeln!(s, "# k3wall {} report: p = {}, m = {}, g = {}\n", self.tool_version, x.p, x.m, x.g);
        let _ = writeln!(s, "Outcome: {:?}\n", self.outcome());
        let _ = writeln!(s, "| check | status | numbers |");
        let _ = writeln!(s, "|---|---|---|");
        for c in &self.checks {
            let nums: Vec<String> = c.numbers.iter().map(|(k, v)| format!("{k} = {}", plain(v))).collect();
            let _ = writeln!(s, "| {} | {:?} | {} |", c.name, c.status, nums.join(", "));
        }
        for c in &self.checks {
            if let Some(b) = &c.search_bounds {
                let bs: Vec<String> = b.iter().map(|(k, v)| format!("{k} = {}", plain(v))).collect();
                let _ = writeln!(s, "\n{}: searched {}", c.name, bs.join(", "));
            }
            if let Some(d) = &c.disclaimer {
                let _ = writeln!(s, "\n{}: {d}", c.name);
            }
            for note in &c.paper_mismatches {
                let _ = writeln!(s, "\n{}: paper mismatch: {note}", c.name);
            }
        }
        for t in &self.tables {
            let _ = writeln!(s, "\n## Table {}: {} ({} cells)", t.number, t.title, t.cells);
            for note in &t.paper_mismatches {
                let _ = writeln!(s, "- paper mismatch: {note}");
            }
        }
        if let Some(rt) = &self.runtime_ms {
            let _ = writeln!(s, "\n## Runtimes (ms)\n");
            for (k, v) in rt {
                let _ = writeln!(s, "- {k}: {v}");
            }
        }
        s
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Fail,
    Capped,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::Capped => 2,
        }
    }
}
