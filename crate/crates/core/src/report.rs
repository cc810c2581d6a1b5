//! Structured experiment records shared by every subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Result;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Observed,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Observed => "OBSERVED",
        })
    }
}

/// One checked (or merely recorded) property.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub invariant: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub tool_version: String,
    pub experiment: String,
    pub config: Map<String, Value>,
    pub results: Map<String, Value>,
    pub verdicts: Vec<Verdict>,
    pub artifacts: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: experiment.into(),
            config: Map::new(),
            results: Map::new(),
            verdicts: Vec::new(),
            artifacts: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.config.insert(key.to_string(), to_value(value));
        self
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.results.insert(key.to_string(), to_value(value));
        self
    }

    pub fn verdict(&mut self, invariant: &str, status: Status, detail: impl Into<String>) -> &mut Self {
        self.verdicts.push(Verdict { invariant: invariant.to_string(), status, detail: detail.into() });
        self
    }

    pub fn check(&mut self, invariant: &str, ok: bool, detail: impl Into<String>) -> &mut Self {
        self.verdict(invariant, Status::from_bool(ok), detail)
    }

    pub fn observe(&mut self, invariant: &str, detail: impl Into<String>) -> &mut Self {
        self.verdict(invariant, Status::Observed, detail)
    }

    /// True when no verdict is FAIL.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }

    pub fn verdict_status(&self, invariant: &str) -> Option<Status> {
        self.verdicts.iter().find(|v| v.invariant == invariant).map(|v| v.status)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn to_value(value: impl Serialize) -> Value {
    // Non-finite floats serialize as null rather than failing.
    serde_json::to_value(value).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_fail_aggregation() {
        let mut r = ExperimentReport::new("demo");
        r.check("a", true, "ok").observe("b", "seen");
        assert!(r.passed());
        r.check("c", false, "broken");
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.verdict_status("b"), Some(Status::Observed));
    }

    #[test]
    fn statuses_serialize_uppercase() {
        let mut r = ExperimentReport::new("demo");
        r.check("x", true, "");
        let json = r.to_json().unwrap();
        assert!(json.contains("\"PASS\""));
    }
}
