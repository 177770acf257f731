//! Machine-readable check reports.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Only from one-sided membership tests.
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub check: String,
    pub verdict: Verdict,
    /// One-line human summary.
    pub summary: String,
    pub details: Value,
    pub runtime_ms: u128,
}

impl Report {
    pub fn new(check: &str, verdict: Verdict, summary: impl Into<String>, details: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            check: check.to_string(),
            verdict,
            summary: summary.into(),
            details,
            runtime_ms: 0,
        }
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn line(&self) -> String {
        format!("[{}] {}: {} ({} ms)", self.verdict.label(), self.check, self.summary, self.runtime_ms)
    }
}

/// Serializes for the `details` field; every report payload is plain data.
pub fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report payloads serialize")
}
