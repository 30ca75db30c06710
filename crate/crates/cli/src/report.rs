use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Largest absolute coefficient of the residual, where one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes iff `residual ≤ tol`.
    pub fn residual(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        let status = if residual <= tol { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, residual: Some(residual), detail: None }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, residual: None, detail: None }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        let h = Sha256::digest(bytes);
        InputDigest { path: path.into(), sha256: h.iter().map(|b| format!("{b:02x}")).collect() }
    }
}

/// Machine-readable record of one command run. Apart from `timing_ms`,
/// identical inputs and flags give identical reports.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub flags: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<serde_json::Value>,
    pub passed: bool,
    pub timing_ms: f64,
}

pub struct Outcome {
    pub checks: Vec<Check>,
    pub output: serde_json::Value,
}

impl RunReport {
    pub fn finish(
        command: &str,
        flags: serde_json::Value,
        inputs: Vec<InputDigest>,
        result: Result<Outcome, String>,
        start: Instant,
    ) -> Self {
        let (checks, output, error) = match result {
            Ok(o) => (o.checks, Some(o.output), None),
            Err(e) => (Vec::new(), None, Some(e)),
        };
        let passed = error.is_none() && checks.iter().all(|c| c.status == Status::Pass);
        RunReport {
            command: command.into(),
            flags,
            inputs,
            checks,
            error,
            output,
            passed,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}
