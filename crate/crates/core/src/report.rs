//! Machine-readable pass/fail reports emitted by the witness verifiers.

use serde::{Deserialize, Serialize};

/// One named condition with its outcome and, on failure, a human-readable
/// violating witness (a point, pair, or member name).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: &str) -> Self {
        Check { name: name.to_string(), pass: true, detail: None }
    }

    pub fn pass_with(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), pass: true, detail: Some(detail.into()) }
    }

    pub fn fail(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), pass: false, detail: Some(detail.into()) }
    }

    pub fn of(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), pass, detail: Some(detail.into()) }
    }
}

/// A report is a list of checks under a stable identifier naming what was
/// verified. `pass` is the conjunction of all checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    /// Stable identifier of the verified statement (e.g. "orbit-asdim-witness").
    pub id: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(id: &str) -> Self {
        Report { id: id.to_string(), pass: true, checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The names of all failing checks, for quick assertions in tests.
    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}
