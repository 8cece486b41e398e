//! Named residual checks.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    /// Measured quantity, when the check has one besides its residual.
    pub value: Option<f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Informational entries never gate the overall verdict.
    pub informational: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn gated(id: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            value: None,
            residual,
            tolerance,
            pass: residual <= tolerance,
            informational: false,
            note: None,
        }
    }

    pub fn informational(id: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            informational: true,
            ..Self::gated(id, residual, tolerance)
        }
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn set_tolerance(&mut self, tolerance: f64) {
        self.tolerance = tolerance;
        self.pass = self.residual <= tolerance;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResidualReport {
    pub checks: Vec<Check>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.checks.extend(other.checks);
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// True when every non-informational check passes.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.informational && !c.pass)
    }

    /// Re-evaluate checks under tolerance overrides. A per-id entry wins over
    /// `global`.
    pub fn apply_tolerances(&mut self, global: Option<f64>, per_id: &BTreeMap<String, f64>) {
        for check in &mut self.checks {
            if let Some(&t) = per_id.get(&check.id) {
                check.set_tolerance(t);
            } else if let Some(t) = global {
                check.set_tolerance(t);
            }
        }
    }
}
