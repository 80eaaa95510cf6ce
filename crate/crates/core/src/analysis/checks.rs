use serde::{Deserialize, Serialize};

/// One verifier outcome, serialized into verification reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default)]
    pub details: String,
    /// Soft checks are reported but never fail a suite.
    #[serde(default)]
    pub soft: bool,
}

impl CheckRecord {
    /// `|observed − expected| ≤ tolerance`.
    pub fn close(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            expected,
            observed,
            tolerance,
            pass: (observed - expected).abs() <= tolerance,
            details: String::new(),
            soft: false,
        }
    }

    /// `observed ∈ [lo, hi]`; reported as expected midpoint ± half-width.
    pub fn within(name: impl Into<String>, lo: f64, hi: f64, observed: f64) -> Self {
        Self {
            check_name: name.into(),
            expected: (lo + hi) / 2.0,
            observed,
            tolerance: (hi - lo) / 2.0,
            pass: observed >= lo && observed <= hi,
            details: String::new(),
            soft: false,
        }
    }

    /// `observed ≥ bound`.
    pub fn at_least(name: impl Into<String>, bound: f64, observed: f64) -> Self {
        Self {
            check_name: name.into(),
            expected: bound,
            observed,
            tolerance: 0.0,
            pass: observed >= bound,
            details: String::new(),
            soft: false,
        }
    }

    /// `observed < bound`.
    pub fn below(name: impl Into<String>, bound: f64, observed: f64) -> Self {
        Self {
            check_name: name.into(),
            expected: bound,
            observed,
            tolerance: 0.0,
            pass: observed < bound,
            details: String::new(),
            soft: false,
        }
    }

    pub fn with_details(mut self, details: impl Into<String>) -> Self {
        self.details = details.into();
        self
    }

    pub fn soft(mut self) -> Self {
        self.soft = true;
        self
    }

    /// Whether this record should fail a suite.
    pub fn hard_failure(&self) -> bool {
        !self.pass && !self.soft
    }
}
