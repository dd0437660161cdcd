//! Machine-readable verification reports.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// One comparison of a computed value against a reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub inputs: Value,
    pub lhs: Value,
    pub rhs: Value,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Numeric comparison passing iff `|lhs − rhs| ≤ tolerance`.
    pub fn numeric(check: &str, inputs: Value, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let defect = (lhs - rhs).abs();
        Check {
            check: check.into(),
            inputs,
            lhs: json_f64(lhs),
            rhs: json_f64(rhs),
            defect,
            tolerance,
            pass: defect <= tolerance,
        }
    }

    /// Complex comparison passing iff `|lhs − rhs| ≤ tolerance`.
    pub fn complex(check: &str, inputs: Value, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        let defect = (lhs - rhs).norm();
        let pair = |z: Complex64| Value::Array(vec![json_f64(z.re), json_f64(z.im)]);
        Check { check: check.into(), inputs, lhs: pair(lhs), rhs: pair(rhs), defect, tolerance, pass: defect <= tolerance }
    }

    /// Exact comparison of displayable values.
    pub fn exact<T: PartialEq + ToString>(check: &str, inputs: Value, lhs: T, rhs: T) -> Self {
        let pass = lhs == rhs;
        Check {
            check: check.into(),
            inputs,
            lhs: Value::String(lhs.to_string()),
            rhs: Value::String(rhs.to_string()),
            defect: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(check: &str, inputs: Value, message: String) -> Self {
        Check {
            check: check.into(),
            inputs,
            lhs: Value::String(message),
            rhs: Value::Null,
            defect: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
        }
    }
}

/// NaN and infinities are not JSON numbers; they are reported as strings.
pub fn json_f64(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

/// A suite of checks; passes iff every check passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_ms: u64,
    /// Budgets and truncation parameters used.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub budget: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        VerificationReport {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            checks: Vec::new(),
            pass: true,
            wall_ms: 0,
            budget: Value::Null,
            warnings: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.push(c);
        }
        self.warnings.extend(other.warnings);
    }

    pub fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
