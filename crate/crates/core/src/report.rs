//! Machine-readable verification reports.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Direction of the comparison between a residual and its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Passes when `residual ≤ tolerance`.
    AtMost,
    /// Passes when `residual ≥ tolerance`.
    AtLeast,
}

fn nan_or_f64<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    /// Stable dotted name, `suite.check`.
    pub name: String,
    /// `NaN` when the check could not run (serialized as `null`).
    #[serde(deserialize_with = "nan_or_f64")]
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::build(name.into(), residual, tolerance, Bound::AtMost)
    }

    pub fn at_least(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::build(name.into(), residual, tolerance, Bound::AtLeast)
    }

    /// An exact (bitwise) comparison, reported as residual `0` or `1`.
    pub fn exact(name: impl Into<String>, equal: bool) -> Self {
        Self::build(name.into(), if equal { 0.0 } else { 1.0 }, 0.0, Bound::AtMost)
    }

    /// A check that could not run; always a failure.
    pub fn errored(name: impl Into<String>, err: impl fmt::Display) -> Self {
        let mut c = Self::build(name.into(), f64::NAN, 0.0, Bound::AtMost);
        c.note = Some(format!("error: {err}"));
        c
    }

    fn build(name: String, residual: f64, tolerance: f64, bound: Bound) -> Self {
        let pass = residual.is_finite()
            && match bound {
                Bound::AtMost => residual <= tolerance,
                Bound::AtLeast => residual >= tolerance,
            };
        Self {
            name,
            residual,
            tolerance,
            bound,
            pass,
            wall_ms: 0.0,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn timed(mut self, since: Instant) -> Self {
        self.wall_ms = since.elapsed().as_secs_f64() * 1e3;
        self
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "{} {:<44} {:>11.3e} {} {:>9.2e}  {:>9.1} ms",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            op,
            self.tolerance,
            self.wall_ms
        )?;
        if let Some(n) = &self.note {
            write!(f, "  ({n})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suites: Vec<String>,
    pub seed: u64,
    pub tol_scale: f64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub wall_ms: f64,
}

impl VerificationReport {
    pub fn new(suites: Vec<String>, seed: u64, tol_scale: f64, checks: Vec<CheckResult>, wall_ms: f64) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suites,
            seed,
            tol_scale,
            checks,
            pass,
            wall_ms,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} failed, seed {}, {:.1} s",
            self.checks.len(),
            failed,
            self.seed,
            self.wall_ms / 1e3
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rules() {
        assert!(CheckResult::at_most("a", 1e-3, 1e-2).pass);
        assert!(!CheckResult::at_most("a", 1e-1, 1e-2).pass);
        assert!(CheckResult::at_least("a", 3.0, 2.0).pass);
        assert!(!CheckResult::at_most("a", f64::NAN, 1.0).pass);
        assert!(!CheckResult::errored("a", "boom").pass);
        assert!(CheckResult::exact("a", true).pass);
    }

    #[test]
    fn json_roundtrip() {
        let r = VerificationReport::new(vec!["lie".into()], 7, 1.0, vec![CheckResult::at_most("lie.x", 0.0, 1e-10)], 1.0);
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(r, back);
        assert!(back.pass);
    }
}
