//! Residual statistics and pass/fail records shared by every checker.

use serde::Serialize;

/// Summary of a residual sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStats {
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    pub p99: f64,
}

impl ResidualStats {
    pub fn from_residuals(r: &[f64]) -> Self {
        if r.is_empty() {
            return ResidualStats {
                count: 0,
                max: 0.0,
                mean: 0.0,
                p99: 0.0,
            };
        }
        let mut sorted = r.to_vec();
        sorted.sort_by(f64::total_cmp);
        let idx = ((sorted.len() as f64 * 0.99).ceil() as usize).clamp(1, sorted.len()) - 1;
        ResidualStats {
            count: r.len(),
            max: *sorted.last().expect("non-empty"),
            mean: r.iter().sum::<f64>() / r.len() as f64,
            p99: sorted[idx],
        }
    }
}

/// One named check with its tolerance and verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tol: f64,
    pub stats: ResidualStats,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes iff every residual is finite and strictly below `tol`.
    pub fn from_residuals(name: impl Into<String>, r: &[f64], tol: f64) -> Self {
        let stats = ResidualStats::from_residuals(r);
        let passed = r.iter().all(|x| x.is_finite() && *x < tol);
        Check {
            name: name.into(),
            tol,
            stats,
            passed,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Distance from `a` to zero on the circle `R/Z`.
pub fn circle_distance(a: f64) -> f64 {
    let r = a.rem_euclid(1.0);
    r.min(1.0 - r)
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
