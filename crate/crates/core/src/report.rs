use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Two-sided acceptance threshold for Monte Carlo comparisons.
pub const Z_THRESHOLD: f64 = 3.0;

/// Smallest standard error used when forming a z-score.
pub const SE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Acceptance {
    Exact { tolerance: f64 },
    MonteCarlo { std_error: f64, z_score: f64 },
}

/// Outcome of one identity check: the two sides at the worst case, their
/// difference and the criterion that decided pass/fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub inputs_digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub acceptance: Acceptance,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn exact(check: &str, inputs: &serde_json::Value, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        Self {
            check: check.to_string(),
            inputs_digest: digest(inputs),
            lhs,
            rhs,
            abs_diff,
            acceptance: Acceptance::Exact { tolerance },
            pass: abs_diff <= tolerance,
            seed: None,
            note: None,
            wall_time: Duration::ZERO,
        }
    }

    /// Compares two estimates whose difference has standard error `std_error`.
    pub fn monte_carlo(
        check: &str,
        inputs: &serde_json::Value,
        lhs: f64,
        rhs: f64,
        std_error: f64,
        seed: u64,
    ) -> Self {
        let z_score = (lhs - rhs) / std_error.max(SE_FLOOR);
        Self::from_z(check, inputs, lhs, rhs, std_error, z_score, seed)
    }

    /// Report for a test statistic already mapped to a standard normal score.
    pub fn from_z(
        check: &str,
        inputs: &serde_json::Value,
        lhs: f64,
        rhs: f64,
        std_error: f64,
        z_score: f64,
        seed: u64,
    ) -> Self {
        Self {
            check: check.to_string(),
            inputs_digest: digest(inputs),
            lhs,
            rhs,
            abs_diff: (lhs - rhs).abs(),
            acceptance: Acceptance::MonteCarlo { std_error, z_score },
            pass: z_score.is_finite() && z_score.abs() <= Z_THRESHOLD,
            seed: Some(seed),
            note: None,
            wall_time: Duration::ZERO,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn timed(mut self, wall_time: Duration) -> Self {
        self.wall_time = wall_time;
        self
    }

    /// Tolerance for exact checks, standard error for Monte Carlo ones.
    pub fn tol_or_se(&self) -> f64 {
        match self.acceptance {
            Acceptance::Exact { tolerance } => tolerance,
            Acceptance::MonteCarlo { std_error, .. } => std_error,
        }
    }

    pub fn z_score(&self) -> Option<f64> {
        match self.acceptance {
            Acceptance::MonteCarlo { z_score, .. } => Some(z_score),
            Acceptance::Exact { .. } => None,
        }
    }
}

/// Combines sub-reports into one: fails if any part fails, keeps the worst part's numbers.
pub fn combine(check: &str, inputs: &serde_json::Value, parts: &[VerificationReport]) -> VerificationReport {
    let worst = parts.iter().max_by(|a, b| severity(a).total_cmp(&severity(b)));
    let mut out = worst
        .cloned()
        .unwrap_or_else(|| VerificationReport::exact(check, inputs, 0.0, 0.0, 0.0));
    let failed = parts.iter().filter(|p| !p.pass).count();
    out.note = Some(format!(
        "{} sub-checks, {failed} failed; worst: {}",
        parts.len(),
        worst.map_or("none", |p| p.check.as_str())
    ));
    out.check = check.to_string();
    out.inputs_digest = digest(inputs);
    out.pass = failed == 0;
    out.seed = parts.iter().find_map(|p| p.seed);
    out.wall_time = parts.iter().map(|p| p.wall_time).sum();
    out
}

/// How close a report is to failing, on a common scale (1 = at the threshold).
fn severity(r: &VerificationReport) -> f64 {
    match r.acceptance {
        Acceptance::Exact { tolerance } => {
            if tolerance > 0.0 {
                r.abs_diff / tolerance
            } else if r.abs_diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        Acceptance::MonteCarlo { z_score, .. } => z_score.abs() / Z_THRESHOLD,
    }
}

pub fn digest(inputs: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("json value serializes");
    let hash = Sha256::digest(&bytes);
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
