//! Deterministic suite reports.
//!
//! The serialized report is a pure function of the suite configuration:
//! wall time is tracked but excluded from serialization so that identical
//! configs produce byte-identical report text.

use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    /// The certified window was too small to decide the check. Never a
    /// success, never a counterexample.
    PrecisionLimited,
    Fail,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::PrecisionLimited => write!(f, "precision-limited"),
            CheckStatus::Fail => write!(f, "FAIL"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// Reproducible counterexample data for failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// The certified window the verdict covers, when finite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Pass,
            witness: None,
            window: None,
        }
    }

    pub fn pass_window(name: impl Into<String>, window: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Pass,
            witness: None,
            window: Some(window.into()),
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Fail,
            witness: Some(witness.into()),
            window: None,
        }
    }

    pub fn precision_limited(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::PrecisionLimited,
            witness: Some(detail.into()),
            window: None,
        }
    }
}

/// Echo of the configuration a suite ran with; all fields are the
/// original literals so reports are reproducible by copy-paste.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub algebra: String,
    pub beta: String,
    pub p: String,
    pub level: String,
    pub f: String,
    pub trunc: i64,
    pub depth: i64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckResult>,
    /// Wall time is informational only and deliberately not serialized.
    #[serde(skip)]
    pub wall_ms: u128,
}

impl Report {
    pub fn worst(&self) -> CheckStatus {
        let mut worst = CheckStatus::Pass;
        for c in &self.checks {
            worst = match (worst, c.status) {
                (_, CheckStatus::Fail) | (CheckStatus::Fail, _) => CheckStatus::Fail,
                (_, CheckStatus::PrecisionLimited) | (CheckStatus::PrecisionLimited, _) => {
                    CheckStatus::PrecisionLimited
                }
                _ => CheckStatus::Pass,
            };
        }
        worst
    }

    /// Exit code contract: 1 on any fail, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.worst() == CheckStatus::Fail {
            1
        } else {
            0
        }
    }

    /// Deterministic plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite: {}\n", self.suite));
        out.push_str(&format!(
            "config: algebra={} beta={} p={} level={} f={} trunc={} depth={} trials={} seed={}\n",
            self.config.algebra,
            self.config.beta,
            self.config.p,
            self.config.level,
            self.config.f,
            self.config.trunc,
            self.config.depth,
            self.config.trials,
            self.config.seed
        ));
        for c in &self.checks {
            out.push_str(&format!("check {}: {}", c.name, c.status));
            if let Some(w) = &c.window {
                out.push_str(&format!(" [{w}]"));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!("\n  witness: {w}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("result: {}\n", self.worst()));
        out
    }

    /// Deterministic JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
