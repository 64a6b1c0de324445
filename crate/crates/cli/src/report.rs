//! Run manifests and the nominal-vs-filtered comparison report.

use std::fmt::Write as _;

use safecov_core::simulation::{ControllerMode, RunTrace, ScenarioConfig};
use serde::Serialize;

use crate::trace::sig9;

/// Relative slack on `2 r_safe` granted to the integrator.
pub const SAFETY_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    Pass,
    Fail,
    /// The safety assertion only binds filtered runs.
    NotApplicable,
}

impl Assertion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Assertion::Pass => "pass",
            Assertion::Fail => "fail",
            Assertion::NotApplicable => "not_applicable",
        }
    }
}

/// Headline numbers of one finished (or aborted) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub mode: ControllerMode,
    pub steps: usize,
    /// Minimum over time of the minimum pairwise distance; `None` for one agent.
    pub min_distance: Option<f64>,
    /// First recorded time with a pairwise distance below `2 r_safe`.
    pub first_violation: Option<f64>,
    pub final_cost: Option<f64>,
    pub assertion: Assertion,
    pub aborted: Option<String>,
}

impl RunSummary {
    pub fn new(config: &ScenarioConfig, trace: &RunTrace, aborted: Option<String>) -> Self {
        let d_safe = 2.0 * config.r_safe;
        let min = trace.min_distance();
        let min_distance = min.is_finite().then_some(min);
        let safe = min_distance.is_none_or(|d| d >= d_safe * (1.0 - SAFETY_TOLERANCE));
        let assertion = match (trace.mode, aborted.is_some(), safe) {
            (ControllerMode::Nominal, _, _) => Assertion::NotApplicable,
            (ControllerMode::Cbf, false, true) => Assertion::Pass,
            _ => Assertion::Fail,
        };
        Self {
            mode: trace.mode,
            steps: trace.records.len(),
            min_distance,
            first_violation: trace.first_violation(d_safe),
            final_cost: trace.final_cost(),
            assertion,
            aborted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub checksum: String,
    pub mode: ControllerMode,
    pub outputs: Vec<String>,
    pub safety_assertion: Assertion,
    pub exit_code: i32,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_else(|| "-".into())
}

/// One line per mode, in the order given.
pub fn render_summaries(name: &str, checksum: &str, summaries: &[RunSummary]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario {name}");
    let _ = writeln!(s, "checksum {checksum}");
    let _ = writeln!(
        s,
        "{:<8} {:>7} {:>14} {:>16} {:>14}  safety",
        "mode", "steps", "min_distance", "first_violation", "final_cost"
    );
    for r in summaries {
        let _ = writeln!(
            s,
            "{:<8} {:>7} {:>14} {:>16} {:>14}  {}",
            r.mode.as_str(),
            r.steps,
            cell(r.min_distance),
            cell(r.first_violation),
            cell(r.final_cost),
            r.assertion.as_str()
        );
        if let Some(msg) = &r.aborted {
            let _ = writeln!(s, "  aborted: {msg}");
        }
    }
    s
}
