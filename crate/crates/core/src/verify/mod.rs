//! Numerical checks of the inequalities, concavity statements and
//! constructions, each producing a [`Report`].

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{domain, Result};
use crate::means::{p_mean, p_mean_m, ExtReal, Weight};
use crate::measures::{MeasureConfig, MeasureEstimate};

mod bmi;
mod concavity;
mod firey;
mod lifting;
mod scan;
mod triples;
mod uhrin;

pub use bmi::{check_bmi, check_bmi_mset};
pub use concavity::{
    check_b_property, check_curve_concavity, check_dilation_concavity, check_functional_b,
    check_gaussian_improvement, check_power_dilation_concavity,
};
pub use firey::{check_firey_corollary, check_inclusion, check_plus1_is_minkowski};
pub use lifting::{check_lifting, lift_to_uniform, LiftedBody, Lifting};
pub use scan::{log_bm_margin, scan_log_bm, trig_support, ScanLogBmConfig};
pub use triples::TripleGrid;
pub use uhrin::{uhrin_default_resolution, uhrin_functional_check};

/// Ordered from best to worst.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Boundary,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Boundary => "boundary",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

impl Estimate {
    pub fn new(value: f64, abs_error: f64) -> Self {
        Estimate { value, abs_error }
    }

    pub fn exact(value: f64) -> Self {
        Estimate::new(value, 0.0)
    }
}

impl From<&MeasureEstimate> for Estimate {
    fn from(m: &MeasureEstimate) -> Self {
        Estimate::new(m.value, m.abs_error)
    }
}

/// One compared pair `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl Row {
    /// Pass when `margin > tolerance`, boundary when `|margin| <= tolerance`.
    pub fn compare(label: impl Into<String>, lhs: Estimate, rhs: Estimate, tolerance: f64) -> Self {
        let margin = lhs.value - rhs.value;
        let verdict = if margin.is_nan() || tolerance.is_nan() {
            Verdict::Fail
        } else if margin.abs() <= tolerance {
            Verdict::Boundary
        } else if margin > 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Row {
            label: label.into(),
            lhs,
            rhs,
            margin,
            tolerance,
            verdict,
        }
    }

    /// A row whose verdict is decided by the caller.
    pub fn decided(label: impl Into<String>, lhs: Estimate, rhs: Estimate, verdict: Verdict) -> Self {
        Row {
            label: label.into(),
            lhs,
            rhs,
            margin: lhs.value - rhs.value,
            tolerance: 0.0,
            verdict,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    /// First 16 hex digits of the SHA-256 of the serialized parameters.
    pub digest: String,
    pub rows: Vec<Row>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(check: &str, params: Value) -> Self {
        let digest = digest_of(&params);
        Report {
            check: check.into(),
            params,
            digest,
            rows: Vec::new(),
            verdict: Verdict::Boundary,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
        self.update_verdict();
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Worst row verdict; an empty report is a boundary case.
    fn update_verdict(&mut self) {
        self.verdict = self.rows.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Boundary);
    }

    pub fn downgrade(&mut self, verdict: Verdict) {
        self.verdict = self.verdict.max(verdict);
    }

    pub fn worst_margin_ratio(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.margin / r.tolerance.max(f64::MIN_POSITIVE))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn digest_of(params: &Value) -> String {
    let bytes = serde_json::to_vec(params).expect("JSON values serialize");
    let hash = Sha256::digest(&bytes);
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Settings shared by the checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub measure: MeasureConfig,
    /// Tolerance is this factor times the combined absolute error.
    #[serde(default = "default_tolerance_factor")]
    pub tolerance_factor: f64,
    /// Absolute tolerance replacing the error-based one.
    #[serde(default)]
    pub tolerance_override: Option<f64>,
    /// Direction count for Firey constructions; `None` uses the default.
    #[serde(default)]
    pub directions: Option<usize>,
}

fn default_tolerance_factor() -> f64 {
    3.0
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            measure: MeasureConfig::default(),
            tolerance_factor: default_tolerance_factor(),
            tolerance_override: None,
            directions: None,
        }
    }
}

impl VerifyConfig {
    pub fn with_resolution(resolution: usize) -> Self {
        VerifyConfig {
            measure: MeasureConfig::with_resolution(resolution),
            ..Self::default()
        }
    }

    pub fn tolerance(&self, lhs: Estimate, rhs: Estimate) -> f64 {
        self.tolerance_override
            .unwrap_or(self.tolerance_factor * (lhs.abs_error + rhs.abs_error))
    }

    pub fn row(&self, label: impl Into<String>, lhs: Estimate, rhs: Estimate) -> Row {
        Row::compare(label, lhs, rhs, self.tolerance(lhs, rhs))
    }
}

/// `M_p^lambda(a, b)` with its error, propagated through the corners of the
/// input error box (the mean is monotone in each argument).
pub(crate) fn mean_with_error(p: ExtReal, lambda: Weight, a: Estimate, b: Estimate) -> Result<Estimate> {
    let value = p_mean(p, lambda, a.value, b.value)?;
    let hi = p_mean(p, lambda, a.value + a.abs_error, b.value + b.abs_error)?;
    let lo = p_mean(
        p,
        lambda,
        (a.value - a.abs_error).max(0.0),
        (b.value - b.abs_error).max(0.0),
    )?;
    Ok(Estimate::new(value, (hi - value).max(value - lo)))
}

pub(crate) fn mean_m_with_error(p: ExtReal, weights: &[f64], values: &[Estimate]) -> Result<Estimate> {
    let v: Vec<f64> = values.iter().map(|e| e.value).collect();
    let hi: Vec<f64> = values.iter().map(|e| e.value + e.abs_error).collect();
    let lo: Vec<f64> = values.iter().map(|e| (e.value - e.abs_error).max(0.0)).collect();
    let value = p_mean_m(p, weights, &v)?;
    let (hi, lo) = (p_mean_m(p, weights, &hi)?, p_mean_m(p, weights, &lo)?);
    Ok(Estimate::new(value, (hi - value).max(value - lo)))
}

pub(crate) fn weight(lambda: f64) -> Result<Weight> {
    Weight::new(lambda)
}

/// Lambda grid `{0.1, ..., 0.9}`, with the endpoints when requested.
pub fn default_lambdas(include_endpoints: bool) -> Vec<f64> {
    let mut out: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    if include_endpoints {
        out.insert(0, 0.0);
        out.push(1.0);
    }
    out
}

pub(crate) fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(domain("lambda grid is empty"));
    }
    for l in lambdas {
        Weight::new(*l)?;
    }
    Ok(())
}

pub(crate) fn fmt_ext(x: ExtReal) -> Value {
    serde_json::to_value(x).expect("extended reals serialize")
}
