//! The report document each command emits.
//!
//! A run produces a flat table of tagged scalars, rendered as CSV with
//! columns `quantity,path,value,ci_lo,ci_hi`, where `path` names the route
//! that produced the number (`analytic`, `oracle`, `montecarlo`). The JSON
//! twin wraps the same table in a document with the structured sections
//! (scenario echo, inequality verdict, cross-check, agreement tests).
//!
//! Floats render as shortest round-trip scientific notation: re-parsing a
//! report reproduces the exact doubles, so byte-diffing two reports is a
//! sound way to compare runs.

use serde::{Serialize, Serializer};

use crate::analytic::InequalityVerdict;
use crate::oracle::CrossCheck;
use crate::scenario::{DetectorMode, EmissionMode, ValidatedScenario};
use crate::stats::{Amplification, ComparisonReport, SummaryStats};

/// Which route produced a reported number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuePath {
    Analytic,
    Oracle,
    Montecarlo,
}

impl ValuePath {
    pub fn as_str(self) -> &'static str {
        match self {
            ValuePath::Analytic => "analytic",
            ValuePath::Oracle => "oracle",
            ValuePath::Montecarlo => "montecarlo",
        }
    }
}

/// One reported scalar. Floats that are not finite serialize to JSON as the
/// strings `"inf"`, `"-inf"`, `"nan"` (JSON numbers cannot carry them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Float(f64),
    Int(u64),
    Bool(bool),
}

impl Scalar {
    fn render(self) -> String {
        match self {
            Scalar::Float(x) => format!("{x:e}"),
            Scalar::Int(n) => n.to_string(),
            Scalar::Bool(b) => b.to_string(),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            Scalar::Float(x) => json_safe_f64(&x, serializer),
            Scalar::Int(n) => serializer.serialize_u64(n),
            Scalar::Bool(b) => serializer.serialize_bool(b),
        }
    }
}

/// Serialize a float that may legitimately be infinite (a z-score against
/// zero expected mass) without poisoning the JSON document.
pub fn json_safe_f64<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        serializer.serialize_f64(*x)
    } else if x.is_nan() {
        serializer.serialize_str("nan")
    } else if *x > 0.0 {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_str("-inf")
    }
}

/// One row of the value table.
#[derive(Debug, Clone, Serialize)]
pub struct ReportValue {
    pub quantity: String,
    pub path: ValuePath,
    pub value: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_hi: Option<f64>,
}

/// Ordered row collection with typed push helpers.
#[derive(Debug, Clone, Default)]
pub struct Rows(Vec<ReportValue>);

impl Rows {
    pub fn new() -> Self {
        Rows(Vec::new())
    }

    pub fn float(&mut self, quantity: impl Into<String>, path: ValuePath, value: f64) {
        self.0.push(ReportValue {
            quantity: quantity.into(),
            path,
            value: Scalar::Float(value),
            ci_lo: None,
            ci_hi: None,
        });
    }

    pub fn float_ci(
        &mut self,
        quantity: impl Into<String>,
        path: ValuePath,
        value: f64,
        ci: (f64, f64),
    ) {
        self.0.push(ReportValue {
            quantity: quantity.into(),
            path,
            value: Scalar::Float(value),
            ci_lo: Some(ci.0),
            ci_hi: Some(ci.1),
        });
    }

    pub fn int(&mut self, quantity: impl Into<String>, path: ValuePath, value: u64) {
        self.0.push(ReportValue {
            quantity: quantity.into(),
            path,
            value: Scalar::Int(value),
            ci_lo: None,
            ci_hi: None,
        });
    }

    pub fn flag(&mut self, quantity: impl Into<String>, path: ValuePath, value: bool) {
        self.0.push(ReportValue {
            quantity: quantity.into(),
            path,
            value: Scalar::Bool(value),
            ci_lo: None,
            ci_hi: None,
        });
    }

    pub fn extend(&mut self, other: Rows) {
        self.0.extend(other.0);
    }

    pub fn as_slice(&self) -> &[ReportValue] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<ReportValue> {
        self.0
    }
}

/// The scenario as the run resolved it: probabilities, not geometry.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioEcho {
    pub shells: Vec<ShellEcho>,
    pub detector_q: f64,
    pub detector_mode: DetectorMode,
    pub emission_mode: EmissionMode,
    pub photons_k: u32,
    pub interval_t_s: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellEcho {
    pub label: String,
    pub q: f64,
}

impl ScenarioEcho {
    pub fn from_validated(v: &ValidatedScenario) -> Self {
        let shells = v
            .shell_labels()
            .zip(v.qv().absorber_qs())
            .map(|(label, &q)| ShellEcho { label: label.to_string(), q })
            .collect();
        ScenarioEcho {
            shells,
            detector_q: v.qv().detector_q(),
            detector_mode: v.detector_mode(),
            emission_mode: v.emission_mode(),
            photons_k: v.photons_k(),
            interval_t_s: v.scenario().emission.interval_t_s,
            trials: v.trials(),
            seed: v.seed(),
        }
    }
}

/// An agreement test labeled with the discipline it covers.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledComparison {
    pub label: String,
    pub report: ComparisonReport,
}

/// Moments labeled with the distribution they summarize.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledSummary {
    pub label: String,
    pub stats: SummaryStats,
}

/// The JSON document a command writes next to its CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub scenario: ScenarioEcho,
    pub values: Vec<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inequality: Option<InequalityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<CrossCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<LabeledComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplification: Option<Amplification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplification_empirical: Option<Amplification>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub summaries: Vec<LabeledSummary>,
}

impl RunReport {
    pub fn new(command: &'static str, scenario: ScenarioEcho) -> Self {
        RunReport {
            command,
            scenario,
            values: Vec::new(),
            inequality: None,
            oracle: None,
            comparisons: Vec::new(),
            amplification: None,
            amplification_empirical: None,
            summaries: Vec::new(),
        }
    }
}

/// Render the value table as CSV.
pub fn render_csv(values: &[ReportValue]) -> String {
    let mut out = String::from("quantity,path,value,ci_lo,ci_hi\n");
    for row in values {
        out.push_str(&row.quantity);
        out.push(',');
        out.push_str(row.path.as_str());
        out.push(',');
        out.push_str(&row.value.render());
        out.push(',');
        if let Some(lo) = row.ci_lo {
            out.push_str(&format!("{lo:e}"));
        }
        out.push(',');
        if let Some(hi) = row.ci_hi {
            out.push_str(&format!("{hi:e}"));
        }
        out.push('\n');
    }
    out
}
