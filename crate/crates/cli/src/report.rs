//! Machine-readable run reports.
//!
//! Reports hold no timing, so identical inputs and seeds give byte-identical output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Metric recorded for a case whose computation failed outright.
pub const FAILED_METRIC: f64 = f64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub case_id: String,
    pub inputs_digest: String,
    pub metric: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Short name of the property the case certifies.
    pub property: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Case {
    /// Passes iff `metric <= tolerance`.
    pub fn measured(case_id: impl Into<String>, inputs: &Value, metric: f64, tolerance: f64, property: &str) -> Self {
        Self {
            case_id: case_id.into(),
            inputs_digest: digest(inputs),
            metric,
            tolerance,
            pass: metric <= tolerance,
            property: property.into(),
            detail: None,
        }
    }

    /// Exact check: metric 0 on success, 1 on failure.
    pub fn exact(case_id: impl Into<String>, inputs: &Value, ok: bool, property: &str) -> Self {
        Self::measured(case_id, inputs, if ok { 0.0 } else { 1.0 }, 0.0, property)
    }

    pub fn failed(case_id: impl Into<String>, inputs: &Value, tolerance: f64, property: &str, why: impl ToString) -> Self {
        Self::measured(case_id, inputs, FAILED_METRIC, tolerance, property).with_detail(why)
    }

    pub fn with_detail(mut self, detail: impl ToString) -> Self {
        self.detail = Some(detail.to_string());
        self
    }

    /// Criterion prefix of the case id, before the first `/`.
    pub fn group(&self) -> &str {
        self.case_id.split('/').next().unwrap_or(&self.case_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    /// Sorted by `case_id`.
    pub cases: Vec<Case>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
}

impl RunReport {
    pub fn new(suite: impl Into<String>, seed: u64, mut cases: Vec<Case>) -> Self {
        cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let pass = cases.iter().all(|c| c.pass);
        Self { suite: suite.into(), seed, pass, cases, output: None }
    }

    pub fn with_output(mut self, output: Value) -> Self {
        self.output = Some(output);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// SHA-256 of the compact JSON encoding. Object keys are sorted by `serde_json`, so equal values
/// give equal digests.
pub fn digest(v: &Value) -> String {
    let bytes = Sha256::digest(serde_json::to_string(v).expect("JSON value").as_bytes());
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    #[test]
    fn digest_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"x": 1, "y": [2, 3]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"y": [2, 3], "x": 1}"#).unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_ne!(digest(&a), digest(&json!({"x": 2, "y": [2, 3]})));
        assert_eq!(digest(&json!(null)).len(), 64);
    }

    #[test]
    fn report_sorts_and_aggregates() {
        let r = RunReport::new(
            "demo",
            3,
            vec![Case::measured("b/1", &json!(1), 0.5, 1.0, "p"), Case::exact("a/1", &json!(2), false, "q")],
        );
        assert_eq!(r.cases[0].case_id, "a/1");
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.cases[1].group(), "b");
        let back: RunReport = serde_json::from_str(&r.to_json_string()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn failed_cases_do_not_pass() {
        let c = Case::failed("x", &json!({}), 1e300, "p", "boom");
        assert!(!c.pass);
        assert_eq!(c.detail.as_deref(), Some("boom"));
    }
}
