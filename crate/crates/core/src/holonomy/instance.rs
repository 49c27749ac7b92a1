use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::su2::AlcoveValue;
use super::tuple::{stabilizer_dimension, tangent_dimension, HolonomyTuple, Target};
use super::HolonomyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub num: i64,
    pub den: i64,
}

/// `{"labels": [{"num", "den"}], "target": "+I" | "-I", "seed": int}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepInstance {
    pub labels: Vec<LabelRecord>,
    pub target: Target,
    #[serde(default)]
    pub seed: u64,
}

impl RepInstance {
    pub fn from_json(v: &Value) -> Result<Self, HolonomyError> {
        let inst: Self = serde_json::from_value(v.clone()).map_err(|e| HolonomyError::Schema(e.to_string()))?;
        inst.alcove_labels()?;
        Ok(inst)
    }

    pub fn alcove_labels(&self) -> Result<Vec<AlcoveValue>, HolonomyError> {
        self.labels
            .iter()
            .map(|l| {
                if l.den <= 0 {
                    return Err(HolonomyError::Schema(format!("denominator {} must be positive", l.den)));
                }
                AlcoveValue::new(l.num as f64 / l.den as f64)
            })
            .collect()
    }
}

/// 17 significant digits: enough to round-trip an `f64`.
fn decimal(x: f64) -> String {
    format!("{x:.16e}")
}

/// A solved instance with its quaternions and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub instance: RepInstance,
    pub tuple: HolonomyTuple,
}

impl Solution {
    pub fn to_json(&self) -> Value {
        let elements: Vec<Vec<String>> = self.tuple.elements.iter().map(|g| g.quaternion().iter().map(|x| decimal(*x)).collect()).collect();
        let stabilizer = stabilizer_dimension(&self.tuple.elements);
        json!({
            "labels": self.instance.labels,
            "target": self.instance.target,
            "seed": self.instance.seed,
            "elements": elements,
            "residual": decimal(self.tuple.residual()),
            "stabilizer_dimension": stabilizer,
            "tangent_dimension": tangent_dimension(&self.tuple).ok(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_instances() {
        let v = json!({"labels": [{"num": 1, "den": 4}, {"num": 1, "den": 2}], "target": "-I", "seed": 9});
        let inst = RepInstance::from_json(&v).unwrap();
        assert_eq!(inst.target, Target::MinusIdentity);
        assert_eq!(inst.alcove_labels().unwrap()[1].value(), 0.5);
        assert_eq!(serde_json::to_value(&inst).unwrap(), v);
    }

    #[test]
    fn rejects_bad_instances() {
        for v in [
            json!({"labels": [{"num": 3, "den": 4}], "target": "+I"}),
            json!({"labels": [{"num": 1, "den": 0}], "target": "+I"}),
            json!({"labels": [], "target": "I"}),
            json!({"labels": [], "target": "+I", "extra": 1}),
        ] {
            assert!(RepInstance::from_json(&v).is_err(), "{v}");
        }
    }

    #[test]
    fn decimals_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, std::f64::consts::FRAC_1_SQRT_2] {
            assert_eq!(decimal(x).parse::<f64>().unwrap(), x);
        }
    }
}
