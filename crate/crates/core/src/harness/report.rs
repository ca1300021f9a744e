use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::fock::{DensityMatrix, StateJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Probe,
}

/// Whether a verifier asserts a proven inequality or only explores a conjecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Assert,
    Probe,
}

impl Status {
    /// A proven inequality fails only when the violation is not explained by truncation.
    pub fn classify(mode: Mode, gap: f64, tolerance: f64, leakage: f64) -> Status {
        match mode {
            Mode::Probe => Status::Probe,
            Mode::Assert if gap >= -tolerance => Status::Pass,
            Mode::Assert if gap.is_finite() && leakage < tolerance / 10.0 => Status::Fail,
            Mode::Assert => Status::Probe,
        }
    }
}

/// A state (or pair of states) whose gap fell below the candidate threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub trial: usize,
    pub gap: f64,
    pub leakage: f64,
    pub states: Vec<StateJson>,
}

impl Candidate {
    pub fn new(trial: usize, gap: f64, leakage: f64, states: &[&DensityMatrix]) -> Self {
        Self { trial, gap, leakage, states: states.iter().map(|s| s.to_json()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub params: BTreeMap<String, Value>,
    /// Worst `LHS - RHS` over all trials.
    #[serde(with = "labelled_float")]
    pub gap: f64,
    pub tolerance: f64,
    pub leakage: f64,
    pub trials: usize,
    pub status: Status,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<Candidate>,
}

impl VerificationReport {
    pub fn new(theorem_id: &str, seed: u64, tolerance: f64) -> Self {
        Self {
            theorem_id: theorem_id.to_string(),
            params: BTreeMap::new(),
            gap: f64::INFINITY,
            tolerance,
            leakage: 0.0,
            trials: 0,
            status: Status::Probe,
            seed,
            details: BTreeMap::new(),
            candidates: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), to_value(value));
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(key.to_string(), to_value(value));
    }

    /// Folds one trial's gap and leakage into the running worst case.
    pub fn record(&mut self, gap: f64, leakage: f64) {
        self.trials += 1;
        if gap < self.gap || gap.is_nan() {
            self.gap = gap;
        }
        self.leakage = self.leakage.max(leakage);
    }

    pub fn finish(mut self, mode: Mode) -> Self {
        self.status = Status::classify(mode, self.gap, self.tolerance, self.leakage);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

/// JSON has no infinities: non-finite values are written as "inf", "-inf" or "nan".
pub fn finite_or_label(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

mod labelled_float {
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match super::finite_or_label(*x) {
            Value::String(label) => s.serialize_str(&label),
            _ => s.serialize_f64(*x),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n.as_f64().ok_or_else(|| serde::de::Error::custom("bad number")),
            Value::String(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("unexpected label {other}"))),
            },
            other => Err(serde::de::Error::custom(format!("expected a number, got {other}"))),
        }
    }
}
