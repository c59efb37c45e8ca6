use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One named inequality, evaluated over a sample set.
///
/// `pass` is `margin > threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(with = "extended_f64")]
    pub margin: f64,
    #[serde(with = "extended_f64")]
    pub threshold: f64,
    pub samples: usize,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, margin: f64, threshold: f64, samples: usize, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            margin,
            threshold,
            samples,
            pass: margin > threshold,
            detail: detail.into(),
        }
    }

    /// A check with nothing to test. Passes with infinite margin.
    pub fn vacuous(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckResult::new(name, f64::INFINITY, 0.0, 0, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pipeline_id: String,
    pub window: f64,
    pub constants: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
    pub overall_pass: bool,
    /// Unix seconds at report creation; the only field that differs between
    /// otherwise identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl VerificationReport {
    pub fn new(pipeline_id: impl Into<String>, window: f64) -> Self {
        VerificationReport {
            pipeline_id: pipeline_id.into(),
            window,
            constants: BTreeMap::new(),
            checks: Vec::new(),
            overall_pass: true,
            generated_at: None,
        }
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_string(), value);
    }

    pub fn push(&mut self, c: CheckResult) {
        self.overall_pass &= c.pass;
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        for (k, v) in other.constants {
            self.constants.insert(k, v);
        }
        for c in other.checks {
            self.push(c);
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn stamp(&mut self) {
        self.generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Columns `check,name,margin,samples,pass`, where `check` is the 1-based
    /// row index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,name,margin,samples,pass\n");
        for (i, c) in self.checks.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", i + 1, csv_field(&c.name), fmt_f64(c.margin), c.samples, c.pass);
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip decimal, with `inf`, `-inf`, `nan` for the rest.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// JSON has no infinities; they are written as the strings `"inf"`, `"-inf"`
/// and `"nan"`.
mod extended_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&fmt_f64(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}
