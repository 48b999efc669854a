//! Report documents: exact values only, floats strictly opt-in and marked advisory.

use charsum_core::{CycloValue, FieldElement, MultCharacter};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Serialize)]
pub struct Case {
    pub key: String,
    pub inputs: Value,
    pub outputs: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub kind: &'static str,
    pub job: Value,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl Report {
    pub fn new(kind: &'static str, job: Value, cases: Vec<Case>) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        let summary = Summary { cases: cases.len(), passed, failed: cases.len() - passed };
        Report { kind, job, cases, summary }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

/// How exact values are rendered.
#[derive(Clone, Copy, Debug, Default)]
pub struct Render {
    pub floats: bool,
}

impl Render {
    /// (M, coefficients in the power basis of ζ_M), coefficients as decimal strings.
    pub fn cyclo(&self, v: &CycloValue) -> Value {
        let coeffs: Vec<String> = v.coeffs().iter().map(|c| c.to_string()).collect();
        let mut out = json!({ "M": v.order(), "coeffs": coeffs });
        if self.floats {
            let (re, im) = approximate(v);
            out["advisory_float"] = json!([re, im]);
        }
        out
    }
}

fn approximate(v: &CycloValue) -> (f64, f64) {
    let m = v.order() as f64;
    v.coeffs().iter().enumerate().fold((0.0, 0.0), |(re, im), (i, c)| {
        let c: f64 = c.to_string().parse().unwrap_or(f64::NAN);
        let t = std::f64::consts::TAU * i as f64 / m;
        (re + c * t.cos(), im + c * t.sin())
    })
}

pub fn character(c: &MultCharacter) -> Value {
    json!({ "degree": c.degree(), "index": c.index(), "order": c.order() })
}

pub fn characters(cs: &[MultCharacter]) -> Value {
    Value::Array(cs.iter().map(character).collect())
}

/// Elements are written by their code: the base-p digits of the coordinate vector.
pub fn element(x: FieldElement) -> Value {
    json!(x.code())
}
