//! Canonical JSON rendering for reports. Object keys are sorted and floats
//! carry 17 significant digits so identical runs give identical bytes.

use std::str::FromStr;

use serde_json::{json, Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{GradedSeries, HomoPoly, MultiIndex, Ring, Scalar};
use crate::homological::SmallDivisorLog;
use crate::reduction::Verdict;
use crate::system::ResonanceCertificate;

pub const TOOL: &str = "firstint";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `x` with 17 significant digits; non-finite values become strings.
pub fn float(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        Value::Number(Number::from_str(&format_float(x)).expect("valid float literal"))
    }
}

/// Text form used by both the JSON and the CSV outputs.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn opt_float(x: Option<f64>) -> Value {
    x.map(float).unwrap_or(Value::Null)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn header(command: &str, input: &[u8], ring: Ring, truncation: u32) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!(TOOL));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("input_sha256".into(), json!(sha256_hex(input)));
    m.insert("ring".into(), json!(ring.as_str()));
    m.insert("N".into(), json!(truncation));
    m
}

pub fn exponents(m: &MultiIndex) -> Value {
    json!(m.exponents())
}

fn terms<'a, S: Scalar>(it: impl Iterator<Item = (&'a MultiIndex, &'a S)>) -> Value {
    Value::Array(
        it.map(|(m, c)| json!({"coeff": c.to_literal(), "exp": m.exponents()}))
            .collect(),
    )
}

pub fn series<S: Scalar>(s: &GradedSeries<S>) -> Value {
    json!({"literal": s.to_literal(), "terms": terms(s.terms())})
}

pub fn homo<S: Scalar>(p: &HomoPoly<S>) -> Value {
    json!({"degree": p.degree(), "literal": p.to_literal(), "terms": terms(p.terms())})
}

pub fn certificate<S: Scalar>(c: &ResonanceCertificate<S>) -> Value {
    json!({
        "checked_degree": c.checked_degree,
        "min_divisor": {
            "size": c.min_divisor.size.to_string(),
            "value": c.min_divisor.value.to_literal(),
            "witness": exponents(&c.min_divisor.witness),
        }
    })
}

pub fn verdict<S: Scalar>(v: &Verdict<S>) -> Value {
    match v {
        Verdict::NonIsolatedUpTo(n) => json!({"kind": "NonIsolatedUpTo", "degree": n}),
        Verdict::IsolatedAtDegree { degree, witness } => json!({
            "kind": "IsolatedAtDegree",
            "degree": degree,
            "witness": witness.to_literal(),
        }),
    }
}

pub fn divisors<S: Scalar>(log: &SmallDivisorLog<S>) -> Value {
    let entries: Vec<Value> = log
        .entries()
        .map(|(m, e)| {
            json!({"monomial": exponents(m), "value": e.value.to_literal(), "size": e.size.to_string()})
        })
        .collect();
    let minimum = log
        .minimum()
        .map(|(m, s)| json!({"monomial": exponents(m), "size": s.to_string()}))
        .unwrap_or(Value::Null);
    json!({"minimum": minimum, "entries": entries})
}

/// Pretty-printed report with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
