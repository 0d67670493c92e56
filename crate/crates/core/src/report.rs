//! Evaluated inequality reports.
//!
//! A `BoundReport` records both sides of a named inequality on concrete
//! inputs, the multiplicative constant used for constant-bearing bounds, the
//! hypothesis flags that were checked, a pass verdict, and a deterministic
//! digest of the inputs. Reports serialize to one JSON object per line:
//! `{name, lhs, rhs, constant, hypothesis_flags, pass, inputs_digest}`.
//!
//! Pass convention: lhs <= constant * rhs, with 1e-6 relative slack whenever
//! a floating quantity is involved. Exact integer comparisons carry no slack.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::sets::FSet;
use crate::util::Fnv1a;

/// Exact integer or floating value, serialized as a bare JSON number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Exact(u128),
    Float(f64),
}

impl Value {
    pub fn as_f64(self) -> f64 {
        match self {
            Value::Exact(v) => v as f64,
            Value::Float(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Value::Exact(_))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Relative slack applied when either side of a comparison is floating.
pub const FLOAT_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub constant: f64,
    pub hypothesis_flags: BTreeMap<String, bool>,
    pub pass: bool,
    pub inputs_digest: String,
}

impl BoundReport {
    /// Build a report and evaluate the pass flag from lhs <= constant * rhs.
    pub fn new(
        name: impl Into<String>,
        lhs: Value,
        rhs: Value,
        constant: f64,
        hypothesis_flags: BTreeMap<String, bool>,
        inputs_digest: String,
    ) -> BoundReport {
        let pass = evaluate_pass(lhs, rhs, constant);
        BoundReport {
            name: name.into(),
            lhs,
            rhs,
            constant,
            hypothesis_flags,
            pass,
            inputs_digest,
        }
    }

    /// Report without hypothesis flags.
    pub fn exact(
        name: String,
        lhs: Value,
        rhs: Value,
        constant: f64,
        inputs_digest: String,
    ) -> BoundReport {
        BoundReport::new(name, lhs, rhs, constant, BTreeMap::new(), inputs_digest)
    }

    pub fn with_flag(mut self, key: &str, value: bool) -> BoundReport {
        self.hypothesis_flags.insert(key.to_string(), value);
        self
    }

    /// One-line JSON rendering (streaming, so 128-bit integers print in full).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

pub(crate) fn evaluate_pass(lhs: Value, rhs: Value, constant: f64) -> bool {
    if let (Value::Exact(l), Value::Exact(r)) = (lhs, rhs) {
        if constant == 1.0 {
            return l <= r;
        }
        if constant.fract() == 0.0 && (0.0..1e18).contains(&constant) {
            if let Some(scaled) = r.checked_mul(constant as u128) {
                return l <= scaled;
            }
        }
    }
    lhs.as_f64() <= constant * rhs.as_f64() * (1.0 + FLOAT_SLACK)
}

/// Deterministic digest accumulator for report inputs.
pub struct DigestBuilder {
    hasher: Fnv1a,
}

impl DigestBuilder {
    pub fn new(tag: &str) -> DigestBuilder {
        let mut hasher = Fnv1a::new();
        hasher.write_str(tag);
        DigestBuilder { hasher }
    }

    pub fn text(mut self, s: &str) -> DigestBuilder {
        self.hasher.write_str(s);
        self
    }

    pub fn num(mut self, v: u64) -> DigestBuilder {
        self.hasher.write_u64(v);
        self
    }

    pub fn set(mut self, s: &FSet) -> DigestBuilder {
        self.hasher.write_u64(s.ctx().p());
        self.hasher.write_u64(s.ctx().n() as u64);
        for &m in s.ctx().modulus() {
            self.hasher.write_u64(m);
        }
        self.hasher.write_u64(s.len() as u64);
        for &c in s.codes() {
            self.hasher.write_u64(c);
        }
        self
    }

    pub fn finish(self) -> String {
        self.hasher.finish_hex()
    }
}
