//! Instance files.
//!
//! ```json
//! {"probs": [0.9, "3/4", 0.5], "theta": "5/12", "epsilon": 0.1, "delta": 0.05}
//! ```
//!
//! Strings are parsed exactly (`"a/b"` or decimal). JSON numbers become the
//! nearest rational with denominator at most `10^6`.

use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, nearest_rational, parse_rational, Rational};

pub const MAX_FLOAT_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub probs: Vec<Rational>,
    pub theta: Rational,
    pub epsilon: Rational,
    pub delta: Rational,
}

pub fn rational_from_value(v: &Value, what: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| Error::InvalidInput(format!("{what}: number out of range")))?;
            nearest_rational(x, MAX_FLOAT_DENOMINATOR)
        }
        other => Err(Error::InvalidInput(format!("{what}: expected a number or a rational string, got {other}"))),
    }
}

impl InstanceSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::InvalidInput(format!("instance is missing {name:?}")))
        };
        let probs = field("probs")?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("\"probs\" must be an array".into()))?
            .iter()
            .enumerate()
            .map(|(i, p)| rational_from_value(p, &format!("probs[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(InstanceSpec {
            probs,
            theta: rational_from_value(field("theta")?, "theta")?,
            epsilon: rational_from_value(field("epsilon")?, "epsilon")?,
            delta: rational_from_value(field("delta")?, "delta")?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Exact rendering with every value as a rational string.
    pub fn to_json(&self) -> String {
        let v = json!({
            "probs": self.probs.iter().map(format_rational).collect::<Vec<_>>(),
            "theta": format_rational(&self.theta),
            "epsilon": format_rational(&self.epsilon),
            "delta": format_rational(&self.delta),
        });
        serde_json::to_string_pretty(&v).expect("instance serialises")
    }
}
