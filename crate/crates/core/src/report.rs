use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// A single value in the `details` map of a [`CheckReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Detail {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<f64>),
    Nested(BTreeMap<String, Detail>),
}

/// Formats a float with 12 significant digits, dropping trailing zeros.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=12).contains(&exp) {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        return format!("{mantissa}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    format_sig(x).parse().unwrap_or(x)
}

impl fmt::Display for Detail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detail::Bool(b) => write!(f, "{b}"),
            Detail::Int(i) => write!(f, "{i}"),
            Detail::Float(x) => write!(f, "{}", format_sig(*x)),
            Detail::Text(t) => write!(f, "{t}"),
            Detail::List(v) => write!(f, "[{}]", v.iter().map(|x| format_sig(*x)).collect::<Vec<_>>().join(", ")),
            Detail::Nested(m) => write!(f, "{{{}}}", m.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join(", ")),
        }
    }
}

impl From<bool> for Detail {
    fn from(v: bool) -> Self {
        Detail::Bool(v)
    }
}

impl From<usize> for Detail {
    fn from(v: usize) -> Self {
        Detail::Int(v as i64)
    }
}

impl From<i64> for Detail {
    fn from(v: i64) -> Self {
        Detail::Int(v)
    }
}

impl From<f64> for Detail {
    fn from(v: f64) -> Self {
        Detail::Float(v)
    }
}

impl From<&str> for Detail {
    fn from(v: &str) -> Self {
        Detail::Text(v.to_string())
    }
}

impl From<String> for Detail {
    fn from(v: String) -> Self {
        Detail::Text(v)
    }
}

impl From<Vec<f64>> for Detail {
    fn from(v: Vec<f64>) -> Self {
        Detail::List(v)
    }
}

impl From<CheckReport> for Detail {
    fn from(r: CheckReport) -> Self {
        let mut m = r.details;
        m.insert("pass".into(), Detail::Bool(r.pass));
        m.insert("check".into(), Detail::Text(r.check));
        Detail::Nested(m)
    }
}

/// Structured outcome of a verification. Serializes to
/// `{check, pass, tolerance, seed, details}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub details: BTreeMap<String, Detail>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, tolerance: f64) -> Self {
        CheckReport {
            check: check.into(),
            pass: true,
            tolerance,
            seed: None,
            details: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Detail>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Detail>) {
        self.details.insert(key.to_string(), value.into());
    }

    /// Records a named sub-condition and folds it into `pass`.
    pub fn require(&mut self, key: &str, ok: bool) {
        self.pass &= ok;
        self.details.insert(key.to_string(), Detail::Bool(ok));
    }
}
