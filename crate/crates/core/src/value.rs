//! Typed attribute values carried by field-write events.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde_json::json;

/// Declared type of a key attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueTag {
    Int,
    Real,
    Bool,
    Str,
    IntList,
}

impl ValueTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueTag::Int => "int",
            ValueTag::Real => "real",
            ValueTag::Bool => "bool",
            ValueTag::Str => "str",
            ValueTag::IntList => "intList",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, ValueTag::Int | ValueTag::Real)
    }
}

impl fmt::Display for ValueTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValueTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "int" => Ok(ValueTag::Int),
            "real" => Ok(ValueTag::Real),
            "bool" => Ok(ValueTag::Bool),
            "str" => Ok(ValueTag::Str),
            "intList" => Ok(ValueTag::IntList),
            other => Err(format!("unknown value tag `{other}`")),
        }
    }
}

/// A concrete value written to a field.
///
/// Equality is structural. Reals compare by bit pattern so that values can
/// key hash maps; `-0.0` and `0.0` are therefore distinct states.
#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Str(String),
    IntList(Vec<i64>),
}

impl Value {
    pub fn tag(&self) -> ValueTag {
        match self {
            Value::Int(_) => ValueTag::Int,
            Value::Real(_) => ValueTag::Real,
            Value::Bool(_) => ValueTag::Bool,
            Value::Str(_) => ValueTag::Str,
            Value::IntList(_) => ValueTag::IntList,
        }
    }

    /// Numeric view used by range abstractions and interval constraints.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    /// Decode the `{"t": .., "v": ..}` payload used by trace records.
    pub fn from_json(raw: &serde_json::Value) -> Result<Value, String> {
        let obj = raw.as_object().ok_or("value must be an object")?;
        let tag = obj
            .get("t")
            .and_then(|t| t.as_str())
            .ok_or("value is missing tag `t`")?;
        let payload = obj.get("v").ok_or("value is missing payload `v`")?;
        let tag: ValueTag = tag.parse()?;
        let mismatch = || format!("payload {payload} does not match tag `{tag}`");
        Ok(match tag {
            ValueTag::Int => Value::Int(payload.as_i64().ok_or_else(mismatch)?),
            ValueTag::Real => Value::Real(payload.as_f64().ok_or_else(mismatch)?),
            ValueTag::Bool => Value::Bool(payload.as_bool().ok_or_else(mismatch)?),
            ValueTag::Str => Value::Str(payload.as_str().ok_or_else(mismatch)?.to_owned()),
            ValueTag::IntList => {
                let items = payload.as_array().ok_or_else(mismatch)?;
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    out.push(item.as_i64().ok_or_else(mismatch)?);
                }
                Value::IntList(out)
            }
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => json!({"t": "int", "v": i}),
            Value::Real(r) => json!({"t": "real", "v": r}),
            Value::Bool(b) => json!({"t": "bool", "v": b}),
            Value::Str(s) => json!({"t": "str", "v": s}),
            Value::IntList(l) => json!({"t": "intList", "v": l}),
        }
    }

    /// Bare JSON rendering used in verdict witness states.
    pub fn to_plain_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => json!(i),
            Value::Real(r) => json!(r),
            Value::Bool(b) => json!(b),
            Value::Str(s) => json!(s),
            Value::IntList(l) => json!(l),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Int(_) => 0,
            Value::Real(_) => 1,
            Value::Bool(_) => 2,
            Value::Str(_) => 3,
            Value::IntList(_) => 4,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Real(a), Value::Real(b)) => a.total_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            (Value::IntList(a), Value::IntList(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Int(i) => i.hash(state),
            Value::Real(r) => r.to_bits().hash(state),
            Value::Bool(b) => b.hash(state),
            Value::Str(s) => s.hash(state),
            Value::IntList(l) => l.hash(state),
        }
    }
}

/// Renders in property-language literal syntax: `3`, `2.5`, `"E"`, `{1, 2}`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{}", format_real(*r)),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "{}", quote(s)),
            Value::IntList(l) => {
                f.write_str("{")?;
                for (i, x) in l.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Reals always carry a decimal point so they re-lex as reals.
pub fn format_real(r: f64) -> String {
    if r.is_finite() && r.fract() == 0.0 && r.abs() < 1e15 {
        format!("{r:.1}")
    } else {
        format!("{r}")
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
