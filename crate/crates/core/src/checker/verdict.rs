use std::fmt;

use serde_json::{json, Map};

use crate::abstraction::AbstractValue;
use crate::model::{Annotation, Cell, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictValue {
    True,
    False,
    Incompatible,
    Pending,
}

impl VerdictValue {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictValue::True => "true",
            VerdictValue::False => "false",
            VerdictValue::Incompatible => "incompatible",
            VerdictValue::Pending => "pending",
        }
    }
}

impl fmt::Display for VerdictValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a property failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// State index in the checked model (LSM position or graph state).
    pub state: usize,
    pub seq: Option<u64>,
    /// Rendered components of the offending state.
    pub vector: Vec<(String, serde_json::Value)>,
    /// Raw cells of the offending state.
    pub cells: Vec<Cell>,
    /// The sub-property that evaluated to false.
    pub failing: String,
    /// For path violations, the rendered source state of the offending edge.
    pub from: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub value: VerdictValue,
    pub witness: Option<Witness>,
    pub detail: String,
    /// Validity decisions made while checking an abstract model.
    pub validity_checks: usize,
}

impl Verdict {
    pub fn new(value: VerdictValue, detail: impl Into<String>) -> Verdict {
        Verdict {
            value,
            witness: None,
            detail: detail.into(),
            validity_checks: 0,
        }
    }

    pub fn holds(detail: impl Into<String>) -> Verdict {
        Verdict::new(VerdictValue::True, detail)
    }

    pub fn fails(witness: Witness, detail: impl Into<String>) -> Verdict {
        Verdict {
            value: VerdictValue::False,
            witness: Some(witness),
            detail: detail.into(),
            validity_checks: 0,
        }
    }

    pub fn is_true(&self) -> bool {
        self.value == VerdictValue::True
    }

    pub fn witness_seq(&self) -> Option<u64> {
        self.witness.as_ref().and_then(|w| w.seq)
    }

    /// One verdict record as emitted on standard output.
    pub fn to_json(&self, property: &str) -> serde_json::Value {
        let mut obj = Map::new();
        obj.insert("property".into(), json!(property));
        obj.insert("verdict".into(), json!(self.value.as_str()));
        if let Some(w) = &self.witness {
            if let Some(seq) = w.seq {
                obj.insert("witnessSeq".into(), json!(seq));
            }
            let state: Map<_, _> = w.vector.iter().cloned().collect();
            obj.insert("witnessState".into(), serde_json::Value::Object(state));
        }
        obj.insert("detail".into(), json!(self.detail));
        serde_json::Value::Object(obj)
    }
}

/// Render a state for witness reports. Abstract components use the labels
/// of their abstraction.
pub fn render_state(
    schema: &Schema,
    annotation: Option<&Annotation>,
    cells: &[Cell],
) -> Vec<(String, serde_json::Value)> {
    cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let v = match c {
                Cell::Undefined => json!("?"),
                Cell::Concrete(v) => v.to_plain_json(),
                Cell::Abstract(av) => json!(label(annotation, i, av)),
            };
            (schema.name(i).to_owned(), v)
        })
        .collect()
}

pub fn label(annotation: Option<&Annotation>, i: usize, av: &AbstractValue) -> String {
    match (annotation, av) {
        (Some(Annotation::Abstractions(fns)), av) => fns[i].label(av),
        (Some(Annotation::Path(spec)), AbstractValue::Slot(s)) => spec.label(*s),
        (_, av) => av.to_string(),
    }
}

pub fn render_text(schema: &Schema, annotation: Option<&Annotation>, cells: &[Cell]) -> String {
    render_state(schema, annotation, cells)
        .into_iter()
        .map(|(n, v)| match v {
            serde_json::Value::String(s) => format!("{n}={s}"),
            other => format!("{n}={other}"),
        })
        .collect::<Vec<_>>()
        .join(", ")
}
