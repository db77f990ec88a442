use std::collections::HashMap;
use std::fmt;

use crate::abstraction::AbstractValue;
use crate::value::{Value, ValueTag};

/// Names and declared tags of the state-vector components, in order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schema {
    attrs: Vec<(String, ValueTag)>,
    index: HashMap<String, usize>,
}

impl Schema {
    pub fn new(attrs: Vec<(String, ValueTag)>) -> Schema {
        let index = attrs
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect();
        Schema { attrs, index }
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.attrs[i].0
    }

    pub fn tag(&self, i: usize) -> ValueTag {
        self.attrs[i].1
    }

    pub fn attributes(&self) -> &[(String, ValueTag)] {
        &self.attrs
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attrs.iter().map(|(n, _)| n.as_str())
    }
}

/// One component of a state vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cell {
    /// Not yet written (`?`).
    Undefined,
    Concrete(Value),
    Abstract(AbstractValue),
}

impl Cell {
    pub fn is_defined(&self) -> bool {
        !matches!(self, Cell::Undefined | Cell::Abstract(AbstractValue::Unknown))
    }

    pub fn concrete(&self) -> Option<&Value> {
        match self {
            Cell::Concrete(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Undefined => f.write_str("?"),
            Cell::Concrete(v) => write!(f, "{v}"),
            Cell::Abstract(a) => write!(f, "{a}"),
        }
    }
}

/// A state: one cell per schema attribute.
pub type StateVector = Vec<Cell>;

pub fn initial_state(schema: &Schema) -> StateVector {
    vec![Cell::Undefined; schema.len()]
}

/// Canonical `name=value,...` text of a vector, used as a stable state key.
pub fn state_key(schema: &Schema, state: &[Cell]) -> String {
    let mut out = String::new();
    for (i, cell) in state.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(schema.name(i));
        out.push('=');
        out.push_str(&cell.to_string());
    }
    out
}
