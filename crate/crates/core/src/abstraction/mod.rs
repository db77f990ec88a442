//! Abstraction functions, their characteristic sets, and construction of
//! abstract and path models.

mod asm;
mod constraint;
mod function;
mod path;

use std::fmt;

use thiserror::Error;

pub use asm::{build_asm, AsmBuilder};
pub use constraint::{Bound, Constraint, FinSet, Interval, IntervalSet};
pub use function::{AbsForm, AbstractionFunction, Pred};
pub use path::{build_path_model, PathBuilder, PathSpec};

use crate::value::{Value, ValueTag};

/// Waypoint of a path abstraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathSlot {
    F1,
    F2,
    F3,
}

impl PathSlot {
    pub fn from_index(k: usize) -> PathSlot {
        [PathSlot::F1, PathSlot::F2, PathSlot::F3][k]
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AbstractValue {
    /// Abstraction of an undefined component.
    Unknown,
    Bool(bool),
    Bucket(usize),
    Raw(Value),
    Slot(PathSlot),
}

impl fmt::Display for AbstractValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractValue::Unknown => f.write_str("?"),
            AbstractValue::Bool(b) => write!(f, "{b}"),
            AbstractValue::Bucket(i) => write!(f, "#{i}"),
            AbstractValue::Raw(v) => write!(f, "{v}"),
            AbstractValue::Slot(s) => write!(f, "f{}", s.index() + 1),
        }
    }
}

#[derive(Debug, Error)]
pub enum AbstractionError {
    #[error("type error at seq {seq}: attribute `{attr}` is declared {expected} but was written a {found}")]
    TagMismatch {
        attr: String,
        seq: u64,
        expected: ValueTag,
        found: ValueTag,
    },
    #[error("abstract value {value} is not produced by the abstraction of `{attr}`")]
    NotInRange { attr: String, value: String },
    #[error("control value {value} satisfies more than one path predicate")]
    Disjointness { value: String },
    #[error("{0}")]
    Invalid(String),
}
