//! Execution events, the trace record format, and normalization of raw
//! events into writes on state attributes.

mod control;
mod derive;
mod event;
mod extract;
mod keys;
mod reader;

use thiserror::Error;

pub use control::{control_value, derive_control, ControlLevel, CONTROL_FIELD};
pub use derive::{
    bearing, compass, derive_attributes, haversine, DerivationRule, DeriveFn, DEFAULT_EPSILON_M,
    EARTH_RADIUS_M,
};
pub use event::{Event, EventError, EventKind};
pub use extract::{AttrSource, Extractor, KeyWrite};
pub use keys::{match_key, KeyAttribute, KeyAttributeSet, Selector};
pub use reader::{parse_event_at, read_trace, InclusionFilter, TraceReader};

use crate::value::ValueTag;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {source}")]
    Decode { line: usize, source: EventError },
    #[error("line {line}: out-of-order seq {seq} after {prev}")]
    OutOfOrder { line: usize, prev: u64, seq: u64 },
    #[error("out-of-order seq {seq} after {prev}")]
    SeqOrder { prev: u64, seq: u64 },
    #[error("type error at seq {seq}: attribute `{attribute}` is declared {expected} but was written a {found}")]
    TypeMismatch {
        attribute: String,
        seq: u64,
        expected: ValueTag,
        found: ValueTag,
    },
    #[error("seq {seq}: `{name}` has no package/class separator")]
    QualifiedName { seq: u64, name: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
