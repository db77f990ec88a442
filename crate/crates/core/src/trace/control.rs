use std::fmt;
use std::str::FromStr;

use super::event::{Event, EventKind};
use super::TraceError;
use crate::value::Value;

/// Field name of the synthesized control attribute.
pub const CONTROL_FIELD: &str = "__ctl";

/// Granularity of the control location tracked by a control attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlLevel {
    Package,
    Class,
    Method,
    Thread,
}

impl FromStr for ControlLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "package" => Ok(ControlLevel::Package),
            "class" => Ok(ControlLevel::Class),
            "method" => Ok(ControlLevel::Method),
            "thread" => Ok(ControlLevel::Thread),
            other => Err(format!("unknown control level `{other}`")),
        }
    }
}

impl fmt::Display for ControlLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControlLevel::Package => "package",
            ControlLevel::Class => "class",
            ControlLevel::Method => "method",
            ControlLevel::Thread => "thread",
        })
    }
}

/// Control location of a method entry at the given level, or `None` for
/// every other event kind.
pub fn control_value(event: &Event, level: ControlLevel) -> Result<Option<String>, TraceError> {
    let EventKind::MethodEntry { method } = &event.kind else {
        return Ok(None);
    };
    let (class, _) = method
        .rsplit_once('.')
        .ok_or_else(|| bad_name(event, method))?;
    let (package, _) = class
        .rsplit_once('.')
        .ok_or_else(|| bad_name(event, method))?;
    if method.split('.').any(str::is_empty) {
        return Err(bad_name(event, method));
    }
    Ok(Some(match level {
        ControlLevel::Package => package.to_owned(),
        ControlLevel::Class => class.to_owned(),
        ControlLevel::Method => method.clone(),
        ControlLevel::Thread => format!("{}#{}", event.thread, method),
    }))
}

fn bad_name(event: &Event, method: &str) -> TraceError {
    TraceError::QualifiedName {
        seq: event.seq,
        name: method.to_owned(),
    }
}

/// Synthesize the control-attribute write for a method entry.
///
/// Consecutive identical locations are still emitted; collapsing them is
/// left to the model.
pub fn derive_control(event: &Event, level: ControlLevel) -> Result<Option<Event>, TraceError> {
    Ok(control_value(event, level)?.map(|v| {
        Event::field_write(
            event.seq,
            event.thread.clone(),
            CONTROL_FIELD,
            None,
            CONTROL_FIELD,
            Value::Str(v),
        )
    }))
}
