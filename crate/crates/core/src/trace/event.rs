use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    FieldWrite {
        class: String,
        instance: Option<u64>,
        field: String,
        value: Value,
    },
    MethodEntry {
        method: String,
    },
    MethodExit {
        method: String,
    },
}

/// One execution occurrence. `seq` gives the total order of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub seq: u64,
    pub thread: String,
    pub kind: EventKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum EventError {
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("unknown event kind `{0}`")]
    UnknownKind(String),
    #[error("seq must be ≥ 1")]
    NonPositiveSeq,
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("invalid value: {0}")]
    BadValue(String),
}

#[derive(Deserialize)]
struct RawRecord {
    seq: i64,
    kind: String,
    #[serde(default)]
    thread: Option<String>,
    #[serde(default)]
    class: Option<String>,
    #[serde(default)]
    instance: Option<u64>,
    #[serde(default)]
    field: Option<String>,
    #[serde(default)]
    value: Option<serde_json::Value>,
    #[serde(default)]
    method: Option<String>,
}

impl Event {
    pub fn field_write(
        seq: u64,
        thread: impl Into<String>,
        class: impl Into<String>,
        instance: Option<u64>,
        field: impl Into<String>,
        value: Value,
    ) -> Event {
        Event {
            seq,
            thread: thread.into(),
            kind: EventKind::FieldWrite {
                class: class.into(),
                instance,
                field: field.into(),
                value,
            },
        }
    }

    pub fn method_entry(seq: u64, thread: impl Into<String>, method: impl Into<String>) -> Event {
        Event {
            seq,
            thread: thread.into(),
            kind: EventKind::MethodEntry {
                method: method.into(),
            },
        }
    }

    pub fn method_exit(seq: u64, thread: impl Into<String>, method: impl Into<String>) -> Event {
        Event {
            seq,
            thread: thread.into(),
            kind: EventKind::MethodExit {
                method: method.into(),
            },
        }
    }

    /// Decode one trace record. Unknown fields are ignored.
    pub fn parse(line: &str) -> Result<Event, EventError> {
        let raw: RawRecord =
            serde_json::from_str(line).map_err(|e| EventError::Malformed(e.to_string()))?;
        if raw.seq < 1 {
            return Err(EventError::NonPositiveSeq);
        }
        let seq = raw.seq as u64;
        let thread = raw.thread.unwrap_or_default();
        let kind = match raw.kind.as_str() {
            "fieldWrite" => {
                let value = raw.value.ok_or(EventError::MissingField("value"))?;
                if raw.instance == Some(0) {
                    return Err(EventError::Malformed("instance must be ≥ 1".into()));
                }
                EventKind::FieldWrite {
                    class: raw.class.ok_or(EventError::MissingField("class"))?,
                    instance: raw.instance,
                    field: raw.field.ok_or(EventError::MissingField("field"))?,
                    value: Value::from_json(&value).map_err(EventError::BadValue)?,
                }
            }
            "methodEntry" => EventKind::MethodEntry {
                method: raw.method.ok_or(EventError::MissingField("method"))?,
            },
            "methodExit" => EventKind::MethodExit {
                method: raw.method.ok_or(EventError::MissingField("method"))?,
            },
            other => return Err(EventError::UnknownKind(other.to_owned())),
        };
        Ok(Event { seq, thread, kind })
    }

    /// Encode as a single-line trace record, fields in canonical order.
    pub fn to_record(&self) -> String {
        let v = match &self.kind {
            EventKind::FieldWrite {
                class,
                instance,
                field,
                value,
            } => {
                let mut m = serde_json::Map::new();
                m.insert("seq".into(), json!(self.seq));
                m.insert("kind".into(), json!("fieldWrite"));
                m.insert("thread".into(), json!(self.thread));
                m.insert("class".into(), json!(class));
                if let Some(i) = instance {
                    m.insert("instance".into(), json!(i));
                }
                m.insert("field".into(), json!(field));
                m.insert("value".into(), value.to_json());
                serde_json::Value::Object(m)
            }
            EventKind::MethodEntry { method } | EventKind::MethodExit { method } => {
                let kind = if matches!(self.kind, EventKind::MethodEntry { .. }) {
                    "methodEntry"
                } else {
                    "methodExit"
                };
                let mut m = serde_json::Map::new();
                m.insert("seq".into(), json!(self.seq));
                m.insert("kind".into(), json!(kind));
                m.insert("thread".into(), json!(self.thread));
                m.insert("method".into(), json!(method));
                serde_json::Value::Object(m)
            }
        };
        v.to_string()
    }

    /// Qualified name the inclusion filter is applied to: the class for
    /// field writes, the method for method events.
    pub fn unit_name(&self) -> &str {
        match &self.kind {
            EventKind::FieldWrite { class, .. } => class,
            EventKind::MethodEntry { method } | EventKind::MethodExit { method } => method,
        }
    }

    pub fn is_field_write(&self) -> bool {
        matches!(self.kind, EventKind::FieldWrite { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_field_write() {
        let line = r#"{"seq":1,"kind":"fieldWrite","thread":"main","class":"phil.Philo","instance":1,"field":"state","value":{"t":"str","v":"T"}}"#;
        let ev = Event::parse(line).unwrap();
        assert_eq!(
            ev,
            Event::field_write(1, "main", "phil.Philo", Some(1), "state", Value::Str("T".into()))
        );
    }

    #[test]
    fn decodes_method_entry_and_ignores_unknown_fields() {
        let line = r#"{"seq":2,"kind":"methodEntry","thread":"t1","method":"oauth.Client.requestService","line":17}"#;
        let ev = Event::parse(line).unwrap();
        assert_eq!(ev, Event::method_entry(2, "t1", "oauth.Client.requestService"));
    }

    #[test]
    fn rejects_zero_seq() {
        let line = r#"{"seq":0,"kind":"methodEntry","thread":"t1","method":"a.B.c"}"#;
        let err = Event::parse(line).unwrap_err();
        assert_eq!(err.to_string(), "seq must be ≥ 1");
    }

    #[test]
    fn rejects_unknown_kind_and_bad_payload() {
        let line = r#"{"seq":3,"kind":"variableWrite","thread":"t1"}"#;
        assert_eq!(
            Event::parse(line).unwrap_err(),
            EventError::UnknownKind("variableWrite".into())
        );
        let line = r#"{"seq":3,"kind":"fieldWrite","thread":"t","class":"a.B","field":"f","value":{"t":"int","v":"x"}}"#;
        assert!(matches!(Event::parse(line), Err(EventError::BadValue(_))));
        assert!(matches!(Event::parse("{nope"), Err(EventError::Malformed(_))));
    }

    #[test]
    fn record_round_trip() {
        let ev = Event::field_write(9, "w", "db.Database", None, "r", Value::Int(4));
        assert_eq!(Event::parse(&ev.to_record()).unwrap(), ev);
        let ev = Event::method_exit(10, "w", "db.Database.read");
        assert_eq!(Event::parse(&ev.to_record()).unwrap(), ev);
    }
}
