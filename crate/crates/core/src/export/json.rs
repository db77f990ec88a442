use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::abstraction::{AbstractValue, AbstractionFunction, PathSlot, PathSpec};
use crate::model::{state_key, Annotation, Cell, GraphModel, Lsm, Model, ModelKind, Schema};
use crate::propspec::{parse_property, pretty_print};
use crate::value::{Value, ValueTag};

pub const DUMP_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("unsupported dump version {0}, expected {DUMP_VERSION}")]
    Version(u64),
    #[error("malformed dump: {0}")]
    Schema(String),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Dump {
    fsmrv: u64,
    kind: String,
    schema: Vec<AttrDump>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    annotation: Option<AnnotationDump>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<Vec<StateDump>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<EdgeDump>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<StepDump>>,
}

#[derive(Serialize, Deserialize)]
struct AttrDump {
    name: String,
    #[serde(rename = "type")]
    tag: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
enum AnnotationDump {
    Concrete,
    Abstractions { functions: Vec<String> },
    Path { attr: String, property: String },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct StateDump {
    key: String,
    vector: Vec<Json>,
    first_seq: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct EdgeDump {
    from: usize,
    to: usize,
    count: u64,
    first_seq: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct StepDump {
    seq: u64,
    attr: usize,
    value: Json,
}

/// Serialize a model. State keys are canonical vector strings, so equal
/// models produce equal dumps.
pub fn to_json(model: &Model) -> String {
    let schema = model.schema();
    let mut dump = Dump {
        fsmrv: DUMP_VERSION,
        kind: model.kind().to_string(),
        schema: schema
            .attributes()
            .iter()
            .map(|(n, t)| AttrDump {
                name: n.clone(),
                tag: t.to_string(),
            })
            .collect(),
        annotation: None,
        start: None,
        states: None,
        edges: None,
        steps: None,
    };
    match model {
        Model::Linear(lsm) => {
            dump.steps = Some(
                lsm.steps()
                    .iter()
                    .map(|s| StepDump {
                        seq: s.seq,
                        attr: s.attr,
                        value: cell_to_json(&s.new),
                    })
                    .collect(),
            );
        }
        Model::Graph(g) => {
            dump.annotation = Some(match g.annotation() {
                Annotation::Concrete => AnnotationDump::Concrete,
                Annotation::Abstractions(fns) => AnnotationDump::Abstractions {
                    functions: fns.iter().map(|f| f.describe()).collect(),
                },
                Annotation::Path(spec) => AnnotationDump::Path {
                    attr: spec.attr.clone(),
                    property: pretty_print(&spec.to_property()),
                },
            });
            dump.start = Some(g.start());
            dump.states = Some(
                g.states()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| StateDump {
                        key: state_key(g.schema(), s),
                        vector: s.iter().map(cell_to_json).collect(),
                        first_seq: g.first_seq(i),
                    })
                    .collect(),
            );
            dump.edges = Some(
                g.edges()
                    .iter()
                    .map(|e| EdgeDump {
                        from: e.from,
                        to: e.to,
                        count: e.count,
                        first_seq: e.first_seq,
                    })
                    .collect(),
            );
        }
    }
    serde_json::to_string_pretty(&dump).expect("dump is serializable")
}

/// Load a dump written by [`to_json`].
pub fn from_json(text: &str) -> Result<Model, ExportError> {
    let raw: Json = serde_json::from_str(text).map_err(|e| ExportError::Schema(e.to_string()))?;
    match raw.get("fsmrv").and_then(Json::as_u64) {
        Some(DUMP_VERSION) => {}
        Some(v) => return Err(ExportError::Version(v)),
        None => return Err(ExportError::Schema("missing version field `fsmrv`".into())),
    }
    let dump: Dump = serde_json::from_value(raw).map_err(|e| ExportError::Schema(e.to_string()))?;
    let bad = |m: String| ExportError::Schema(m);
    let kind: ModelKind = dump.kind.parse().map_err(bad)?;
    let mut attrs = Vec::with_capacity(dump.schema.len());
    for a in &dump.schema {
        attrs.push((a.name.clone(), a.tag.parse::<ValueTag>().map_err(bad)?));
    }
    let schema = Schema::new(attrs);

    if kind == ModelKind::Lsm {
        let steps = dump.steps.ok_or_else(|| bad("an lsm dump needs `steps`".into()))?;
        let mut out = Vec::with_capacity(steps.len());
        for s in steps {
            if s.attr >= schema.len() {
                return Err(bad(format!("step at seq {} writes attribute {}", s.seq, s.attr)));
            }
            out.push((s.seq, s.attr, cell_from_json(&s.value)?));
        }
        return Ok(Model::Linear(Lsm::from_steps(schema, out)));
    }

    let annotation = match dump.annotation.ok_or_else(|| bad("a graph dump needs `annotation`".into()))? {
        AnnotationDump::Concrete => Annotation::Concrete,
        AnnotationDump::Abstractions { functions } => {
            if functions.len() != schema.len() {
                return Err(bad("one abstraction function per attribute expected".into()));
            }
            let fns = functions
                .iter()
                .enumerate()
                .map(|(i, f)| AbstractionFunction::parse(schema.name(i), schema.tag(i), f))
                .collect::<Result<Vec<_>, _>>()
                .map_err(bad)?;
            Annotation::Abstractions(fns)
        }
        AnnotationDump::Path { attr, property } => {
            let p = parse_property(&property).map_err(|e| bad(e.to_string()))?;
            let crate::propspec::Expr::P(slots) = &p else {
                return Err(bad("path annotation is not a P property".into()));
            };
            let tag = schema.index(&attr).map(|i| schema.tag(i)).ok_or_else(|| bad(format!("unknown attribute `{attr}`")))?;
            Annotation::Path(PathSpec::from_slots(&attr, tag, slots).map_err(bad)?)
        }
    };
    let states = dump.states.ok_or_else(|| bad("a graph dump needs `states`".into()))?;
    if dump.start.unwrap_or(0) != 0 {
        return Err(bad("the start state must be state 0".into()));
    }
    let mut vectors = Vec::with_capacity(states.len());
    for s in &states {
        if s.vector.len() != schema.len() {
            return Err(bad(format!("state `{}` has {} components", s.key, s.vector.len())));
        }
        vectors.push(s.vector.iter().map(cell_from_json).collect::<Result<Vec<_>, _>>()?);
    }
    let mut vectors = vectors.into_iter();
    let start = vectors.next().ok_or_else(|| bad("no start state".into()))?;
    let mut g = GraphModel::new(kind, schema, annotation, start);
    for (v, s) in vectors.zip(&states[1..]) {
        if !g.intern(v, s.first_seq).1 {
            return Err(bad(format!("duplicate state `{}`", s.key)));
        }
    }
    for e in dump.edges.unwrap_or_default() {
        if e.from >= g.state_count() || e.to >= g.state_count() {
            return Err(bad(format!("edge {} -> {} leaves the state set", e.from, e.to)));
        }
        if !g.add_edge(e.from, e.to, e.count, e.first_seq) {
            return Err(bad(format!("duplicate edge {} -> {}", e.from, e.to)));
        }
    }
    Ok(Model::Graph(g))
}

fn cell_to_json(c: &Cell) -> Json {
    match c {
        Cell::Undefined => Json::Null,
        Cell::Concrete(v) => v.to_json(),
        Cell::Abstract(a) => match a {
            AbstractValue::Unknown => json!({"abs": "unknown"}),
            AbstractValue::Bool(b) => json!({"abs": "bool", "v": b}),
            AbstractValue::Bucket(i) => json!({"abs": "bucket", "v": i}),
            AbstractValue::Raw(v) => json!({"abs": "raw", "v": v.to_json()}),
            AbstractValue::Slot(s) => json!({"abs": "slot", "v": s.index() + 1}),
        },
    }
}

fn cell_from_json(j: &Json) -> Result<Cell, ExportError> {
    let bad = || ExportError::Schema(format!("bad state component {j}"));
    if j.is_null() {
        return Ok(Cell::Undefined);
    }
    let Some(kind) = j.get("abs") else {
        return Value::from_json(j).map(Cell::Concrete).map_err(ExportError::Schema);
    };
    let v = j.get("v");
    let av = match kind.as_str().ok_or_else(bad)? {
        "unknown" => AbstractValue::Unknown,
        "bool" => AbstractValue::Bool(v.and_then(Json::as_bool).ok_or_else(bad)?),
        "bucket" => AbstractValue::Bucket(v.and_then(Json::as_u64).ok_or_else(bad)? as usize),
        "raw" => AbstractValue::Raw(Value::from_json(v.ok_or_else(bad)?).map_err(ExportError::Schema)?),
        "slot" => match v.and_then(Json::as_u64) {
            Some(k @ 1..=3) => AbstractValue::Slot(PathSlot::from_index(k as usize - 1)),
            _ => return Err(bad()),
        },
        _ => return Err(bad()),
    };
    Ok(Cell::Abstract(av))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::build_asm;
    use crate::model::build_lsm;
    use crate::trace::KeyWrite;

    fn writes() -> Vec<KeyWrite> {
        [3, 1, 4, 1, 5]
            .iter()
            .enumerate()
            .map(|(i, v)| KeyWrite {
                seq: 10 + i as u64,
                attr: 0,
                value: Value::Int(*v),
            })
            .collect()
    }

    fn schema() -> Schema {
        Schema::new(vec![("k".into(), ValueTag::Int)])
    }

    #[test]
    fn lsm_dump_keeps_step_order() {
        let lsm = build_lsm(&schema(), writes());
        let back = from_json(&to_json(&Model::Linear(lsm.clone()))).unwrap();
        let Model::Linear(back) = back else { panic!() };
        assert_eq!(back, lsm);
    }

    #[test]
    fn abstract_dump_round_trips() {
        let f = AbstractionFunction::parse("k", ValueTag::Int, "range[2:4]").unwrap();
        let m = Model::Graph(build_asm(&schema(), vec![f], writes()).unwrap());
        let text = to_json(&m);
        assert!(text.contains("\"fsmrv\": 1"));
        assert!(text.contains("range[2:4]"));
        assert_eq!(to_json(&from_json(&text).unwrap()), text);
    }

    #[test]
    fn invalid_dumps_are_rejected() {
        assert!(matches!(from_json(r#"{"fsmrv":2}"#), Err(ExportError::Version(2))));
        let text = to_json(&Model::Linear(build_lsm(&schema(), writes()))).replace("\"lsm\"", "\"tree\"");
        assert!(matches!(from_json(&text), Err(ExportError::Schema(_))));
    }
}
