use serde_json::{json, Map, Value as Json};

use crate::abstraction::{AsmBuilder, PathBuilder, PathSlot};
use crate::checker::{
    self, check_lsm, constraints, render_state, slot_of, CheckError, CheckOptions, Truth, Validity,
    Verdict, VerdictValue, Witness,
};
use crate::checker::eval::{Frame, NoTemporal, Patched, StateView};
use crate::model::{build_lsm, initial_state, Annotation, Cell, GraphBuilder, GraphModel, ModelKind, StateVector};
use crate::pipeline::PipelineError;
use crate::propspec::{normalize, pretty_print, Expr};
use crate::specfile::{Restriction, Spec};
use crate::trace::{parse_event_at, Event, Extractor, KeyWrite, TraceError};

/// A message pushed to the monitored program.
#[derive(Debug, Clone, PartialEq)]
pub enum Notification {
    Violation {
        property: String,
        seq: Option<u64>,
        state: Vec<(String, Json)>,
        detail: String,
    },
    Incompatible {
        property: String,
        seq: Option<u64>,
        state: Vec<(String, Json)>,
        detail: String,
    },
    Error {
        seq: Option<u64>,
        message: String,
    },
    Terminate,
    Report(Report),
}

impl Notification {
    pub fn to_json(&self) -> Json {
        let state_obj = |s: &[(String, Json)]| Json::Object(s.iter().cloned().collect::<Map<_, _>>());
        match self {
            Notification::Violation { property, seq, state, detail }
            | Notification::Incompatible { property, seq, state, detail } => {
                let kind = if matches!(self, Notification::Violation { .. }) { "violation" } else { "incompatible" };
                json!({"type": kind, "property": property, "seq": seq, "state": state_obj(state), "detail": detail})
            }
            Notification::Error { seq, message } => json!({"type": "error", "seq": seq, "message": message}),
            Notification::Terminate => json!({"type": "terminate"}),
            Notification::Report(r) => r.to_json(),
        }
    }
}

/// Final verdicts of a session.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub verdicts: Vec<(String, Verdict)>,
    pub events: u64,
    pub writes: u64,
    /// States of the session model.
    pub states: usize,
    pub validity_checks: usize,
    pub terminated: bool,
}

impl Report {
    pub fn to_json(&self) -> Json {
        let verdicts: Vec<Json> = self.verdicts.iter().map(|(n, v)| v.to_json(n)).collect();
        json!({
            "type": "report",
            "events": self.events,
            "writes": self.writes,
            "states": self.states,
            "validityChecks": self.validity_checks,
            "terminated": self.terminated,
            "verdicts": verdicts,
        })
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SessionOptions {
    pub terminate_on_violation: bool,
    pub check: CheckOptions,
}

/// How one (conjunct of a) property is monitored.
enum Monitor {
    /// `G[q]` over a state formula: decided once per new abstract state of
    /// the attributes `q` mentions.
    StateG {
        restriction: Restriction,
        builder: AsmBuilder,
        validity: Validity,
        attrs: Vec<usize>,
    },
    /// `G[q]` with primed attributes: evaluated one write late, when the
    /// successor is known.
    StepG { body: Expr },
    /// `F[q]` over a state formula.
    Eventually { body: Expr },
    /// `P[f1 ~~> f2 ~~> f3]` on its path model: each new edge is checked.
    Path { builder: PathBuilder },
    /// Anything else is checked on the recorded linear model at the end.
    Deferred { prop: Expr },
}

struct Part {
    text: String,
    monitor: Monitor,
    violated: Option<Verdict>,
    incompatible: Option<Verdict>,
    satisfied: bool,
    checks: usize,
}

struct Property {
    name: String,
    parts: Vec<Part>,
}

/// State of one online verification session. Pure: feeding the same lines
/// yields the same notifications.
pub struct Session {
    spec: Spec,
    opts: SessionOptions,
    extractor: Extractor,
    props: Vec<Property>,
    current: StateVector,
    /// Seq of the write that produced `current`.
    current_seq: Option<u64>,
    model: SessionModel,
    recorded: Option<Vec<KeyWrite>>,
    last_seq: Option<u64>,
    lines: usize,
    events: u64,
    writes: u64,
    terminated: bool,
}

enum SessionModel {
    Abstract(Restriction, AsmBuilder),
    Distinct(GraphBuilder),
}

impl Session {
    pub fn new(spec: Spec, opts: SessionOptions) -> Result<Session, PipelineError> {
        let mut props = Vec::new();
        let mut record = false;
        for decl in spec.props() {
            let exprs = if matches!(decl.expr, Expr::P(_)) { vec![decl.expr.clone()] } else { normalize(&decl.expr) };
            let mut parts = Vec::new();
            for e in exprs {
                let monitor = monitor_for(&spec, decl, &e)?;
                record |= matches!(monitor, Monitor::Deferred { .. });
                parts.push(Part {
                    text: pretty_print(&e),
                    monitor,
                    violated: None,
                    incompatible: None,
                    satisfied: false,
                    checks: 0,
                });
            }
            props.push(Property {
                name: decl.name.clone(),
                parts,
            });
        }
        let model = if spec.has_abstraction() {
            let r = spec.restrict(&spec.abstracted());
            let b = AsmBuilder::new(r.schema(), r.functions().to_vec()).map_err(PipelineError::Config)?;
            SessionModel::Abstract(r, b)
        } else {
            SessionModel::Distinct(GraphBuilder::new(GraphModel::new(
                ModelKind::Dsm,
                spec.schema().clone(),
                Annotation::Concrete,
                initial_state(spec.schema()),
            )))
        };
        let mut s = Session {
            extractor: spec.extractor(),
            current: initial_state(spec.schema()),
            current_seq: None,
            spec,
            opts,
            props,
            model,
            recorded: record.then(Vec::new),
            last_seq: None,
            lines: 0,
            events: 0,
            writes: 0,
            terminated: false,
        };
        // Top-level eventualities may already hold in the initial state.
        let mut out = Vec::new();
        s.eventualities(&mut out)?;
        Ok(s)
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// Validity decisions made so far.
    pub fn validity_checks(&self) -> usize {
        self.props.iter().flat_map(|p| &p.parts).map(|p| p.checks).sum()
    }

    /// The session model: the abstract model over the attributes with an
    /// `abs` declaration, or the distinct state model.
    pub fn model(&self) -> &GraphModel {
        match &self.model {
            SessionModel::Abstract(_, b) => b.model(),
            SessionModel::Distinct(b) => b.model(),
        }
    }

    /// Decode and ingest one trace record.
    pub fn ingest_line(&mut self, line: &str) -> Vec<Notification> {
        self.lines += 1;
        if line.trim().is_empty() {
            return Vec::new();
        }
        match parse_event_at(line.trim(), self.lines) {
            Ok(ev) => self.ingest(&ev),
            Err(e) => vec![Notification::Error {
                seq: None,
                message: e.to_string(),
            }],
        }
    }

    pub fn ingest(&mut self, event: &Event) -> Vec<Notification> {
        let mut out = Vec::new();
        if self.terminated {
            return out;
        }
        if let Some(prev) = self.last_seq {
            if event.seq <= prev {
                out.push(Notification::Error {
                    seq: Some(event.seq),
                    message: TraceError::SeqOrder { prev, seq: event.seq }.to_string(),
                });
                return out;
            }
        }
        self.last_seq = Some(event.seq);
        if !self.spec.filter().admits(event) {
            return out;
        }
        self.events += 1;
        let writes = match self.extractor.process(event) {
            Ok(w) => w,
            Err(e) => {
                out.push(Notification::Error {
                    seq: Some(event.seq),
                    message: e.to_string(),
                });
                return out;
            }
        };
        for w in writes {
            if let Err(e) = self.apply(&w, &mut out) {
                out.push(Notification::Error {
                    seq: Some(w.seq),
                    message: e.to_string(),
                });
            }
            if self.terminated {
                break;
            }
        }
        out
    }

    fn apply(&mut self, w: &KeyWrite, out: &mut Vec<Notification>) -> Result<(), PipelineError> {
        self.writes += 1;
        match &mut self.model {
            SessionModel::Abstract(r, b) => {
                if let Some(rw) = r.map(w) {
                    b.push(&rw)?;
                }
            }
            SessionModel::Distinct(b) => {
                b.push(w.seq, w.attr, Cell::Concrete(w.value.clone()));
            }
        }
        if let Some(rec) = &mut self.recorded {
            rec.push(w.clone());
        }

        let schema = self.spec.schema().clone();
        let new_cell = Cell::Concrete(w.value.clone());
        let violations_before = out.len();
        for prop in &mut self.props {
            for part in &mut prop.parts {
                if part.violated.is_some() {
                    continue;
                }
                match &mut part.monitor {
                    Monitor::StateG { restriction, builder, validity, attrs } => {
                        let Some(rw) = restriction.map(w) else { continue };
                        let pushed = builder.push(&rw)?;
                        if !pushed.new_state {
                            continue;
                        }
                        let model = builder.model();
                        let cells = model.state(pushed.to);
                        let Some(cs) = constraints(builder.functions(), cells, attrs)? else { continue };
                        part.checks += 1;
                        let (t, atom) = validity.decide_partial(&cs)?;
                        let state = render_state(model.schema(), Some(model.annotation()), cells);
                        let witness = Witness {
                            state: pushed.to,
                            seq: Some(w.seq),
                            vector: state.clone(),
                            cells: cells.clone(),
                            failing: part.text.clone(),
                            from: None,
                        };
                        match t {
                            Truth::T => {}
                            Truth::F => {
                                let detail = format!("new abstract state {} violates `{}`", pushed.to, part.text);
                                out.push(Notification::Violation {
                                    property: prop.name.clone(),
                                    seq: Some(w.seq),
                                    state,
                                    detail: detail.clone(),
                                });
                                part.violated = Some(Verdict::fails(witness, detail));
                            }
                            Truth::U => {
                                if part.incompatible.is_none() {
                                    let detail = format!(
                                        "the abstraction cannot decide `{}` in abstract state {}",
                                        atom.unwrap_or_else(|| part.text.clone()),
                                        pushed.to
                                    );
                                    out.push(Notification::Incompatible {
                                        property: prop.name.clone(),
                                        seq: Some(w.seq),
                                        state,
                                        detail: detail.clone(),
                                    });
                                    let mut v = Verdict::new(VerdictValue::Incompatible, detail);
                                    v.witness = Some(witness);
                                    part.incompatible = Some(v);
                                }
                            }
                        }
                    }
                    Monitor::StepG { body } => {
                        let next = Patched {
                            base: &self.current,
                            attr: w.attr,
                            cell: &new_cell,
                        };
                        let frame = Frame {
                            schema: &schema,
                            cur: &self.current,
                            next: Some(&next as &dyn StateView),
                            pos: 0,
                            seq: self.current_seq,
                        };
                        let t = frame.truth(body, &NoTemporal).map_err(CheckError::from)?;
                        if t == Truth::F || (t == Truth::U && self.opts.check.strict_undefined) {
                            let state = render_state(&schema, None, &self.current);
                            let detail = format!("`{}` fails before the write at seq {}", part.text, w.seq);
                            out.push(Notification::Violation {
                                property: prop.name.clone(),
                                seq: self.current_seq,
                                state: state.clone(),
                                detail: detail.clone(),
                            });
                            let witness = Witness {
                                state: 0,
                                seq: self.current_seq,
                                vector: state,
                                cells: self.current.clone(),
                                failing: part.text.clone(),
                                from: None,
                            };
                            part.violated = Some(Verdict::fails(witness, detail));
                        }
                    }
                    Monitor::Path { builder } => {
                        let Some(pushed) = builder.push(w)? else { continue };
                        let m = builder.model();
                        if pushed.new_edge
                            && slot_of(m.state(pushed.from)) == Some(PathSlot::F1)
                            && slot_of(m.state(pushed.to)) == Some(PathSlot::F3)
                        {
                            let cells = m.state(pushed.to).clone();
                            let state = render_state(m.schema(), Some(m.annotation()), &cells);
                            let detail = format!("f3 reached directly from f1 at seq {}", w.seq);
                            out.push(Notification::Violation {
                                property: prop.name.clone(),
                                seq: Some(w.seq),
                                state: state.clone(),
                                detail: detail.clone(),
                            });
                            let witness = Witness {
                                state: pushed.to,
                                seq: Some(w.seq),
                                vector: state,
                                cells,
                                failing: part.text.clone(),
                                from: Some(checker::render_text(m.schema(), Some(m.annotation()), m.state(pushed.from))),
                            };
                            part.violated = Some(Verdict::fails(witness, detail));
                        }
                    }
                    Monitor::Eventually { .. } | Monitor::Deferred { .. } => {}
                }
            }
        }
        self.current[w.attr] = new_cell;
        self.current_seq = Some(w.seq);
        self.eventualities(out)?;
        if self.opts.terminate_on_violation
            && out[violations_before..].iter().any(|n| matches!(n, Notification::Violation { .. }))
        {
            out.push(Notification::Terminate);
            self.terminated = true;
        }
        Ok(())
    }

    fn eventualities(&mut self, _out: &mut Vec<Notification>) -> Result<(), PipelineError> {
        let frame = Frame {
            schema: self.spec.schema(),
            cur: &self.current,
            next: None,
            pos: 0,
            seq: self.current_seq,
        };
        for part in self.props.iter_mut().flat_map(|p| &mut p.parts) {
            if let Monitor::Eventually { body } = &part.monitor {
                if !part.satisfied && frame.truth(body, &NoTemporal).map_err(CheckError::from)? == Truth::T {
                    part.satisfied = true;
                }
            }
        }
        Ok(())
    }

    /// Final verdicts. Eventualities not yet satisfied are pending.
    pub fn finalize(&mut self) -> Report {
        let schema = self.spec.schema().clone();
        let lsm = self.recorded.as_ref().map(|w| build_lsm(&schema, w.iter().cloned()));
        let mut verdicts = Vec::new();
        let mut total = 0;
        for prop in &self.props {
            let mut parts = Vec::new();
            for part in &prop.parts {
                total += part.checks;
                let mut v = if let Some(v) = &part.violated {
                    v.clone()
                } else if let Some(v) = &part.incompatible {
                    v.clone()
                } else {
                    match &part.monitor {
                        Monitor::Eventually { .. } if part.satisfied => Verdict::holds("satisfied"),
                        Monitor::Eventually { .. } => {
                            Verdict::new(VerdictValue::Pending, "not satisfied before the stream ended")
                        }
                        Monitor::Deferred { prop } => {
                            let lsm = lsm.as_ref().expect("deferred properties record the stream");
                            match check_lsm(lsm, prop, &self.opts.check) {
                                Ok(v) if v.value == VerdictValue::False && has_eventuality(prop) => Verdict::new(
                                    VerdictValue::Pending,
                                    format!("unresolved when the stream ended: {}", v.detail),
                                ),
                                Ok(v) => v,
                                Err(e) => Verdict::new(VerdictValue::Pending, format!("not checked: {e}")),
                            }
                        }
                        _ => Verdict::holds("no violation observed"),
                    }
                };
                v.validity_checks = part.checks;
                parts.push(v);
            }
            verdicts.push((prop.name.clone(), merge(parts)));
        }
        Report {
            verdicts,
            events: self.events,
            writes: self.writes,
            states: self.model().state_count(),
            validity_checks: total,
            terminated: self.terminated,
        }
    }
}

fn merge(mut parts: Vec<Verdict>) -> Verdict {
    if parts.len() == 1 {
        return parts.pop().unwrap();
    }
    let checks = parts.iter().map(|v| v.validity_checks).sum();
    let rank = |v: &Verdict| match v.value {
        VerdictValue::False => 0,
        VerdictValue::Incompatible => 1,
        VerdictValue::Pending => 2,
        VerdictValue::True => 3,
    };
    let best = (0..parts.len())
        .min_by_key(|&i| (rank(&parts[i]), parts[i].witness_seq().unwrap_or(u64::MAX)))
        .unwrap();
    let mut v = if parts[best].value == VerdictValue::True {
        Verdict::holds(format!("all {} conjuncts hold", parts.len()))
    } else {
        parts.swap_remove(best)
    };
    v.validity_checks = checks;
    v
}

fn has_eventuality(e: &Expr) -> bool {
    matches!(e, Expr::F(_)) || e.children().into_iter().any(has_eventuality)
}

fn monitor_for(spec: &Spec, decl: &crate::specfile::PropDecl, e: &Expr) -> Result<Monitor, PipelineError> {
    let schema = spec.schema();
    Ok(match e {
        Expr::P(_) => match spec.path_spec(decl) {
            Ok((ps, attr)) => Monitor::Path {
                builder: PathBuilder::new(ps, attr),
            },
            Err(_) => Monitor::Deferred { prop: e.clone() },
        },
        Expr::G(q) if !q.contains_temporal() && q.contains_primed() => Monitor::StepG { body: (**q).clone() },
        Expr::G(q) if !q.contains_temporal() => {
            let attrs: Vec<usize> = q.free_vars().iter().filter_map(|v| schema.index(v)).collect();
            let restriction = spec.restrict(&attrs);
            match Validity::compile(q, restriction.schema()) {
                Ok(validity) => {
                    let builder = AsmBuilder::new(restriction.schema(), restriction.functions().to_vec())
                        .map_err(PipelineError::Config)?;
                    let attrs = validity.attrs();
                    Monitor::StateG {
                        restriction,
                        builder,
                        validity,
                        attrs,
                    }
                }
                Err(_) => Monitor::Deferred { prop: e.clone() },
            }
        }
        Expr::F(q) if !q.contains_temporal() && !q.contains_primed() => Monitor::Eventually { body: (**q).clone() },
        other => Monitor::Deferred { prop: other.clone() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = "key r = db.Database.r : int\n\
        key w = db.Database.w : int\n\
        abs r = range[0:1]\n\
        abs w = range[0:1:2]\n\
        prop excl = G[r > 0 -> w == 0]\n\
        prop step = G[w' <= w + 1]\n\
        prop reach = F[w == 1]";

    fn rec(seq: u64, field: &str, v: i64) -> String {
        format!(
            r#"{{"seq":{seq},"kind":"fieldWrite","thread":"t","class":"db.Database","instance":1,"field":"{field}","value":{{"t":"int","v":{v}}}}}"#
        )
    }

    fn session(opts: SessionOptions) -> Session {
        Session::new(Spec::parse(SPEC).unwrap(), opts).unwrap()
    }

    #[test]
    fn violations_are_reported_as_they_happen() {
        let mut s = session(SessionOptions::default());
        assert!(s.ingest_line(&rec(1, "r", 0)).is_empty());
        assert!(s.ingest_line(&rec(2, "w", 1)).is_empty());
        let n = s.ingest_line(&rec(3, "r", 3));
        assert!(matches!(&n[..], [Notification::Violation { property, seq: Some(3), .. }] if property == "excl"));
        let n = s.ingest_line(&rec(4, "w", 5));
        assert!(matches!(&n[..], [Notification::Violation { property, seq: Some(3), .. }] if property == "step"));
        // already violated properties stay quiet
        assert!(s.ingest_line(&rec(5, "r", 4)).is_empty());
        let r = s.finalize();
        assert_eq!(r.verdict("excl").unwrap().value, VerdictValue::False);
        assert_eq!(r.verdict("step").unwrap().witness_seq(), Some(3));
        assert!(r.verdict("reach").unwrap().is_true());
        assert_eq!((r.events, r.writes), (5, 5));
    }

    #[test]
    fn unresolved_eventualities_are_pending() {
        let mut s = session(SessionOptions::default());
        s.ingest_line(&rec(1, "r", 1));
        let r = s.finalize();
        assert_eq!(r.verdict("reach").unwrap().value, VerdictValue::Pending);
        assert!(r.verdict("excl").unwrap().is_true());
    }

    #[test]
    fn bad_records_do_not_end_the_session() {
        let mut s = session(SessionOptions::default());
        s.ingest_line(&rec(2, "r", 0));
        let n = s.ingest_line(&rec(1, "r", 0));
        assert!(matches!(&n[..], [Notification::Error { seq: Some(1), .. }]));
        let n = s.ingest_line("{not json");
        assert!(matches!(&n[..], [Notification::Error { seq: None, .. }]));
        s.ingest_line(&rec(3, "w", 1));
        assert_eq!(s.finalize().writes, 2);
    }

    #[test]
    fn termination_stops_ingestion() {
        let mut s = session(SessionOptions {
            terminate_on_violation: true,
            ..Default::default()
        });
        s.ingest_line(&rec(1, "w", 1));
        let n = s.ingest_line(&rec(2, "r", 1));
        assert_eq!(n.last(), Some(&Notification::Terminate));
        assert!(s.is_terminated());
        assert!(s.ingest_line(&rec(3, "r", 0)).is_empty());
        assert!(s.finalize().terminated);
    }

    #[test]
    fn coarse_abstraction_is_flagged_once() {
        let spec = "key r = db.Database.r : int\n\
            abs r = range[0:10]\n\
            prop small = G[r < 5]";
        let mut s = Session::new(Spec::parse(spec).unwrap(), SessionOptions::default()).unwrap();
        let n = s.ingest_line(&rec(1, "r", 3));
        assert!(matches!(&n[..], [Notification::Incompatible { .. }]));
        assert!(s.ingest_line(&rec(2, "r", 4)).is_empty());
        let r = s.finalize();
        assert_eq!(r.verdict("small").unwrap().value, VerdictValue::Incompatible);
        assert_eq!(r.validity_checks, 1);
    }

    #[test]
    fn nested_properties_are_checked_at_the_end() {
        let spec = "key r = db.Database.r : int\n\
            prop resp = G[r == 1 -> F[r == 0]]";
        let mut s = Session::new(Spec::parse(spec).unwrap(), SessionOptions::default()).unwrap();
        s.ingest_line(&rec(1, "r", 1));
        s.ingest_line(&rec(2, "r", 0));
        assert!(s.finalize().verdict("resp").unwrap().is_true());
        s.ingest_line(&rec(3, "r", 1));
        assert_eq!(s.finalize().verdict("resp").unwrap().value, VerdictValue::Pending);
    }
}
