use std::fmt;

use super::{AbstractValue, AbstractionError, PathSlot};
use crate::model::{Annotation, Cell, GraphBuilder, GraphModel, ModelKind, Pushed, Schema};
use crate::propspec::{pretty_print, BinOp, Expr};
use crate::trace::KeyWrite;
use crate::value::{Value, ValueTag};

/// The three waypoint predicates of a path abstraction, each a disjunction
/// of `attr == constant` atoms on one control attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub attr: String,
    pub tag: ValueTag,
    pub slots: [Vec<Value>; 3],
}

impl PathSpec {
    /// Build from the three slot expressions of a `P[f1 ~~> f2 ~~> f3]`.
    pub fn from_slots(attr: &str, tag: ValueTag, exprs: &[Expr; 3]) -> Result<PathSpec, String> {
        let mut slots: [Vec<Value>; 3] = Default::default();
        for (k, e) in exprs.iter().enumerate() {
            collect_atoms(e, attr, tag, &mut slots[k])?;
            slots[k].sort();
            slots[k].dedup();
        }
        let spec = PathSpec {
            attr: attr.to_owned(),
            tag,
            slots,
        };
        for a in 0..3 {
            for b in a + 1..3 {
                if let Some(v) = spec.slots[a].iter().find(|v| spec.slots[b].contains(v)) {
                    return Err(format!(
                        "path predicates f{} and f{} both accept {v}; they must be disjoint",
                        a + 1,
                        b + 1
                    ));
                }
            }
        }
        Ok(spec)
    }

    /// Path spec of a `P` property, inferring the control attribute from its
    /// atoms.
    pub fn from_property(p: &Expr, schema: &Schema) -> Result<PathSpec, String> {
        let Expr::P(slots) = p else {
            return Err("path abstraction needs a P[...] property".into());
        };
        let vars = p.free_vars();
        if vars.len() != 1 {
            return Err(format!(
                "path abstraction needs atoms over exactly one attribute, found {}",
                vars.len()
            ));
        }
        let attr = vars.into_iter().next().unwrap();
        let idx = schema
            .index(&attr)
            .ok_or_else(|| format!("`{attr}` is not a state attribute"))?;
        PathSpec::from_slots(&attr, schema.tag(idx), slots)
    }

    /// Which waypoint a control value satisfies.
    pub fn classify(&self, v: &Value) -> Result<Option<PathSlot>, AbstractionError> {
        let hits: Vec<usize> = (0..3).filter(|k| self.slots[*k].contains(v)).collect();
        match hits.as_slice() {
            [] => Ok(None),
            [k] => Ok(Some(PathSlot::from_index(*k))),
            _ => Err(AbstractionError::Disjointness {
                value: v.to_string(),
            }),
        }
    }

    pub fn slot_expr(&self, k: usize) -> Expr {
        let atoms = self.slots[k].iter().map(|v| {
            Expr::bin(BinOp::Eq, Expr::var(&self.attr), match v {
                Value::Str(s) => Expr::Str(s.clone()),
                Value::Int(i) => Expr::Int(*i),
                Value::Real(r) => Expr::Real(*r),
                Value::Bool(b) => Expr::Bool(*b),
                Value::IntList(l) => Expr::List(l.iter().map(|i| Expr::Int(*i)).collect()),
            })
        });
        atoms
            .reduce(|a, b| Expr::bin(BinOp::Or, a, b))
            .unwrap_or(Expr::Bool(false))
    }

    pub fn to_property(&self) -> Expr {
        Expr::p(self.slot_expr(0), self.slot_expr(1), self.slot_expr(2))
    }

    pub fn label(&self, slot: PathSlot) -> String {
        pretty_print(&self.slot_expr(slot.index()))
    }
}

impl fmt::Display for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", pretty_print(&self.to_property()))
    }
}

fn collect_atoms(e: &Expr, attr: &str, tag: ValueTag, out: &mut Vec<Value>) -> Result<(), String> {
    match e {
        Expr::Binary {
            op: BinOp::Or,
            lhs,
            rhs,
        } => {
            collect_atoms(lhs, attr, tag, out)?;
            collect_atoms(rhs, attr, tag, out)
        }
        Expr::Binary {
            op: BinOp::Eq,
            lhs,
            rhs,
        } => {
            let c = match (&**lhs, &**rhs) {
                (Expr::Var { name, primed: false }, c) | (c, Expr::Var { name, primed: false })
                    if name == attr =>
                {
                    c
                }
                _ => return Err(format!("`{}` is not `{attr} == constant`", pretty_print(e))),
            };
            let v = match (c, tag) {
                (Expr::Str(s), ValueTag::Str) => Value::Str(s.clone()),
                (Expr::Int(i), ValueTag::Int) => Value::Int(*i),
                (Expr::Int(i), ValueTag::Real) => Value::Real(*i as f64),
                (Expr::Real(r), ValueTag::Real) => Value::Real(*r),
                (Expr::Bool(b), ValueTag::Bool) => Value::Bool(*b),
                _ => {
                    return Err(format!(
                        "`{}` does not compare `{attr}` with a {tag} constant",
                        pretty_print(e)
                    ))
                }
            };
            out.push(v);
            Ok(())
        }
        other => Err(format!(
            "path predicates are disjunctions of `{attr} == constant`, got `{}`",
            pretty_print(other)
        )),
    }
}

/// Incremental path-model construction over writes to the control
/// attribute.
#[derive(Debug, Clone)]
pub struct PathBuilder {
    spec: PathSpec,
    attr: usize,
    graph: GraphBuilder,
}

impl PathBuilder {
    /// `attr` is the control attribute's index in the write stream.
    pub fn new(spec: PathSpec, attr: usize) -> PathBuilder {
        let schema = Schema::new(vec![(spec.attr.clone(), spec.tag)]);
        let model = GraphModel::new(
            ModelKind::Path,
            schema,
            Annotation::Path(spec.clone()),
            vec![Cell::Abstract(AbstractValue::Unknown)],
        );
        PathBuilder {
            spec,
            attr,
            graph: GraphBuilder::new(model),
        }
    }

    /// Feed one write; writes to other attributes and values outside
    /// f1 ∨ f2 ∨ f3 are skipped.
    pub fn push(&mut self, w: &KeyWrite) -> Result<Option<Pushed>, AbstractionError> {
        if w.attr != self.attr {
            return Ok(None);
        }
        Ok(self.spec.classify(&w.value)?.map(|slot| {
            self.graph
                .move_to(w.seq, vec![Cell::Abstract(AbstractValue::Slot(slot))])
        }))
    }

    pub fn model(&self) -> &GraphModel {
        self.graph.model()
    }

    pub fn spec(&self) -> &PathSpec {
        &self.spec
    }

    pub fn finish(self) -> GraphModel {
        self.graph.finish()
    }
}

/// Retain control values satisfying one of the waypoints, merge them by
/// waypoint, and link consecutive retained values.
pub fn build_path_model<I>(spec: &PathSpec, attr: usize, writes: I) -> Result<GraphModel, AbstractionError>
where
    I: IntoIterator<Item = KeyWrite>,
{
    let mut b = PathBuilder::new(spec.clone(), attr);
    for w in writes {
        b.push(&w)?;
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propspec::parse_property;

    fn spec(text: &str) -> PathSpec {
        let Expr::P(slots) = parse_property(text).unwrap() else { panic!() };
        PathSpec::from_slots("s", ValueTag::Str, &slots).unwrap()
    }

    fn w(seq: u64, s: &str) -> KeyWrite {
        KeyWrite {
            seq,
            attr: 0,
            value: Value::Str(s.into()),
        }
    }

    #[test]
    fn merges_by_waypoint() {
        let sp = spec(r#"P[s == "a" || s == "a2" ~~> s == "b" ~~> s == "c"]"#);
        let m = build_path_model(&sp, 0, vec![w(1, "a"), w(2, "x"), w(3, "b"), w(4, "a2"), w(5, "b"), w(6, "c")])
            .unwrap();
        assert_eq!(m.state_count(), 4);
        let node = |k| m.lookup(&[Cell::Abstract(AbstractValue::Slot(PathSlot::from_index(k)))]).unwrap();
        assert_eq!(m.edge(node(0), node(1)).unwrap().count, 2);
        assert!(m.edge(node(0), node(2)).is_none());
        assert_eq!(m.edge(0, node(0)).unwrap().count, 1);
    }

    #[test]
    fn direct_edge_from_first_to_third() {
        let sp = spec(r#"P[s == "a" ~~> s == "b" ~~> s == "c"]"#);
        let m = build_path_model(&sp, 0, vec![w(1, "a"), w(2, "x"), w(3, "c")]).unwrap();
        assert_eq!(m.state_count(), 3);
        assert!(m.edge(1, 2).is_some());
    }

    #[test]
    fn overlapping_waypoints_are_rejected() {
        let Expr::P(slots) = parse_property(r#"P[s == "a" ~~> s == "a" ~~> s == "c"]"#).unwrap() else {
            panic!()
        };
        let err = PathSpec::from_slots("s", ValueTag::Str, &slots).unwrap_err();
        assert!(err.contains("\"a\""), "{err}");
        let Expr::P(slots) = parse_property(r#"P[s != "a" ~~> s == "b" ~~> s == "c"]"#).unwrap() else {
            panic!()
        };
        assert!(PathSpec::from_slots("s", ValueTag::Str, &slots).is_err());
    }
}
