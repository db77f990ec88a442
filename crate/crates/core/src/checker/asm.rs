use super::truth::Truth;
use super::validity::Validity;
use super::verdict::{render_state, render_text, Verdict, VerdictValue, Witness};
use super::CheckError;
use crate::abstraction::{AbsForm, AbstractValue, AbstractionFunction, Constraint};
use crate::model::{Annotation, Cell, GraphModel};
use crate::propspec::{pretty_print, Expr};

/// Check `G[q]` on an abstract model whose functions are all boolean
/// predicates or identities.
pub fn check_asm_bool(m: &GraphModel, p: &Expr) -> Result<Verdict, CheckError> {
    let fns = functions(m)?;
    if let Some(f) = fns.iter().find(|f| matches!(f.form, AbsForm::Range(_))) {
        return Err(CheckError::Rejected(format!(
            "`{}` uses a range abstraction; use multi-valued checking",
            f.attr
        )));
    }
    check_abstract(m, fns, p)
}

/// Check `G[q]` on an abstract model with boolean, range or identity
/// functions.
pub fn check_asm_multi(m: &GraphModel, p: &Expr) -> Result<Verdict, CheckError> {
    let fns = functions(m)?;
    check_abstract(m, fns, p)
}

fn functions(m: &GraphModel) -> Result<&[AbstractionFunction], CheckError> {
    match m.annotation() {
        Annotation::Abstractions(fns) => Ok(fns),
        _ => Err(CheckError::Rejected(format!(
            "a {} model carries no abstraction functions",
            m.kind()
        ))),
    }
}

/// Per-attribute constraints of an abstract state, `None` for attributes
/// not written yet. The whole result is `None` when none of `attrs` has
/// been written, leaving nothing to decide.
pub(crate) fn constraints(
    fns: &[AbstractionFunction],
    cells: &[Cell],
    attrs: &[usize],
) -> Result<Option<Vec<Option<Constraint>>>, CheckError> {
    let mut out: Vec<Option<Constraint>> = fns.iter().map(|f| Some(Constraint::full(f.tag))).collect();
    let mut written = false;
    for &a in attrs {
        out[a] = match &cells[a] {
            Cell::Undefined | Cell::Abstract(AbstractValue::Unknown) => None,
            Cell::Abstract(av) => Some(fns[a].characteristic(av)?),
            Cell::Concrete(v) => Some(Constraint::singleton(v)),
        };
        written |= out[a].is_some();
    }
    Ok(written.then_some(out))
}

fn check_abstract(m: &GraphModel, fns: &[AbstractionFunction], p: &Expr) -> Result<Verdict, CheckError> {
    let q = match p {
        Expr::G(q) => q.as_ref(),
        _ => {
            return Err(CheckError::Rejected(format!(
                "`{}` is not abstractly checkable: only G[..] can be checked on an abstract model",
                pretty_print(p)
            )))
        }
    };
    let validity = Validity::compile(q, m.schema())?;
    let attrs = validity.attrs();
    let mut checks = 0usize;
    let mut skipped = 0usize;
    let mut undecided: Option<(usize, String)> = None;
    for (i, cells) in m.states().iter().enumerate() {
        let Some(cs) = constraints(fns, cells, &attrs)? else {
            skipped += 1;
            continue;
        };
        checks += 1;
        let (t, atom) = validity.decide_partial(&cs)?;
        match t {
            Truth::T => {}
            Truth::F => {
                let w = witness(m, i, pretty_print(q));
                let detail = format!(
                    "every concrete state abstracted by state {i} ({}) violates the property",
                    render_text(m.schema(), Some(m.annotation()), cells)
                );
                let mut v = Verdict::fails(w, detail);
                v.validity_checks = checks;
                return Ok(v);
            }
            Truth::U => {
                if undecided.is_none() {
                    undecided = Some((i, atom.unwrap_or_else(|| pretty_print(q))));
                }
            }
        }
    }
    let mut v = match undecided {
        Some((i, atom)) => {
            let detail = format!(
                "the abstraction cannot decide `{atom}` in state {i} ({}); reformulate the abstraction",
                render_text(m.schema(), Some(m.annotation()), m.state(i))
            );
            Verdict {
                value: VerdictValue::Incompatible,
                witness: Some(witness(m, i, atom)),
                detail,
                validity_checks: 0,
            }
        }
        None => Verdict::holds(format!(
            "valid in {checks} abstract states ({skipped} without any written attribute skipped)"
        )),
    };
    v.validity_checks = checks;
    Ok(v)
}

fn witness(m: &GraphModel, i: usize, failing: String) -> Witness {
    let cells = m.state(i).clone();
    Witness {
        state: i,
        seq: m.first_seq(i),
        vector: render_state(m.schema(), Some(m.annotation()), &cells),
        cells,
        failing,
        from: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::build_asm;
    use crate::model::Schema;
    use crate::propspec::parse_property;
    use crate::trace::KeyWrite;
    use crate::value::{Value, ValueTag};

    fn writes(vals: &[(usize, i64)]) -> Vec<KeyWrite> {
        vals.iter()
            .enumerate()
            .map(|(i, &(attr, v))| KeyWrite {
                seq: i as u64 + 1,
                attr,
                value: Value::Int(v),
            })
            .collect()
    }

    fn rw_schema() -> Schema {
        Schema::new(vec![("r".into(), ValueTag::Int), ("w".into(), ValueTag::Int)])
    }

    #[test]
    fn multi_valued_readers_writers() {
        let s = rw_schema();
        let fns = vec![
            AbstractionFunction::parse("r", ValueTag::Int, "range[0:1]").unwrap(),
            AbstractionFunction::parse("w", ValueTag::Int, "range[0:1:2]").unwrap(),
        ];
        let m = build_asm(&s, fns, writes(&[(0, 0), (1, 0), (0, 1), (0, 3), (0, 0), (1, 1), (1, 0)])).unwrap();
        let p = parse_property("G[(r > 0 -> w == 0) && r >= 0 && (w == 0 || w == 1)]").unwrap();
        let v = check_asm_multi(&m, &p).unwrap();
        assert!(v.is_true(), "{}", v.detail);
        // Every state but the start has a written attribute.
        assert_eq!(v.validity_checks, m.state_count() - 1);
        assert!(check_asm_bool(&m, &p).is_err());
    }

    #[test]
    fn unwritten_attributes_are_undefined_not_skipped() {
        let s = rw_schema();
        let fns = vec![
            AbstractionFunction::parse("r", ValueTag::Int, "range[0:1]").unwrap(),
            AbstractionFunction::parse("w", ValueTag::Int, "range[0:1:2]").unwrap(),
        ];
        // Only w is ever written, so `r` stays undefined.
        let m = build_asm(&s, fns, writes(&[(1, 0), (1, 1)])).unwrap();
        let and = parse_property("G[r > 0 && w > 0]").unwrap();
        let v = check_asm_multi(&m, &and).unwrap();
        assert_eq!(v.value, VerdictValue::False, "{}", v.detail);
        let or = parse_property("G[r > 0 || w >= 0]").unwrap();
        assert!(check_asm_multi(&m, &or).unwrap().is_true());
    }

    #[test]
    fn coarse_abstraction_is_incompatible() {
        let s = Schema::new(vec![("k".into(), ValueTag::Int)]);
        let fns = vec![AbstractionFunction::parse("k", ValueTag::Int, "bool(k >= 0)").unwrap()];
        let m = build_asm(&s, fns, writes(&[(0, 1), (0, 2)])).unwrap();
        let v = check_asm_bool(&m, &parse_property("G[k == 1]").unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::Incompatible);
        assert!(v.detail.contains("k == 1"));
        let v = check_asm_bool(&m, &parse_property("G[k < 0]").unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::False);
        assert_eq!(v.witness_seq(), Some(1));
    }

    #[test]
    fn abstract_checking_rejects_path_and_primed_properties() {
        let s = Schema::new(vec![("k".into(), ValueTag::Int)]);
        let fns = vec![AbstractionFunction::parse("k", ValueTag::Int, "bool(k > 0)").unwrap()];
        let m = build_asm(&s, fns, writes(&[(0, 1)])).unwrap();
        for src in ["F[k > 0]", "G[k' > 0]", "G[k > 0 -> F[k > 1]]"] {
            let err = check_asm_bool(&m, &parse_property(src).unwrap()).unwrap_err();
            assert!(err.to_string().contains("not abstractly checkable"), "{src}: {err}");
        }
    }
}
