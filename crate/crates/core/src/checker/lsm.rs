use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::eval::{EvalError, Frame, NoTemporal, Patched, StateView, TemporalHook, Val};
use super::truth::Truth;
use super::verdict::{render_state, render_text, Verdict, VerdictValue, Witness};
use super::{CheckError, CheckOptions};
use crate::model::{Cell, Lsm};
use crate::propspec::{pretty_print, BinOp, Expr};

/// Visit every LSM state in order with the step to its successor applied
/// as the primed view. `visit` returns `false` to stop early.
pub(crate) fn walk<F>(lsm: &Lsm, mut visit: F) -> Result<(), CheckError>
where
    F: FnMut(&Frame<'_>) -> Result<bool, CheckError>,
{
    let mut c = lsm.cursor();
    loop {
        {
            let patched = c.next_step().map(|s| Patched {
                base: c.state(),
                attr: s.attr,
                cell: &s.new,
            });
            let frame = Frame {
                schema: lsm.schema(),
                cur: c.state(),
                next: patched.as_ref().map(|p| p as &dyn StateView),
                pos: c.pos(),
                seq: lsm.seq_of(c.pos()),
            };
            if !visit(&frame)? {
                return Ok(());
            }
        }
        if !c.advance() {
            return Ok(());
        }
    }
}

pub(crate) fn conjuncts(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Binary {
            op: BinOp::And,
            lhs,
            rhs,
        } => {
            let mut v = conjuncts(lhs);
            v.extend(conjuncts(rhs));
            v
        }
        other => vec![other],
    }
}

fn witness_at(frame: &Frame<'_>, failing: String) -> Witness {
    Witness {
        state: frame.pos,
        seq: frame.seq,
        vector: render_state(frame.schema, None, frame.cur),
        cells: frame.cur.to_vec(),
        failing,
        from: None,
    }
}

fn last_witness(lsm: &Lsm, failing: String) -> Witness {
    let n = lsm.state_count() - 1;
    let cells = lsm.state(n);
    Witness {
        state: n,
        seq: lsm.seq_of(n),
        vector: render_state(lsm.schema(), None, &cells),
        cells,
        failing,
        from: None,
    }
}

/// Evaluates nested G/F at arbitrary positions from per-(node, bindings)
/// tables computed by one forward evaluation pass and one backward fold.
struct Nested<'a> {
    lsm: &'a Lsm,
    memo: RefCell<HashMap<(usize, String), Rc<Vec<Truth>>>>,
}

impl<'a> Nested<'a> {
    fn new(lsm: &'a Lsm) -> Self {
        Nested {
            lsm,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn table(&self, e: &Expr, env: &[(String, Val)]) -> Result<Rc<Vec<Truth>>, EvalError> {
        let key = (e as *const Expr as usize, format!("{env:?}"));
        if let Some(t) = self.memo.borrow().get(&key) {
            return Ok(t.clone());
        }
        let (body, eventually) = match e {
            Expr::F(b) => (b.as_ref(), true),
            Expr::G(b) => (b.as_ref(), false),
            _ => {
                return Err(EvalError {
                    seq: None,
                    message: format!("`{}` cannot be nested inside another operator", pretty_print(e)),
                })
            }
        };
        let mut values = Vec::with_capacity(self.lsm.state_count());
        let mut failure = None;
        walk(self.lsm, |frame| {
            let mut env = env.to_vec();
            match frame.truth_in(body, &mut env, self) {
                Ok(t) => {
                    values.push(t);
                    Ok(true)
                }
                Err(err) => {
                    failure = Some(err);
                    Ok(false)
                }
            }
        })
        .expect("walk visitor does not fail");
        if let Some(err) = failure {
            return Err(err);
        }
        // F: b(i) or F(i+1); G: b(i) and G(i+1), skipping undefined states.
        let mut acc = if eventually { Truth::F } else { Truth::T };
        for v in values.iter_mut().rev() {
            acc = if eventually {
                v.or(acc)
            } else if *v == Truth::U {
                acc
            } else {
                v.and(acc)
            };
            *v = acc;
        }
        let table = Rc::new(values);
        self.memo.borrow_mut().insert(key, table.clone());
        Ok(table)
    }
}

impl TemporalHook for Nested<'_> {
    fn temporal(&self, e: &Expr, env: &[(String, Val)], pos: usize) -> Result<Truth, EvalError> {
        Ok(self.table(e, env)?[pos])
    }
}

/// Check a top-level G, F, P, or a boolean combination of them against
/// the linear model.
pub fn check_lsm(lsm: &Lsm, p: &Expr, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    match p {
        Expr::G(q) => check_g(lsm, q, opts),
        Expr::F(q) => check_f(lsm, q),
        Expr::P(slots) => check_p(lsm, slots),
        Expr::Not(a) => {
            let v = check_lsm(lsm, a, opts)?;
            Ok(match v.value {
                VerdictValue::True => Verdict::fails(
                    last_witness(lsm, pretty_print(p)),
                    format!("`{}` holds", pretty_print(a)),
                ),
                _ => Verdict::holds(format!("`{}` fails", pretty_print(a))),
            })
        }
        Expr::Binary { op, lhs, rhs } if op.is_logical() => {
            let a = check_lsm(lsm, lhs, opts)?;
            let a_true = a.value == VerdictValue::True;
            match op {
                BinOp::And if !a_true => Ok(a),
                BinOp::Or if a_true => Ok(a),
                BinOp::Implies if !a_true => {
                    Ok(Verdict::holds(format!("antecedent `{}` fails", pretty_print(lhs))))
                }
                _ => check_lsm(lsm, rhs, opts),
            }
        }
        _ => Err(CheckError::Rejected(format!(
            "`{}` must be G[..], F[..], P[..] or a boolean combination of them",
            pretty_print(p)
        ))),
    }
}

fn check_g(lsm: &Lsm, q: &Expr, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let hook = Nested::new(lsm);
    let (mut evaluated, mut skipped) = (0usize, 0usize);
    let mut failed = None;
    walk(lsm, |frame| {
        let t = frame.truth(q, &hook)?;
        match t {
            Truth::T => evaluated += 1,
            Truth::U if !opts.strict_undefined => skipped += 1,
            _ => {
                let mut failing = pretty_print(q);
                for c in conjuncts(q) {
                    if frame.truth(c, &hook)? != Truth::T {
                        failing = pretty_print(c);
                        break;
                    }
                }
                let why = if t == Truth::U { "undefined" } else { "false" };
                failed = Some((witness_at(frame, failing), why));
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(match failed {
        Some((w, why)) => {
            let detail = format!("`{}` is {why} at state {}", w.failing, w.state);
            Verdict::fails(w, detail)
        }
        None if evaluated == 0 => Verdict::holds("vacuous: no state had the referenced attributes defined"),
        None => Verdict::holds(format!("holds in {evaluated} states ({skipped} skipped)")),
    })
}

fn check_f(lsm: &Lsm, q: &Expr) -> Result<Verdict, CheckError> {
    let hook = Nested::new(lsm);
    let mut found = None;
    walk(lsm, |frame| {
        if frame.truth(q, &hook)? == Truth::T {
            found = Some((frame.pos, frame.seq));
            return Ok(false);
        }
        Ok(true)
    })?;
    Ok(match found {
        Some((pos, seq)) => Verdict::holds(match seq {
            Some(s) => format!("satisfied at state {pos} (seq {s})"),
            None => format!("satisfied at state {pos}"),
        }),
        None => Verdict::fails(
            last_witness(lsm, pretty_print(q)),
            "never satisfied before the end of the trace",
        ),
    })
}

/// Which of the three waypoint formulas hold in a state, if any. Two or
/// more holding at once violates the disjointness requirement.
pub(crate) fn classify(frame: &Frame<'_>, slots: &[Expr; 3]) -> Result<Option<usize>, CheckError> {
    let mut hit = None;
    for (k, f) in slots.iter().enumerate() {
        if frame.truth(f, &NoTemporal)? == Truth::T {
            if hit.is_some() {
                return Err(CheckError::Disjointness {
                    seq: frame.seq,
                    state: render_text(frame.schema, None, frame.cur),
                });
            }
            hit = Some(k);
        }
    }
    Ok(hit)
}

fn check_p(lsm: &Lsm, slots: &[Expr; 3]) -> Result<Verdict, CheckError> {
    if let Some(f) = slots.iter().find(|f| f.contains_temporal()) {
        return Err(CheckError::Rejected(format!(
            "`{}`: waypoint formulas cannot contain temporal operators",
            pretty_print(f)
        )));
    }
    let mut prev: Option<(usize, Vec<Cell>, Option<u64>)> = None;
    let mut retained = 0usize;
    let mut failed = None;
    walk(lsm, |frame| {
        let Some(k) = classify(frame, slots)? else {
            return Ok(true);
        };
        retained += 1;
        if k == 2 {
            if let Some((0, from, from_seq)) = &prev {
                let mut w = witness_at(frame, pretty_print(&slots[1]));
                w.from = Some(render_text(frame.schema, None, from));
                let detail = match from_seq {
                    Some(s) => format!("reached f3 from the f1 state at seq {s} without passing f2"),
                    None => "reached f3 from the initial f1 state without passing f2".into(),
                };
                failed = Some(Verdict::fails(w, detail));
                return Ok(false);
            }
        }
        prev = Some((k, frame.cur.to_vec(), frame.seq));
        Ok(true)
    })?;
    Ok(failed.unwrap_or_else(|| {
        Verdict::holds(format!("no f1 state is directly followed by an f3 state ({retained} retained)"))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_lsm, Schema};
    use crate::propspec::parse_property;
    use crate::trace::KeyWrite;
    use crate::value::{Value, ValueTag};

    fn lsm(names: &[&str], writes: &[(usize, i64)]) -> Lsm {
        let schema = Schema::new(names.iter().map(|n| (n.to_string(), ValueTag::Int)).collect());
        let w = writes.iter().enumerate().map(|(i, &(attr, v))| KeyWrite {
            seq: i as u64 + 1,
            attr,
            value: Value::Int(v),
        });
        build_lsm(&schema, w)
    }

    fn check(m: &Lsm, src: &str) -> Verdict {
        check_lsm(m, &parse_property(src).unwrap(), &CheckOptions::default()).unwrap()
    }

    #[test]
    fn g_reports_the_earliest_failure_and_its_conjunct() {
        let m = lsm(&["r", "w"], &[(0, 0), (1, 0), (0, 2), (1, 1), (0, 0)]);
        let v = check(&m, "G[w >= 0 && (r > 0 -> w == 0)]");
        assert_eq!(v.value, VerdictValue::False);
        let w = v.witness.unwrap();
        assert_eq!(w.seq, Some(4));
        assert_eq!(w.failing, "r > 0 -> w == 0");
        assert_eq!(check(&m, "G[r >= 0]").value, VerdictValue::True);
    }

    #[test]
    fn undefined_states_are_skipped_unless_strict() {
        let m = lsm(&["r", "w"], &[(0, 1), (1, 0)]);
        let p = parse_property("G[w == 0]").unwrap();
        assert!(check_lsm(&m, &p, &CheckOptions::default()).unwrap().is_true());
        let strict = CheckOptions { strict_undefined: true };
        assert_eq!(check_lsm(&m, &p, &strict).unwrap().value, VerdictValue::False);
        let v = check(&lsm(&["r"], &[]), "G[r == 0]");
        assert!(v.is_true() && v.detail.starts_with("vacuous"));
    }

    #[test]
    fn primed_variables_on_the_chain() {
        let m = lsm(&["k"], &[(0, 1), (0, 2), (0, 3)]);
        assert!(check(&m, "G[k' > k]").is_true());
        assert_eq!(check(&m, "G[k' == 2]").value, VerdictValue::False);
    }

    #[test]
    fn eventualities_top_level_and_nested() {
        let m = lsm(&["f", "q"], &[(1, 3), (0, 1), (0, 2), (0, 3), (1, 1), (0, 1)]);
        assert!(check(&m, "F[f == 3]").is_true());
        assert_eq!(check(&m, "F[f == 9]").value, VerdictValue::False);
        assert!(check(&m, "G[q > 0 -> F[f == q]]").is_true());
        let m = lsm(&["f", "q"], &[(1, 3), (0, 1), (1, 2), (0, 1)]);
        assert_eq!(check(&m, "G[q > 0 -> F[f == q]]").value, VerdictValue::False);
        assert!(check(&m, "F[f == 1] && G[q >= 0]").is_true());
        assert_eq!(check(&m, "!F[f == 1]").value, VerdictValue::False);
    }

    #[test]
    fn p_uses_the_retained_subsequence() {
        // x: 1 = f1, 2 = f2, 3 = f3; 0 is dropped.
        let p = "P[x == 1 ~~> x == 2 ~~> x == 3]";
        assert!(check(&lsm(&["x"], &[(0, 1), (0, 0), (0, 2), (0, 3)]), p).is_true());
        let v = check(&lsm(&["x"], &[(0, 1), (0, 0), (0, 3)]), p);
        assert_eq!(v.value, VerdictValue::False);
        assert_eq!(v.witness_seq(), Some(3));
        assert!(check(&lsm(&["x"], &[(0, 3), (0, 2)]), p).is_true());
        let m = lsm(&["x"], &[(0, 1)]);
        let err = check_lsm(&m, &parse_property("P[x == 1 ~~> x > 0 ~~> x == 3]").unwrap(), &CheckOptions::default());
        assert!(matches!(err, Err(CheckError::Disjointness { seq: Some(1), .. })));
    }
}
