use super::eval::{Frame, NoTemporal, StateView};
use super::lsm::conjuncts;
use super::truth::Truth;
use super::verdict::{render_state, Verdict, Witness};
use super::{CheckError, CheckOptions};
use crate::model::GraphModel;
use crate::propspec::{pretty_print, Expr};

/// Check `G[q]` on a distinct state model. Primed attributes range over
/// every successor of a state: the state fails if any successor falsifies
/// `q`, which is exactly when some concrete transition out of it does.
pub fn check_dsm(m: &GraphModel, p: &Expr, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let q = match p {
        Expr::G(q) if !q.contains_temporal() => q.as_ref(),
        _ => {
            return Err(CheckError::Rejected(format!(
                "`{}` requires LSM: the distinct state model only supports G over a state formula",
                pretty_print(p)
            )))
        }
    };
    let primed = q.contains_primed();
    let (mut evaluated, mut skipped) = (0usize, 0usize);
    for i in 0..m.state_count() {
        let t = eval_state(m, i, q, primed)?;
        match t {
            Truth::T => evaluated += 1,
            Truth::U if !opts.strict_undefined => skipped += 1,
            _ => {
                let mut failing = pretty_print(q);
                for c in conjuncts(q) {
                    if eval_state(m, i, c, c.contains_primed())? != Truth::T {
                        failing = pretty_print(c);
                        break;
                    }
                }
                let cells = m.state(i).clone();
                let detail = format!("`{failing}` is {} at state {i}", if t == Truth::U { "undefined" } else { "false" });
                let w = Witness {
                    state: i,
                    seq: m.first_seq(i),
                    vector: render_state(m.schema(), None, &cells),
                    cells,
                    failing,
                    from: None,
                };
                return Ok(Verdict::fails(w, detail));
            }
        }
    }
    Ok(Verdict::holds(if evaluated == 0 {
        "vacuous: no state had the referenced attributes defined".to_string()
    } else {
        format!("holds in {evaluated} states ({skipped} skipped)")
    }))
}

/// Truth of `q` at state `i`: F if some successor falsifies it, T if all
/// satisfy it, U otherwise.
fn eval_state(m: &GraphModel, i: usize, q: &Expr, primed: bool) -> Result<Truth, CheckError> {
    fn frame<'a>(m: &'a GraphModel, i: usize, next: Option<&'a dyn StateView>) -> Frame<'a> {
        Frame {
            schema: m.schema(),
            cur: m.state(i),
            next,
            pos: i,
            seq: m.first_seq(i),
        }
    }
    let succ = m.successors(i);
    if !primed || succ.is_empty() {
        return Ok(frame(m, i, None).truth(q, &NoTemporal)?);
    }
    let mut all = Truth::T;
    for &j in succ {
        all = all.and(frame(m, i, Some(m.state(j))).truth(q, &NoTemporal)?);
        if all == Truth::F {
            break;
        }
    }
    Ok(all)
}
