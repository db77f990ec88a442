use super::verdict::{render_state, render_text, Verdict, Witness};
use super::CheckError;
use crate::abstraction::{AbstractValue, PathSlot, PathSpec};
use crate::model::{Annotation, Cell, GraphModel};
use crate::propspec::{pretty_print, Expr};

pub(crate) fn slot_of(cells: &[Cell]) -> Option<PathSlot> {
    match cells.first() {
        Some(Cell::Abstract(AbstractValue::Slot(s))) => Some(*s),
        _ => None,
    }
}

/// Check `P[f1 ~~> f2 ~~> f3]` on a path model built from the same
/// waypoints: it fails iff the model has an edge from the f1 node to the
/// f3 node.
pub fn check_path(m: &GraphModel, p: &Expr) -> Result<Verdict, CheckError> {
    let Annotation::Path(spec) = m.annotation() else {
        return Err(CheckError::Mismatch(format!("a {} model has no path abstraction", m.kind())));
    };
    let Expr::P(slots) = p else {
        return Err(CheckError::Mismatch(format!(
            "`{}` is not a P property; path models only check P",
            pretty_print(p)
        )));
    };
    let wanted = PathSpec::from_slots(&spec.attr, spec.tag, slots).map_err(CheckError::Mismatch)?;
    if &wanted != spec {
        return Err(CheckError::Mismatch(format!(
            "the model was built for `{spec}` but the property is `{}`",
            pretty_print(p)
        )));
    }
    for e in m.edges() {
        if slot_of(m.state(e.from)) == Some(PathSlot::F1) && slot_of(m.state(e.to)) == Some(PathSlot::F3) {
            let cells = m.state(e.to).clone();
            let w = Witness {
                state: e.to,
                seq: e.first_seq,
                vector: render_state(m.schema(), Some(m.annotation()), &cells),
                cells,
                failing: pretty_print(&slots[1]),
                from: Some(render_text(m.schema(), Some(m.annotation()), m.state(e.from))),
            };
            let detail = format!(
                "edge f1 -> f3 taken {} time(s), first at seq {}: `{}` was skipped",
                e.count,
                e.first_seq.map_or("?".into(), |s| s.to_string()),
                pretty_print(&slots[1])
            );
            return Ok(Verdict::fails(w, detail));
        }
    }
    Ok(Verdict::holds(format!(
        "no f1 -> f3 edge among {} retained nodes",
        m.state_count() - 1
    )))
}
