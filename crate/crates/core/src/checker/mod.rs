//! Property checking on concrete, abstract, and path models.

mod asm;
mod dsm;
pub mod eval;
mod lsm;
mod path;
mod truth;
mod validity;
mod verdict;

use thiserror::Error;

pub use asm::{check_asm_bool, check_asm_multi};
pub use dsm::check_dsm;
pub use eval::EvalError;
pub use lsm::check_lsm;
pub use path::check_path;
pub use truth::Truth;
pub use validity::{decide_validity, Validity};
pub use verdict::{label, render_state, render_text, Verdict, VerdictValue, Witness};

pub(crate) use asm::constraints;
pub(crate) use path::slot_of;

use crate::abstraction::{AbsForm, AbstractionError};
use crate::model::{Annotation, Model, ModelKind};
use crate::propspec::Expr;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("{0}")]
    Rejected(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("disjointness violated{}: state ({state}) satisfies more than one of f1, f2, f3",
        seq.map(|s| format!(" at seq {s}")).unwrap_or_default())]
    Disjointness { seq: Option<u64>, state: String },
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Treat states where the property is undefined as failures.
    pub strict_undefined: bool,
}

/// Check `p` with the procedure matching the model kind and, for abstract
/// models, the form of its abstraction functions.
pub fn check(model: &Model, p: &Expr, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    match model {
        Model::Linear(lsm) => check_lsm(lsm, p, opts),
        Model::Graph(g) => match g.kind() {
            ModelKind::Dsm | ModelKind::Lsm => check_dsm(g, p, opts),
            ModelKind::Path => check_path(g, p),
            ModelKind::Asm => {
                let multi = matches!(g.annotation(), Annotation::Abstractions(fns)
                    if fns.iter().any(|f| matches!(f.form, AbsForm::Range(_))));
                if multi {
                    check_asm_multi(g, p)
                } else {
                    check_asm_bool(g, p)
                }
            }
        },
    }
}
