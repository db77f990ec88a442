//! Glue between a [`Spec`], a trace, the model builders, and the checker.

use std::sync::OnceLock;
use std::io::BufRead;

use thiserror::Error;

use crate::abstraction::{build_asm, build_path_model, AbstractionError};
use crate::checker::{self, CheckError, CheckOptions, Verdict, VerdictValue};
use crate::model::{build_dsm, build_lsm, GraphModel, Lsm, Model, ModelKind};
use crate::propspec::{normalize, pretty_print, Expr};
use crate::specfile::{PropDecl, Spec};
use crate::trace::{read_trace, KeyWrite, TraceError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("{0}")]
    Config(String),
}

impl PipelineError {
    /// Whether the failure is the user's configuration rather than the data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            PipelineError::Config(_)
                | PipelineError::Check(CheckError::Rejected(_) | CheckError::Mismatch(_))
        )
    }
}

/// Read a trace and normalize it into writes on the spec's state vector.
pub fn load_writes<R: BufRead>(spec: &Spec, source: R) -> Result<Vec<KeyWrite>, TraceError> {
    spec.extractor().run(read_trace(source, spec.filter()))
}

/// Abstract model over the attributes `attrs` with the spec's abstractions.
pub fn build_asm_over(spec: &Spec, attrs: &[usize], writes: &[KeyWrite]) -> Result<GraphModel, PipelineError> {
    let r = spec.restrict(attrs);
    Ok(build_asm(
        r.schema(),
        r.functions().to_vec(),
        writes.iter().filter_map(|w| r.map(w)),
    )?)
}

/// Build one model of the requested kind. The abstract model covers the
/// attributes with an `abs` declaration; the path model uses the first
/// `P` declaration.
pub fn build_model(spec: &Spec, kind: ModelKind, writes: &[KeyWrite]) -> Result<Model, PipelineError> {
    Ok(match kind {
        ModelKind::Lsm => Model::Linear(build_lsm(spec.schema(), writes.iter().cloned())),
        ModelKind::Dsm => Model::Graph(build_dsm(spec.schema(), writes.iter().cloned())),
        ModelKind::Asm => {
            if !spec.has_abstraction() {
                return Err(PipelineError::Config(
                    "an abstract model needs at least one non-identity `abs` declaration".into(),
                ));
            }
            Model::Graph(build_asm_over(spec, &spec.abstracted(), writes)?)
        }
        ModelKind::Path => {
            let decl = spec
                .props()
                .iter()
                .find(|p| p.path_attr.is_some())
                .or_else(|| spec.props().iter().find(|p| matches!(p.expr, Expr::P(_))))
                .ok_or_else(|| PipelineError::Config("a path model needs a `path` declaration".into()))?;
            Model::Graph(path_model(spec, decl, writes)?)
        }
    })
}

fn path_model(spec: &Spec, decl: &PropDecl, writes: &[KeyWrite]) -> Result<GraphModel, PipelineError> {
    let (ps, attr) = spec.path_spec(decl).map_err(PipelineError::Config)?;
    Ok(build_path_model(&ps, attr, writes.iter().cloned())?)
}

/// Checks declarations of one spec against one trace, building each model
/// at most once (abstract and path models are built per property).
pub struct Workbench<'a> {
    spec: &'a Spec,
    writes: &'a [KeyWrite],
    opts: CheckOptions,
    lsm: OnceLock<Lsm>,
    dsm: OnceLock<GraphModel>,
}

impl<'a> Workbench<'a> {
    pub fn new(spec: &'a Spec, writes: &'a [KeyWrite], opts: CheckOptions) -> Self {
        Workbench {
            spec,
            writes,
            opts,
            lsm: OnceLock::new(),
            dsm: OnceLock::new(),
        }
    }

    pub fn lsm(&self) -> &Lsm {
        self.lsm
            .get_or_init(|| build_lsm(self.spec.schema(), self.writes.iter().cloned()))
    }

    pub fn dsm(&self) -> &GraphModel {
        self.dsm
            .get_or_init(|| build_dsm(self.spec.schema(), self.writes.iter().cloned()))
    }

    /// Check a declaration. `G` properties are normalized first and their
    /// conjuncts checked separately; the false conjunct with the earliest
    /// witness decides.
    /// On abstract models, `P` properties are checked on their path model.
    pub fn check(&self, decl: &PropDecl, kind: ModelKind) -> Result<Verdict, PipelineError> {
        if let Expr::P(_) = decl.expr {
            return match kind {
                ModelKind::Lsm => Ok(checker::check_lsm(self.lsm(), &decl.expr, &self.opts)?),
                ModelKind::Dsm => Ok(checker::check_dsm(self.dsm(), &decl.expr, &self.opts)?),
                ModelKind::Asm | ModelKind::Path => {
                    let m = path_model(self.spec, decl, self.writes)?;
                    Ok(checker::check_path(&m, &decl.expr)?)
                }
            };
        }
        if kind == ModelKind::Path {
            return Err(CheckError::Rejected(format!(
                "`{}`: path models only check P properties",
                decl.name
            ))
            .into());
        }
        let parts = normalize(&decl.expr);
        let mut verdicts = Vec::with_capacity(parts.len());
        for part in &parts {
            verdicts.push(self.check_part(part, kind)?);
        }
        Ok(combine(&parts, verdicts))
    }

    fn check_part(&self, p: &Expr, kind: ModelKind) -> Result<Verdict, PipelineError> {
        Ok(match kind {
            ModelKind::Lsm => checker::check_lsm(self.lsm(), p, &self.opts)?,
            ModelKind::Dsm => checker::check_dsm(self.dsm(), p, &self.opts)?,
            _ => {
                let attrs: Vec<usize> = p
                    .free_vars()
                    .iter()
                    .filter_map(|v| self.spec.schema().index(v))
                    .collect();
                let m = build_asm_over(self.spec, &attrs, self.writes)?;
                checker::check(&Model::Graph(m), p, &self.opts)?
            }
        })
    }
}

fn combine(parts: &[Expr], mut verdicts: Vec<Verdict>) -> Verdict {
    if verdicts.len() == 1 {
        return verdicts.pop().unwrap();
    }
    let checks: usize = verdicts.iter().map(|v| v.validity_checks).sum();
    // Report the conjunct that fails first in the trace.
    let pick = verdicts
        .iter()
        .enumerate()
        .filter(|(_, v)| v.value == VerdictValue::False)
        .min_by_key(|(i, v)| (v.witness_seq().unwrap_or(u64::MAX), *i))
        .map(|(i, _)| i)
        .or_else(|| verdicts.iter().position(|v| v.value == VerdictValue::Incompatible));
    let mut out = match pick {
        Some(i) => {
            let mut v = verdicts.swap_remove(i);
            v.detail = format!("conjunct `{}`: {}", pretty_print(&parts[i]), v.detail);
            v
        }
        None => Verdict::holds(format!("all {} conjuncts hold", parts.len())),
    };
    out.validity_checks = checks;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const RW: &str = "key r = db.Database.r : int\n\
        key w = db.Database.w : int\n\
        abs r = range[0:1]\n\
        abs w = range[0:1:2]\n\
        prop safe = G[(r > 0 -> w == 0) && r >= 0 && (w == 0 || w == 1)]\n\
        prop early = F[r == 2]";

    fn rec(seq: u64, field: &str, v: i64) -> String {
        format!(
            r#"{{"seq":{seq},"kind":"fieldWrite","thread":"t","class":"db.Database","instance":1,"field":"{field}","value":{{"t":"int","v":{v}}}}}"#
        )
    }

    #[test]
    fn conjuncts_are_checked_on_each_model() {
        let spec = Spec::parse(RW).unwrap();
        let trace = [rec(1, "r", 0), rec(2, "w", 0), rec(3, "r", 2), rec(4, "r", 0), rec(5, "w", 1)].join("\n");
        let writes = load_writes(&spec, trace.as_bytes()).unwrap();
        let wb = Workbench::new(&spec, &writes, CheckOptions::default());
        for kind in [ModelKind::Lsm, ModelKind::Dsm, ModelKind::Asm] {
            let v = wb.check(&spec.props()[0], kind).unwrap();
            assert!(v.is_true(), "{kind}: {}", v.detail);
        }
        assert!(wb.check(&spec.props()[1], ModelKind::Lsm).unwrap().is_true());
        let err = wb.check(&spec.props()[1], ModelKind::Dsm).unwrap_err();
        assert!(err.is_usage());

        let bad = [rec(1, "r", 1), rec(2, "w", 1)].join("\n");
        let writes = load_writes(&spec, bad.as_bytes()).unwrap();
        let wb = Workbench::new(&spec, &writes, CheckOptions::default());
        let v = wb.check(&spec.props()[0], ModelKind::Asm).unwrap();
        assert_eq!(v.value, VerdictValue::False);
        assert_eq!(v.witness_seq(), Some(2));
        assert!(v.detail.starts_with("conjunct `G[r > 0 -> w == 0]`"));
    }
}
