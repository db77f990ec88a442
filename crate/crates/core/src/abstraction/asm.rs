use super::{AbstractValue, AbstractionError, AbstractionFunction};
use crate::model::{Annotation, Cell, GraphBuilder, GraphModel, ModelKind, Pushed, Schema};
use crate::trace::KeyWrite;

/// Incremental abstract-state-model construction.
#[derive(Debug, Clone)]
pub struct AsmBuilder {
    fns: Vec<AbstractionFunction>,
    graph: GraphBuilder,
}

impl AsmBuilder {
    /// `fns[i]` abstracts schema attribute `i`.
    pub fn new(schema: &Schema, fns: Vec<AbstractionFunction>) -> Result<AsmBuilder, String> {
        if fns.len() != schema.len() {
            return Err(format!(
                "{} abstraction functions for {} attributes",
                fns.len(),
                schema.len()
            ));
        }
        for (i, f) in fns.iter().enumerate() {
            if f.attr != schema.name(i) || f.tag != schema.tag(i) {
                return Err(format!(
                    "abstraction for `{}` does not match attribute `{}`",
                    f.attr,
                    schema.name(i)
                ));
            }
        }
        let start = vec![Cell::Abstract(AbstractValue::Unknown); schema.len()];
        let model = GraphModel::new(
            ModelKind::Asm,
            schema.clone(),
            Annotation::Abstractions(fns.clone()),
            start,
        );
        Ok(AsmBuilder {
            fns,
            graph: GraphBuilder::new(model),
        })
    }

    pub fn push(&mut self, w: &KeyWrite) -> Result<Pushed, AbstractionError> {
        let f = &self.fns[w.attr];
        if w.value.tag() != f.tag {
            return Err(AbstractionError::TagMismatch {
                attr: f.attr.clone(),
                seq: w.seq,
                expected: f.tag,
                found: w.value.tag(),
            });
        }
        let av = f.apply_value(&w.value);
        Ok(self.graph.push(w.seq, w.attr, Cell::Abstract(av)))
    }

    pub fn functions(&self) -> &[AbstractionFunction] {
        &self.fns
    }

    pub fn model(&self) -> &GraphModel {
        self.graph.model()
    }

    pub fn finish(self) -> GraphModel {
        self.graph.finish()
    }
}

/// Abstract state model: every write moves to the abstraction of the
/// updated vector, merging equal abstract vectors and counting transitions.
pub fn build_asm<I>(
    schema: &Schema,
    fns: Vec<AbstractionFunction>,
    writes: I,
) -> Result<GraphModel, AbstractionError>
where
    I: IntoIterator<Item = KeyWrite>,
{
    let mut b = AsmBuilder::new(schema, fns).map_err(AbstractionError::Invalid)?;
    for w in writes {
        b.push(&w)?;
    }
    Ok(b.finish())
}
