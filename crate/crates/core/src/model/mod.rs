//! State vectors, the linear state model, and the graph representation
//! shared by distinct, abstract, and path models.

mod graph;
mod lsm;
mod state;

pub use graph::{
    build_dsm, collapse_lsm, Annotation, Edge, GraphBuilder, GraphModel, ModelKind, Pushed,
};
pub use lsm::{build_lsm, Cursor, Lsm, Step};
pub use state::{initial_state, state_key, Cell, Schema, StateVector};

/// Either model representation.
#[derive(Debug, Clone)]
pub enum Model {
    Linear(Lsm),
    Graph(GraphModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Linear(_) => ModelKind::Lsm,
            Model::Graph(g) => g.kind(),
        }
    }

    pub fn schema(&self) -> &Schema {
        match self {
            Model::Linear(l) => l.schema(),
            Model::Graph(g) => g.schema(),
        }
    }

    pub fn state_count(&self) -> usize {
        match self {
            Model::Linear(l) => l.state_count(),
            Model::Graph(g) => g.state_count(),
        }
    }
}
