use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::lsm::Lsm;
use super::state::{initial_state, Cell, Schema, StateVector};
use crate::abstraction::{AbstractionFunction, PathSpec};
use crate::trace::KeyWrite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Lsm,
    Dsm,
    Asm,
    Path,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lsm => "lsm",
            ModelKind::Dsm => "dsm",
            ModelKind::Asm => "asm",
            ModelKind::Path => "path",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lsm" => Ok(ModelKind::Lsm),
            "dsm" => Ok(ModelKind::Dsm),
            "asm" => Ok(ModelKind::Asm),
            "path" => Ok(ModelKind::Path),
            other => Err(format!("unknown model kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub count: u64,
    /// Seq of the first transition merged into this edge.
    pub first_seq: Option<u64>,
}

/// How the cells of a graph model were produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Annotation {
    Concrete,
    Abstractions(Vec<AbstractionFunction>),
    Path(PathSpec),
}

/// A state graph with merged states and counted transitions (DSM, ASM,
/// path model). State 0 is the start state.
#[derive(Debug, Clone)]
pub struct GraphModel {
    kind: ModelKind,
    schema: Schema,
    annotation: Annotation,
    states: Vec<StateVector>,
    index: HashMap<StateVector, usize>,
    first_seq: Vec<Option<u64>>,
    edges: Vec<Edge>,
    edge_index: HashMap<(usize, usize), usize>,
    outgoing: Vec<Vec<usize>>,
}

impl GraphModel {
    /// Empty model holding only `start`.
    pub fn new(kind: ModelKind, schema: Schema, annotation: Annotation, start: StateVector) -> Self {
        let mut m = GraphModel {
            kind,
            schema,
            annotation,
            states: Vec::new(),
            index: HashMap::new(),
            first_seq: Vec::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            outgoing: Vec::new(),
        };
        m.intern(start, None);
        m
    }

    /// Index of `state`, adding it if unseen. The flag reports a new state.
    pub fn intern(&mut self, state: StateVector, seq: Option<u64>) -> (usize, bool) {
        if let Some(&i) = self.index.get(&state) {
            return (i, false);
        }
        let i = self.states.len();
        self.index.insert(state.clone(), i);
        self.states.push(state);
        self.first_seq.push(seq);
        self.outgoing.push(Vec::new());
        (i, true)
    }

    /// Add `count` transitions from `from` to `to`.
    pub fn add_edge(&mut self, from: usize, to: usize, count: u64, seq: Option<u64>) -> bool {
        match self.edge_index.get(&(from, to)) {
            Some(&e) => {
                self.edges[e].count += count;
                false
            }
            None => {
                self.edge_index.insert((from, to), self.edges.len());
                self.outgoing[from].push(to);
                self.edges.push(Edge {
                    from,
                    to,
                    count,
                    first_seq: seq,
                });
                true
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn annotation(&self) -> &Annotation {
        &self.annotation
    }

    pub fn start(&self) -> usize {
        0
    }

    /// States in creation order.
    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &StateVector {
        &self.states[i]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn lookup(&self, state: &[Cell]) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Seq of the write that first produced state `i`.
    pub fn first_seq(&self, i: usize) -> Option<u64> {
        self.first_seq[i]
    }

    /// Edges in creation order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Edge> {
        self.edge_index.get(&(from, to)).map(|&e| &self.edges[e])
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.outgoing[i]
    }

    pub fn total_transitions(&self) -> u64 {
        self.edges.iter().map(|e| e.count).sum()
    }
}

/// Incremental builder that tracks the current state while writes arrive.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    model: GraphModel,
    current: usize,
    vector: StateVector,
}

/// Result of one [`GraphBuilder::push`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pushed {
    pub from: usize,
    pub to: usize,
    pub new_state: bool,
    pub new_edge: bool,
}

impl GraphBuilder {
    pub fn new(model: GraphModel) -> GraphBuilder {
        let vector = model.state(0).clone();
        GraphBuilder {
            model,
            current: 0,
            vector,
        }
    }

    /// Write `cell` into component `attr` and record the transition.
    pub fn push(&mut self, seq: u64, attr: usize, cell: Cell) -> Pushed {
        self.vector[attr] = cell;
        self.transition(seq)
    }

    /// Record a transition to an explicit vector.
    pub fn move_to(&mut self, seq: u64, state: StateVector) -> Pushed {
        self.vector = state;
        self.transition(seq)
    }

    fn transition(&mut self, seq: u64) -> Pushed {
        let (to, new_state) = match self.model.lookup(&self.vector) {
            Some(i) => (i, false),
            None => self.model.intern(self.vector.clone(), Some(seq)),
        };
        let from = self.current;
        let new_edge = self.model.add_edge(from, to, 1, Some(seq));
        self.current = to;
        Pushed {
            from,
            to,
            new_state,
            new_edge,
        }
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn current_vector(&self) -> &StateVector {
        &self.vector
    }

    pub fn model(&self) -> &GraphModel {
        &self.model
    }

    pub fn finish(self) -> GraphModel {
        self.model
    }
}

/// Distinct state model: LSM construction with list append replaced by set
/// union, counting merged transitions.
pub fn build_dsm<I>(schema: &Schema, writes: I) -> GraphModel
where
    I: IntoIterator<Item = KeyWrite>,
{
    let model = GraphModel::new(
        ModelKind::Dsm,
        schema.clone(),
        Annotation::Concrete,
        initial_state(schema),
    );
    let mut b = GraphBuilder::new(model);
    for w in writes {
        b.push(w.seq, w.attr, Cell::Concrete(w.value));
    }
    b.finish()
}

/// Merge duplicate LSM vectors. Equivalent to [`build_dsm`] on the same
/// writes.
pub fn collapse_lsm(lsm: &Lsm) -> GraphModel {
    let model = GraphModel::new(
        ModelKind::Dsm,
        lsm.schema().clone(),
        Annotation::Concrete,
        initial_state(lsm.schema()),
    );
    let mut b = GraphBuilder::new(model);
    for s in lsm.steps() {
        b.push(s.seq, s.attr, s.new.clone());
    }
    b.finish()
}
