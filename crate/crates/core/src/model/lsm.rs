use super::state::{initial_state, Cell, Schema, StateVector};
use crate::trace::KeyWrite;

/// One LSM transition: state `i` becomes state `i + 1` by writing `new`
/// into `attr`.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub seq: u64,
    pub attr: usize,
    pub old: Cell,
    pub new: Cell,
}

/// Linear state model: one state per write, in trace order.
///
/// Only the transition deltas are stored; state `i` is the all-undefined
/// initial vector with the first `i` steps applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Lsm {
    schema: Schema,
    steps: Vec<Step>,
}

impl Lsm {
    pub fn new(schema: Schema) -> Lsm {
        Lsm {
            schema,
            steps: Vec::new(),
        }
    }

    /// Rebuild from stored steps; `old` cells are recomputed.
    pub fn from_steps(schema: Schema, steps: impl IntoIterator<Item = (u64, usize, Cell)>) -> Lsm {
        let mut lsm = Lsm::new(schema);
        let mut cur = initial_state(&lsm.schema);
        for (seq, attr, new) in steps {
            lsm.push_on(&mut cur, seq, attr, new);
        }
        lsm
    }

    fn push_on(&mut self, cur: &mut StateVector, seq: u64, attr: usize, new: Cell) {
        let old = std::mem::replace(&mut cur[attr], new.clone());
        self.steps.push(Step {
            seq,
            attr,
            old,
            new,
        });
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn state_count(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn edge_count(&self) -> usize {
        self.steps.len()
    }

    /// Seq of the write that produced state `i`; `None` for the initial state.
    pub fn seq_of(&self, i: usize) -> Option<u64> {
        i.checked_sub(1).map(|k| self.steps[k].seq)
    }

    /// Materialize state `i`.
    pub fn state(&self, i: usize) -> StateVector {
        let mut v = initial_state(&self.schema);
        for s in &self.steps[..i] {
            v[s.attr] = s.new.clone();
        }
        v
    }

    pub fn cursor(&self) -> Cursor<'_> {
        Cursor {
            lsm: self,
            pos: 0,
            cur: initial_state(&self.schema),
        }
    }

    /// Every state in order. Allocates one vector per state; prefer
    /// [`Lsm::cursor`] on long traces.
    pub fn states(&self) -> Vec<StateVector> {
        let mut out = Vec::with_capacity(self.state_count());
        let mut c = self.cursor();
        loop {
            out.push(c.state().to_vec());
            if !c.advance() {
                return out;
            }
        }
    }
}

/// Forward walk over LSM states that applies one delta per step.
pub struct Cursor<'a> {
    lsm: &'a Lsm,
    pos: usize,
    cur: StateVector,
}

impl<'a> Cursor<'a> {
    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn state(&self) -> &[Cell] {
        &self.cur
    }

    /// The step leaving the current state, if any.
    pub fn next_step(&self) -> Option<&'a Step> {
        self.lsm.steps.get(self.pos)
    }

    pub fn advance(&mut self) -> bool {
        match self.lsm.steps.get(self.pos) {
            Some(s) => {
                self.cur[s.attr] = s.new.clone();
                self.pos += 1;
                true
            }
            None => false,
        }
    }
}

/// Algorithm-1 fold over a write stream.
pub fn build_lsm<I>(schema: &Schema, writes: I) -> Lsm
where
    I: IntoIterator<Item = KeyWrite>,
{
    let mut lsm = Lsm::new(schema.clone());
    let mut cur = initial_state(schema);
    for w in writes {
        lsm.push_on(&mut cur, w.seq, w.attr, Cell::Concrete(w.value));
    }
    lsm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{Value, ValueTag};

    fn kw(seq: u64, v: i64) -> KeyWrite {
        KeyWrite {
            seq,
            attr: 0,
            value: Value::Int(v),
        }
    }

    #[test]
    fn unrolls_one_state_per_write() {
        let schema = Schema::new(vec![("k".into(), ValueTag::Int)]);
        let lsm = build_lsm(&schema, vec![kw(1, 1), kw(2, 2), kw(3, 1)]);
        assert_eq!(lsm.state_count(), 4);
        assert_eq!(lsm.edge_count(), 3);
        let c = |v| vec![Cell::Concrete(Value::Int(v))];
        assert_eq!(
            lsm.states(),
            vec![vec![Cell::Undefined], c(1), c(2), c(1)]
        );
        assert_eq!(lsm.steps()[2].old, Cell::Concrete(Value::Int(2)));
        assert_eq!(lsm.seq_of(3), Some(3));
        assert_eq!(lsm.state(2), c(2));
    }

    #[test]
    fn empty_trace_has_only_the_initial_state() {
        let schema = Schema::new(vec![("k".into(), ValueTag::Int)]);
        let lsm = build_lsm(&schema, vec![]);
        assert_eq!(lsm.states(), vec![vec![Cell::Undefined]]);
        assert_eq!(lsm.edge_count(), 0);
    }
}
