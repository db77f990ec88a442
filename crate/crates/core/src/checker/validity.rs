//! Validity of `g1(v1) && .. && gn(vn) -> q` for one abstract state, where
//! each `gi` is given as the constraint set of attribute `vi`.

use std::collections::BTreeMap;

use super::truth::Truth;
use super::CheckError;
use crate::abstraction::Constraint;
use crate::model::Schema;
use crate::propspec::{pretty_print, BinOp, Expr};
use crate::value::{Value, ValueTag};

/// Above this many combinations of atom outcomes the Kleene answer is kept.
const EXACT_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
enum Form {
    Const(bool),
    Atom(usize),
    Not(Box<Form>),
    And(Box<Form>, Box<Form>),
    Or(Box<Form>, Box<Form>),
    Implies(Box<Form>, Box<Form>),
}

impl Form {
    fn kleene(&self, atoms: &[Truth]) -> Truth {
        match self {
            Form::Const(b) => (*b).into(),
            Form::Atom(i) => atoms[*i],
            Form::Not(a) => a.kleene(atoms).not(),
            Form::And(a, b) => a.kleene(atoms).and(b.kleene(atoms)),
            Form::Or(a, b) => a.kleene(atoms).or(b.kleene(atoms)),
            Form::Implies(a, b) => a.kleene(atoms).implies(b.kleene(atoms)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Atom {
    attr: usize,
    /// Solution set of the atom over the attribute's domain.
    set: Constraint,
    text: String,
}

/// A state formula compiled into single-attribute atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Validity {
    form: Form,
    atoms: Vec<Atom>,
}

fn not_checkable(e: &Expr, why: &str) -> CheckError {
    CheckError::Rejected(format!(
        "`{}` is not abstractly checkable: {why}",
        pretty_print(e)
    ))
}

fn literal(e: &Expr) -> Option<Value> {
    match e {
        Expr::Bool(b) => Some(Value::Bool(*b)),
        Expr::Int(i) => Some(Value::Int(*i)),
        Expr::Real(r) => Some(Value::Real(*r)),
        Expr::Str(s) => Some(Value::Str(s.clone())),
        _ => None,
    }
}

impl Validity {
    pub fn compile(q: &Expr, schema: &Schema) -> Result<Validity, CheckError> {
        let mut atoms = Vec::new();
        let form = compile(q, schema, &mut atoms)?;
        Ok(Validity { form, atoms })
    }

    /// Attributes mentioned by the formula, ascending, without duplicates.
    pub fn attrs(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.atoms.iter().map(|a| a.attr).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Decide the formula for every concrete state allowed by
    /// `constraints` (indexed like the schema): T if all satisfy it, F if
    /// none does, U otherwise.
    pub fn decide(&self, constraints: &[Constraint]) -> Result<Truth, CheckError> {
        Ok(self.decide_explained(constraints)?.0)
    }

    /// Like [`Validity::decide`], also naming an atom whose outcome is not
    /// fixed by the constraints when the answer is U.
    pub fn decide_explained(
        &self,
        constraints: &[Constraint],
    ) -> Result<(Truth, Option<String>), CheckError> {
        let cs: Vec<Option<&Constraint>> = constraints.iter().map(Some).collect();
        self.decide_core(&cs)
    }

    /// Decide a state where some attributes are not written yet (`None`).
    /// Atoms on those attributes are undefined, as on the concrete models,
    /// and a concrete state where the formula is undefined is not a
    /// violation: T means no concrete state falsifies the formula, F that
    /// all of them do.
    pub fn decide_partial(
        &self,
        constraints: &[Option<Constraint>],
    ) -> Result<(Truth, Option<String>), CheckError> {
        let cs: Vec<Option<&Constraint>> = constraints.iter().map(Option::as_ref).collect();
        self.decide_core(&cs)
    }

    fn decide_core(&self, constraints: &[Option<&Constraint>]) -> Result<(Truth, Option<String>), CheckError> {
        if constraints.iter().flatten().any(|c| c.is_empty()) {
            // No concrete state at all: vacuously valid.
            return Ok((Truth::T, None));
        }
        let mut kleene = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            kleene.push(match constraints[a.attr] {
                Some(c) => atom_truth(c, &a.set)?,
                None => Truth::U,
            });
        }
        let quick = self.form.kleene(&kleene);
        let undecided = || {
            self.atoms
                .iter()
                .zip(&kleene)
                .find(|(a, t)| **t == Truth::U && constraints[a.attr].is_some())
                .map(|(a, _)| a.text.clone())
        };
        if quick != Truth::U {
            return Ok((quick, None));
        }

        // Split each attribute's constraint into cells on which all of its
        // atoms are constant; attributes are independent, so the reachable
        // atom valuations are the product of the per-attribute ones.
        let mut by_attr: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, a) in self.atoms.iter().enumerate() {
            if constraints[a.attr].is_some() {
                by_attr.entry(a.attr).or_default().push(i);
            }
        }
        let mut choices: Vec<(Vec<usize>, Vec<Vec<bool>>)> = Vec::new();
        let mut total: usize = 1;
        for (attr, idx) in by_attr {
            let mut cells: Vec<(Constraint, Vec<bool>)> = vec![(constraints[attr].unwrap().clone(), Vec::new())];
            for &i in &idx {
                let set = &self.atoms[i].set;
                let comp = set.complement();
                let mut next = Vec::new();
                for (cell, bits) in cells {
                    for (s, b) in [(set, true), (&comp, false)] {
                        let part = cell.intersect(s).map_err(CheckError::Rejected)?;
                        if !part.is_empty() {
                            let mut bits = bits.clone();
                            bits.push(b);
                            next.push((part, bits));
                        }
                    }
                }
                cells = next;
            }
            let mut vectors: Vec<Vec<bool>> = cells.into_iter().map(|(_, b)| b).collect();
            vectors.sort();
            vectors.dedup();
            total = total.saturating_mul(vectors.len());
            choices.push((idx, vectors));
        }
        if total > EXACT_LIMIT {
            return Ok((Truth::U, undecided()));
        }

        // Atoms on unwritten attributes stay U throughout.
        let mut assignment = kleene.clone();
        let mut pick = vec![0usize; choices.len()];
        let (mut seen_ok, mut seen_f) = (false, false);
        loop {
            for (k, (idx, vectors)) in choices.iter().enumerate() {
                for (j, &i) in idx.iter().enumerate() {
                    assignment[i] = vectors[pick[k]][j].into();
                }
            }
            if self.form.kleene(&assignment) == Truth::F {
                seen_f = true;
            } else {
                seen_ok = true;
            }
            if seen_ok && seen_f {
                return Ok((Truth::U, undecided()));
            }
            let mut k = 0;
            loop {
                if k == pick.len() {
                    return Ok((if seen_ok { Truth::T } else { Truth::F }, None));
                }
                pick[k] += 1;
                if pick[k] < choices[k].1.len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }
}

fn atom_truth(c: &Constraint, set: &Constraint) -> Result<Truth, CheckError> {
    if c.is_subset(set).map_err(CheckError::Rejected)? {
        return Ok(Truth::T);
    }
    if c.intersect(set).map_err(CheckError::Rejected)?.is_empty() {
        return Ok(Truth::F);
    }
    Ok(Truth::U)
}

fn compile(e: &Expr, schema: &Schema, atoms: &mut Vec<Atom>) -> Result<Form, CheckError> {
    let boxed = |e: &Expr, atoms: &mut Vec<Atom>| compile(e, schema, atoms).map(Box::new);
    match e {
        Expr::Bool(b) => Ok(Form::Const(*b)),
        Expr::Not(a) => Ok(Form::Not(boxed(a, atoms)?)),
        Expr::Binary { op, lhs, rhs } if op.is_logical() => {
            let (a, b) = (boxed(lhs, atoms)?, boxed(rhs, atoms)?);
            Ok(match op {
                BinOp::And => Form::And(a, b),
                BinOp::Or => Form::Or(a, b),
                _ => Form::Implies(a, b),
            })
        }
        Expr::Var { .. } => atom(e, e, BinOp::Eq, &Value::Bool(true), schema, atoms),
        Expr::Binary { op, lhs, rhs } if op.is_relational() && *op != BinOp::In => {
            match (lhs.as_ref(), rhs.as_ref()) {
                (v @ Expr::Var { .. }, c) => match literal(c) {
                    Some(c) => atom(e, v, *op, &c, schema, atoms),
                    None => Err(not_checkable(e, "atoms compare one attribute with a constant")),
                },
                (c, v @ Expr::Var { .. }) => match literal(c) {
                    Some(c) => atom(e, v, op.flipped(), &c, schema, atoms),
                    None => Err(not_checkable(e, "atoms compare one attribute with a constant")),
                },
                _ => Err(not_checkable(e, "atoms compare one attribute with a constant")),
            }
        }
        Expr::G(_) | Expr::F(_) | Expr::P(_) => {
            Err(not_checkable(e, "nested temporal operators need the linear model"))
        }
        Expr::Quant { .. } | Expr::ListOp { .. } | Expr::List(_) | Expr::Range(..) => {
            Err(not_checkable(e, "lists and iteration are not supported"))
        }
        _ => Err(not_checkable(e, "only comparisons with constants are supported")),
    }
}

fn atom(
    whole: &Expr,
    var: &Expr,
    op: BinOp,
    c: &Value,
    schema: &Schema,
    atoms: &mut Vec<Atom>,
) -> Result<Form, CheckError> {
    let Expr::Var { name, primed } = var else {
        unreachable!()
    };
    if *primed {
        return Err(not_checkable(whole, "primed variables have no abstract meaning"));
    }
    let attr = schema.index(name).ok_or_else(|| {
        CheckError::Rejected(format!("`{name}` has no constraint: it is not a key attribute"))
    })?;
    let tag = schema.tag(attr);
    if tag == ValueTag::IntList {
        return Err(not_checkable(whole, "lists and iteration are not supported"));
    }
    let set = Constraint::atom(tag, op, c)
        .map_err(|m| not_checkable(whole, &m))?;
    atoms.push(Atom {
        attr,
        set,
        text: pretty_print(whole),
    });
    Ok(Form::Atom(atoms.len() - 1))
}

/// One-shot form of [`Validity::compile`] followed by [`Validity::decide`].
pub fn decide_validity(schema: &Schema, constraints: &[Constraint], q: &Expr) -> Result<Truth, CheckError> {
    Validity::compile(q, schema)?.decide(constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::{Interval, IntervalSet};
    use crate::propspec::parse_property;

    fn dining() -> Schema {
        Schema::new((1..=5).map(|i| (format!("p{i}"), ValueTag::Str)).collect())
    }

    fn e_set(positive: bool) -> Constraint {
        let s = Constraint::singleton(&Value::Str("E".into()));
        if positive {
            s
        } else {
            s.complement()
        }
    }

    const DINING: &str = "(p1 == \"E\" -> p2 != \"E\") && (p2 == \"E\" -> p3 != \"E\") && \
        (p3 == \"E\" -> p4 != \"E\") && (p4 == \"E\" -> p5 != \"E\") && (p5 == \"E\" -> p1 != \"E\")";

    #[test]
    fn dining_state_is_valid() {
        let q = parse_property(DINING).unwrap();
        let c = [true, false, false, true, false].map(e_set);
        assert_eq!(decide_validity(&dining(), &c, &q).unwrap(), Truth::T);
        let c = [true, true, false, false, false].map(e_set);
        assert_eq!(decide_validity(&dining(), &c, &q).unwrap(), Truth::F);
    }

    fn k_schema() -> Schema {
        Schema::new(vec![("k".into(), ValueTag::Int)])
    }

    fn k_in(lo: f64, hi: f64) -> Constraint {
        use crate::abstraction::Bound;
        Constraint::Num(IntervalSet::new(vec![Interval::new(Bound::closed(lo), Bound::open(hi))], true))
    }

    #[test]
    fn coarse_abstraction_is_incompatible() {
        let q = parse_property("k == 1").unwrap();
        let s = k_schema();
        assert_eq!(decide_validity(&s, &[k_in(0.0, f64::INFINITY)], &q).unwrap(), Truth::U);
        assert_eq!(decide_validity(&s, &[k_in(f64::NEG_INFINITY, 0.0)], &q).unwrap(), Truth::F);
        let q = parse_property("k < 3").unwrap();
        assert_eq!(decide_validity(&s, &[k_in(1.0, 3.0)], &q).unwrap(), Truth::T);
    }

    #[test]
    fn correlated_atoms_are_decided_exactly() {
        let s = k_schema();
        let c = [k_in(0.0, 10.0)];
        // Each atom alone is undecided, the formula is not.
        let q = parse_property("k < 5 || k >= 5").unwrap();
        assert_eq!(decide_validity(&s, &c, &q).unwrap(), Truth::T);
        let q = parse_property("k < 5 && k > 7").unwrap();
        assert_eq!(decide_validity(&s, &c, &q).unwrap(), Truth::F);
        let q = parse_property("3 > k").unwrap();
        assert_eq!(decide_validity(&s, &c, &q).unwrap(), Truth::U);
    }

    #[test]
    fn rejects_what_cannot_be_abstracted() {
        let s = Schema::new(vec![("k".into(), ValueTag::Int), ("j".into(), ValueTag::Int)]);
        for src in ["k' == 1", "k == j", "k + 1 == 2", "F[k == 1]", "exists(i, 0:3, k == i)"] {
            let q = parse_property(src).unwrap();
            let err = Validity::compile(&q, &s).unwrap_err();
            assert!(err.to_string().contains("not abstractly checkable"), "{src}: {err}");
        }
        let q = parse_property("z == 1").unwrap();
        assert!(Validity::compile(&q, &s).is_err());
    }

    #[test]
    fn boolean_attributes_as_atoms() {
        let s = Schema::new(vec![("b".into(), ValueTag::Bool)]);
        let q = parse_property("b || !b").unwrap();
        assert_eq!(decide_validity(&s, &[Constraint::full(ValueTag::Bool)], &q).unwrap(), Truth::T);
        let q = parse_property("b").unwrap();
        let only_false = Constraint::singleton(&Value::Bool(false));
        assert_eq!(decide_validity(&s, &[only_false], &q).unwrap(), Truth::F);
    }
}
