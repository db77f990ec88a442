//! Set descriptions for the concrete values an abstract value stands for.

use std::collections::BTreeSet;
use std::fmt;

use crate::propspec::BinOp;
use crate::value::{format_real, quote, Value, ValueTag};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub closed: bool,
}

impl Bound {
    pub fn closed(value: f64) -> Bound {
        Bound {
            value,
            closed: true,
        }
    }

    pub fn open(value: f64) -> Bound {
        Bound {
            value,
            closed: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Interval {
        Interval { lo, hi }
    }

    pub fn all() -> Interval {
        Interval::new(Bound::open(f64::NEG_INFINITY), Bound::open(f64::INFINITY))
    }

    pub fn point(v: f64) -> Interval {
        Interval::new(Bound::closed(v), Bound::closed(v))
    }

    fn is_empty(&self) -> bool {
        self.lo.value > self.hi.value
            || (self.lo.value == self.hi.value && !(self.lo.closed && self.hi.closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = x > self.lo.value || (self.lo.closed && x == self.lo.value);
        let below = x < self.hi.value || (self.hi.closed && x == self.hi.value);
        above && below
    }

    /// Snap to closed integer bounds; `None` if no integer lies inside.
    fn to_integers(self) -> Option<Interval> {
        let lo = if self.lo.value == f64::NEG_INFINITY {
            self.lo
        } else if self.lo.closed {
            Bound::closed(self.lo.value.ceil())
        } else {
            Bound::closed(self.lo.value.floor() + 1.0)
        };
        let hi = if self.hi.value == f64::INFINITY {
            self.hi
        } else if self.hi.closed {
            Bound::closed(self.hi.value.floor())
        } else {
            Bound::closed(self.hi.value.ceil() - 1.0)
        };
        let iv = Interval::new(lo, hi);
        (!iv.is_empty()).then_some(iv)
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let lo = if self.lo.value > other.lo.value {
            self.lo
        } else if other.lo.value > self.lo.value {
            other.lo
        } else {
            Bound {
                value: self.lo.value,
                closed: self.lo.closed && other.lo.closed,
            }
        };
        let hi = if self.hi.value < other.hi.value {
            self.hi
        } else if other.hi.value < self.hi.value {
            other.hi
        } else {
            Bound {
                value: self.hi.value,
                closed: self.hi.closed && other.hi.closed,
            }
        };
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo.closed && self.hi.closed && self.lo.value == self.hi.value {
            return write!(f, "{{{}}}", num(self.lo.value));
        }
        let l = if self.lo.closed { '[' } else { '(' };
        let r = if self.hi.closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", num(self.lo.value), num(self.hi.value))
    }
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format_real(v)
    }
}

/// A normalized union of disjoint, sorted intervals. Over an integer domain
/// every finite bound is a closed integer.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    items: Vec<Interval>,
    integer: bool,
}

impl IntervalSet {
    pub fn new(items: Vec<Interval>, integer: bool) -> IntervalSet {
        let mut s = IntervalSet { items, integer };
        s.normalize();
        s
    }

    pub fn all(integer: bool) -> IntervalSet {
        IntervalSet::new(vec![Interval::all()], integer)
    }

    pub fn empty(integer: bool) -> IntervalSet {
        IntervalSet {
            items: Vec::new(),
            integer,
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.items
    }

    pub fn is_integer(&self) -> bool {
        self.integer
    }

    fn normalize(&mut self) {
        let mut items: Vec<Interval> = if self.integer {
            self.items.iter().filter_map(|i| i.to_integers()).collect()
        } else {
            self.items.iter().copied().filter(|i| !i.is_empty()).collect()
        };
        items.sort_by(|a, b| {
            a.lo.value
                .total_cmp(&b.lo.value)
                .then(b.lo.closed.cmp(&a.lo.closed))
        });
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for iv in items {
            if let Some(last) = out.last_mut() {
                let touches = if self.integer {
                    iv.lo.value <= last.hi.value + 1.0
                } else {
                    iv.lo.value < last.hi.value
                        || (iv.lo.value == last.hi.value && (iv.lo.closed || last.hi.closed))
                };
                if touches {
                    if iv.hi.value > last.hi.value
                        || (iv.hi.value == last.hi.value && iv.hi.closed)
                    {
                        last.hi = iv.hi;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        self.items = out;
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.integer && x.fract() != 0.0 {
            return false;
        }
        self.items.iter().any(|i| i.contains(x))
    }

    pub fn complement(&self) -> IntervalSet {
        let mut gaps = Vec::new();
        let mut start = Bound::open(f64::NEG_INFINITY);
        for iv in &self.items {
            gaps.push(Interval::new(
                start,
                Bound {
                    value: iv.lo.value,
                    closed: !iv.lo.closed,
                },
            ));
            start = Bound {
                value: iv.hi.value,
                closed: !iv.hi.closed,
            };
        }
        gaps.push(Interval::new(start, Bound::open(f64::INFINITY)));
        // An infinite endpoint is never a member.
        for g in &mut gaps {
            if g.lo.value.is_infinite() {
                g.lo.closed = false;
            }
            if g.hi.value.is_infinite() {
                g.hi.closed = false;
            }
        }
        IntervalSet::new(gaps, self.integer)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.items {
            for b in &other.items {
                out.push(a.intersect(b));
            }
        }
        IntervalSet::new(out, self.integer && other.integer)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut items = self.items.clone();
        items.extend_from_slice(&other.items);
        IntervalSet::new(items, self.integer && other.integer)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.intersect(&other.complement()).is_empty()
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("{}");
        }
        for (i, iv) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// A finite set of values or the complement of one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSet<T: Ord> {
    pub items: BTreeSet<T>,
    pub negated: bool,
}

impl<T: Ord + Clone> FinSet<T> {
    pub fn all() -> Self {
        FinSet {
            items: BTreeSet::new(),
            negated: true,
        }
    }

    pub fn of(items: impl IntoIterator<Item = T>) -> Self {
        FinSet {
            items: items.into_iter().collect(),
            negated: false,
        }
    }

    pub fn contains(&self, x: &T) -> bool {
        self.items.contains(x) != self.negated
    }

    pub fn is_empty(&self) -> bool {
        !self.negated && self.items.is_empty()
    }

    pub fn complement(&self) -> Self {
        FinSet {
            items: self.items.clone(),
            negated: !self.negated,
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        match (self.negated, other.negated) {
            (false, false) => FinSet::of(self.items.intersection(&other.items).cloned()),
            (false, true) => FinSet::of(self.items.difference(&other.items).cloned()),
            (true, false) => FinSet::of(other.items.difference(&self.items).cloned()),
            (true, true) => FinSet {
                items: self.items.union(&other.items).cloned().collect(),
                negated: true,
            },
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.complement()
            .intersect(&other.complement())
            .complement()
    }
}

/// Decidable description of a set of concrete values of one attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Num(IntervalSet),
    Str(FinSet<String>),
    Bool(FinSet<bool>),
    List(FinSet<Vec<i64>>),
}

impl Constraint {
    /// The whole domain of a tag.
    pub fn full(tag: ValueTag) -> Constraint {
        match tag {
            ValueTag::Int => Constraint::Num(IntervalSet::all(true)),
            ValueTag::Real => Constraint::Num(IntervalSet::all(false)),
            ValueTag::Str => Constraint::Str(FinSet::all()),
            ValueTag::Bool => Constraint::Bool(FinSet::of([false, true])),
            ValueTag::IntList => Constraint::List(FinSet::all()),
        }
    }

    pub fn singleton(v: &Value) -> Constraint {
        match v {
            Value::Int(i) => Constraint::Num(IntervalSet::new(vec![Interval::point(*i as f64)], true)),
            Value::Real(r) => Constraint::Num(IntervalSet::new(vec![Interval::point(*r)], false)),
            Value::Str(s) => Constraint::Str(FinSet::of([s.clone()])),
            Value::Bool(b) => Constraint::Bool(FinSet::of([*b])),
            Value::IntList(l) => Constraint::List(FinSet::of([l.clone()])),
        }
    }

    /// Solution set of `x <op> c` over the domain of `tag`.
    pub fn atom(tag: ValueTag, op: BinOp, c: &Value) -> Result<Constraint, String> {
        let bad = || format!("`{}` cannot compare a {tag} attribute with {c}", op.symbol());
        if tag.is_numeric() {
            let v = c.as_f64().ok_or_else(bad)?;
            let integer = tag == ValueTag::Int;
            let neg = Bound::open(f64::NEG_INFINITY);
            let pos = Bound::open(f64::INFINITY);
            let items = match op {
                BinOp::Eq => vec![Interval::point(v)],
                BinOp::Ne => vec![Interval::new(neg, Bound::open(v)), Interval::new(Bound::open(v), pos)],
                BinOp::Lt => vec![Interval::new(neg, Bound::open(v))],
                BinOp::Le => vec![Interval::new(neg, Bound::closed(v))],
                BinOp::Gt => vec![Interval::new(Bound::open(v), pos)],
                BinOp::Ge => vec![Interval::new(Bound::closed(v), pos)],
                _ => return Err(bad()),
            };
            return Ok(Constraint::Num(IntervalSet::new(items, integer)));
        }
        if c.tag() != tag {
            return Err(bad());
        }
        let eq = Constraint::singleton(c);
        match op {
            BinOp::Eq => Ok(eq),
            BinOp::Ne => Ok(eq.complement()),
            _ => Err(bad()),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Constraint::Num(s), v) if v.as_f64().is_some() => s.contains(v.as_f64().unwrap()),
            (Constraint::Str(s), Value::Str(x)) => s.contains(x),
            (Constraint::Bool(s), Value::Bool(x)) => s.contains(x),
            (Constraint::List(s), Value::IntList(x)) => s.contains(x),
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Constraint::Num(s) => s.is_empty(),
            Constraint::Str(s) => s.is_empty(),
            Constraint::Bool(s) => s.is_empty(),
            Constraint::List(s) => s.is_empty(),
        }
    }

    pub fn complement(&self) -> Constraint {
        match self {
            Constraint::Num(s) => Constraint::Num(s.complement()),
            Constraint::Str(s) => Constraint::Str(s.complement()),
            Constraint::Bool(s) => bools(s.complement()),
            Constraint::List(s) => Constraint::List(s.complement()),
        }
    }

    pub fn intersect(&self, other: &Constraint) -> Result<Constraint, String> {
        Ok(match (self, other) {
            (Constraint::Num(a), Constraint::Num(b)) => Constraint::Num(a.intersect(b)),
            (Constraint::Str(a), Constraint::Str(b)) => Constraint::Str(a.intersect(b)),
            (Constraint::Bool(a), Constraint::Bool(b)) => bools(a.intersect(b)),
            (Constraint::List(a), Constraint::List(b)) => Constraint::List(a.intersect(b)),
            _ => return Err("constraints over different domains".into()),
        })
    }

    pub fn union(&self, other: &Constraint) -> Result<Constraint, String> {
        Ok(match (self, other) {
            (Constraint::Num(a), Constraint::Num(b)) => Constraint::Num(a.union(b)),
            (Constraint::Str(a), Constraint::Str(b)) => Constraint::Str(a.union(b)),
            (Constraint::Bool(a), Constraint::Bool(b)) => bools(a.union(b)),
            (Constraint::List(a), Constraint::List(b)) => Constraint::List(a.union(b)),
            _ => return Err("constraints over different domains".into()),
        })
    }

    pub fn is_subset(&self, other: &Constraint) -> Result<bool, String> {
        Ok(self.intersect(&other.complement())?.is_empty())
    }
}

/// Booleans are kept in positive form so emptiness is syntactic.
fn bools(s: FinSet<bool>) -> Constraint {
    Constraint::Bool(FinSet::of([false, true]).intersect(&s))
}

fn write_set<T: Ord>(
    f: &mut fmt::Formatter<'_>,
    s: &FinSet<T>,
    item: impl Fn(&T) -> String,
) -> fmt::Result {
    if s.negated {
        f.write_str("∼")?;
    }
    f.write_str("{")?;
    for (i, x) in s.items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&item(x))?;
    }
    f.write_str("}")
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Num(s) => write!(f, "{s}"),
            Constraint::Str(s) => write_set(f, s, |x| quote(x)),
            Constraint::Bool(s) => write_set(f, s, |x| x.to_string()),
            Constraint::List(s) => write_set(f, s, |x| Value::IntList(x.clone()).to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, lc: bool, hi: f64, hc: bool) -> Interval {
        Interval::new(Bound { value: lo, closed: lc }, Bound { value: hi, closed: hc })
    }

    #[test]
    fn merges_touching_intervals() {
        let s = IntervalSet::new(vec![iv(3.0, true, 5.0, false), iv(1.0, true, 3.0, false)], false);
        assert_eq!(s.intervals(), &[iv(1.0, true, 5.0, false)]);
        let s = IntervalSet::new(vec![iv(1.0, true, 3.0, false), iv(3.0, false, 5.0, false)], false);
        assert_eq!(s.intervals().len(), 2);
        assert!(!s.contains(3.0));
    }

    #[test]
    fn integer_domain_snaps_bounds() {
        let s = IntervalSet::new(vec![iv(1.0, true, 3.0, false)], true);
        assert_eq!(s.intervals(), &[iv(1.0, true, 2.0, true)]);
        let s = IntervalSet::new(vec![iv(1.0, true, 2.0, true), iv(3.0, true, 4.0, true)], true);
        assert_eq!(s.intervals(), &[iv(1.0, true, 4.0, true)]);
        assert!(IntervalSet::new(vec![iv(1.0, false, 2.0, false)], true).is_empty());
    }

    #[test]
    fn complement_flips_closedness() {
        let s = IntervalSet::new(vec![iv(1.0, true, 3.0, false)], false);
        let c = s.complement();
        assert!(c.contains(0.5) && c.contains(3.0) && !c.contains(1.0));
        assert_eq!(c.complement(), s);
        assert!(IntervalSet::all(false).complement().is_empty());
        assert_eq!(IntervalSet::empty(true).complement(), IntervalSet::all(true));
    }

    #[test]
    fn string_sets() {
        let e = Constraint::atom(ValueTag::Str, BinOp::Eq, &Value::Str("E".into())).unwrap();
        let not_e = e.complement();
        assert!(not_e.contains(&Value::Str("T".into())));
        assert!(!not_e.contains(&Value::Str("E".into())));
        assert_eq!(not_e.to_string(), "∼{\"E\"}");
        assert!(e.intersect(&not_e).unwrap().is_empty());
        assert!(Constraint::atom(ValueTag::Str, BinOp::Lt, &Value::Str("E".into())).is_err());
    }

    #[test]
    fn numeric_atoms_and_subsets() {
        let ge0 = Constraint::atom(ValueTag::Int, BinOp::Ge, &Value::Int(0)).unwrap();
        let eq1 = Constraint::atom(ValueTag::Int, BinOp::Eq, &Value::Int(1)).unwrap();
        assert!(eq1.is_subset(&ge0).unwrap());
        assert!(!ge0.is_subset(&eq1).unwrap());
        let lt = Constraint::atom(ValueTag::Int, BinOp::Lt, &Value::Real(2.5)).unwrap();
        assert!(lt.contains(&Value::Int(2)) && !lt.contains(&Value::Int(3)));
        assert_eq!(ge0.to_string(), "[0, +inf)");
    }

    #[test]
    fn bool_complement_stays_within_the_domain() {
        let t = Constraint::singleton(&Value::Bool(true));
        let f = t.complement();
        assert_eq!(f, Constraint::singleton(&Value::Bool(false)));
        assert!(t.union(&f).unwrap().complement().is_empty());
    }
}
