//! Concrete evaluation of temporal-free expressions on one state.

use std::fmt;

use thiserror::Error;

use super::truth::Truth;
use crate::abstraction::AbstractValue;
use crate::model::{Cell, Schema};
use crate::propspec::{pretty_print, BinOp, Expr, ListOp, Quantifier};
use crate::value::Value;

/// Result of evaluating a subexpression.
#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Truth(Truth),
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<Val>),
    /// Depends on an undefined component.
    Undef,
}

impl Val {
    pub fn from_value(v: &Value) -> Val {
        match v {
            Value::Int(i) => Val::Int(*i),
            Value::Real(r) => Val::Real(*r),
            Value::Bool(b) => Val::Truth((*b).into()),
            Value::Str(s) => Val::Str(s.clone()),
            Value::IntList(l) => Val::List(l.iter().map(|i| Val::Int(*i)).collect()),
        }
    }

    fn from_cell(c: &Cell) -> Val {
        match c {
            Cell::Concrete(v) | Cell::Abstract(AbstractValue::Raw(v)) => Val::from_value(v),
            _ => Val::Undef,
        }
    }

    fn num(&self) -> Option<f64> {
        match self {
            Val::Int(i) => Some(*i as f64),
            Val::Real(r) => Some(*r),
            _ => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Val::Truth(_) => "bool",
            Val::Int(_) => "int",
            Val::Real(_) => "real",
            Val::Str(_) => "str",
            Val::List(_) => "list",
            Val::Undef => "undefined",
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Truth(t) => write!(f, "{t}"),
            Val::Int(i) => write!(f, "{i}"),
            Val::Real(r) => write!(f, "{r}"),
            Val::Str(s) => write!(f, "{s:?}"),
            Val::List(l) => {
                f.write_str("{")?;
                for (i, x) in l.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
            Val::Undef => f.write_str("?"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub struct EvalError {
    pub seq: Option<u64>,
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.seq {
            Some(s) => write!(f, "evaluation error at seq {s}: {}", self.message),
            None => write!(f, "evaluation error in the initial state: {}", self.message),
        }
    }
}

/// Read access to one state vector.
pub trait StateView {
    fn cell(&self, attr: usize) -> &Cell;
}

impl StateView for Vec<Cell> {
    fn cell(&self, attr: usize) -> &Cell {
        &self[attr]
    }
}

/// A state seen through one pending write, used for the LSM successor.
pub struct Patched<'a> {
    pub base: &'a [Cell],
    pub attr: usize,
    pub cell: &'a Cell,
}

impl StateView for Patched<'_> {
    fn cell(&self, attr: usize) -> &Cell {
        if attr == self.attr {
            self.cell
        } else {
            &self.base[attr]
        }
    }
}

/// Evaluates temporal subformulas nested inside a state expression.
pub trait TemporalHook {
    fn temporal(&self, e: &Expr, env: &[(String, Val)], pos: usize) -> Result<Truth, EvalError>;
}

/// Rejects every nested temporal operator.
pub struct NoTemporal;

impl TemporalHook for NoTemporal {
    fn temporal(&self, e: &Expr, _: &[(String, Val)], _: usize) -> Result<Truth, EvalError> {
        Err(EvalError {
            seq: None,
            message: format!("`{}` cannot be nested here", pretty_print(e)),
        })
    }
}

/// The state an expression is evaluated in.
pub struct Frame<'a> {
    pub schema: &'a Schema,
    pub cur: &'a [Cell],
    /// Successor state for primed variables; `None` makes them undefined.
    pub next: Option<&'a dyn StateView>,
    pub pos: usize,
    pub seq: Option<u64>,
}

impl<'a> Frame<'a> {
    fn err(&self, message: impl Into<String>) -> EvalError {
        EvalError {
            seq: self.seq,
            message: message.into(),
        }
    }

    /// Evaluate a boolean expression to a truth value.
    pub fn truth(&self, e: &Expr, hook: &dyn TemporalHook) -> Result<Truth, EvalError> {
        let mut env = Vec::new();
        self.truth_in(e, &mut env, hook)
    }

    pub fn truth_in(
        &self,
        e: &Expr,
        env: &mut Vec<(String, Val)>,
        hook: &dyn TemporalHook,
    ) -> Result<Truth, EvalError> {
        match self.eval(e, env, hook)? {
            Val::Truth(t) => Ok(t),
            Val::Undef => Ok(Truth::U),
            other => Err(self.err(format!(
                "`{}` is a {}, not a condition",
                pretty_print(e),
                other.kind()
            ))),
        }
    }

    pub fn eval(
        &self,
        e: &Expr,
        env: &mut Vec<(String, Val)>,
        hook: &dyn TemporalHook,
    ) -> Result<Val, EvalError> {
        Ok(match e {
            Expr::Bool(b) => Val::Truth((*b).into()),
            Expr::Int(i) => Val::Int(*i),
            Expr::Real(r) => Val::Real(*r),
            Expr::Str(s) => Val::Str(s.clone()),
            Expr::List(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match self.eval(item, env, hook)? {
                        Val::Undef => return Ok(Val::Undef),
                        v => out.push(v),
                    }
                }
                Val::List(out)
            }
            Expr::Range(lo, hi) => {
                let (lo, hi) = (self.eval(lo, env, hook)?, self.eval(hi, env, hook)?);
                match (lo, hi) {
                    (Val::Int(a), Val::Int(b)) => Val::List((a..b.max(a)).map(Val::Int).collect()),
                    (Val::Undef, _) | (_, Val::Undef) => Val::Undef,
                    (a, b) => {
                        return Err(self.err(format!(
                            "range bounds must be integers, got {} and {}",
                            a.kind(),
                            b.kind()
                        )))
                    }
                }
            }
            Expr::Var { name, primed } => self.var(name, *primed, env)?,
            Expr::Not(inner) => Val::Truth(self.truth_in(inner, env, hook)?.not()),
            Expr::Binary { op, lhs, rhs } if op.is_logical() => {
                let a = self.truth_in(lhs, env, hook)?;
                let b = self.truth_in(rhs, env, hook)?;
                Val::Truth(match op {
                    BinOp::And => a.and(b),
                    BinOp::Or => a.or(b),
                    _ => a.implies(b),
                })
            }
            Expr::Binary { op, lhs, rhs } => {
                let a = self.eval(lhs, env, hook)?;
                let b = self.eval(rhs, env, hook)?;
                if op.is_relational() {
                    Val::Truth(self.compare(*op, &a, &b)?)
                } else {
                    self.arith(*op, a, b)?
                }
            }
            Expr::ListOp { list, op } => match self.eval(list, env, hook)? {
                Val::Undef => Val::Undef,
                Val::List(items) => self.list_op(*op, &items)?,
                other => {
                    return Err(self.err(format!("`#{}` needs a list, got {}", op.name(), other.kind())))
                }
            },
            Expr::Quant { q, var, list, body } => {
                let items = match self.eval(list, env, hook)? {
                    Val::Undef => return Ok(Val::Truth(Truth::U)),
                    Val::List(items) => items,
                    other => {
                        return Err(self.err(format!(
                            "quantifier ranges over a list, got {}",
                            other.kind()
                        )))
                    }
                };
                let mut acc = match q {
                    Quantifier::All => Truth::T,
                    Quantifier::Exists => Truth::F,
                };
                for item in items {
                    env.push((var.clone(), item));
                    let t = self.truth_in(body, env, hook);
                    env.pop();
                    let t = t?;
                    acc = match q {
                        Quantifier::All => acc.and(t),
                        Quantifier::Exists => acc.or(t),
                    };
                }
                Val::Truth(acc)
            }
            Expr::G(_) | Expr::F(_) | Expr::P(_) => Val::Truth(
                hook.temporal(e, env, self.pos)
                    .map_err(|mut err| {
                        err.seq = err.seq.or(self.seq);
                        err
                    })?,
            ),
        })
    }

    fn var(&self, name: &str, primed: bool, env: &[(String, Val)]) -> Result<Val, EvalError> {
        if let Some((_, v)) = env.iter().rev().find(|(n, _)| n == name) {
            if primed {
                return Err(self.err(format!("iterator variable `{name}` cannot be primed")));
            }
            return Ok(v.clone());
        }
        let idx = self
            .schema
            .index(name)
            .ok_or_else(|| self.err(format!("unknown attribute `{name}`")))?;
        Ok(if primed {
            match self.next {
                Some(n) => Val::from_cell(n.cell(idx)),
                None => Val::Undef,
            }
        } else {
            Val::from_cell(&self.cur[idx])
        })
    }

    fn compare(&self, op: BinOp, a: &Val, b: &Val) -> Result<Truth, EvalError> {
        if op == BinOp::In {
            return match (a, b) {
                (Val::Undef, _) | (_, Val::Undef) => Ok(Truth::U),
                (x, Val::List(items)) => {
                    let mut acc = Truth::F;
                    for item in items {
                        acc = acc.or(self.equal(x, item)?);
                    }
                    Ok(acc)
                }
                (_, other) => Err(self.err(format!("`in` needs a list, got {}", other.kind()))),
            };
        }
        if matches!(a, Val::Undef) || matches!(b, Val::Undef) {
            return Ok(Truth::U);
        }
        match op {
            BinOp::Eq => self.equal(a, b),
            BinOp::Ne => Ok(self.equal(a, b)?.not()),
            _ => match (a.num(), b.num()) {
                (Some(x), Some(y)) => {
                    let r = match (a, b) {
                        (Val::Int(i), Val::Int(j)) => match op {
                            BinOp::Lt => i < j,
                            BinOp::Le => i <= j,
                            BinOp::Gt => i > j,
                            _ => i >= j,
                        },
                        _ => match op {
                            BinOp::Lt => x < y,
                            BinOp::Le => x <= y,
                            BinOp::Gt => x > y,
                            _ => x >= y,
                        },
                    };
                    Ok(r.into())
                }
                _ => Err(self.err(format!(
                    "`{}` compares numbers, got {} and {}",
                    op.symbol(),
                    a.kind(),
                    b.kind()
                ))),
            },
        }
    }

    fn equal(&self, a: &Val, b: &Val) -> Result<Truth, EvalError> {
        Ok(match (a, b) {
            (Val::Undef, _) | (_, Val::Undef) => Truth::U,
            (Val::Int(x), Val::Int(y)) => (x == y).into(),
            (x, y) if x.num().is_some() && y.num().is_some() => (x.num() == y.num()).into(),
            (Val::Str(x), Val::Str(y)) => (x == y).into(),
            (Val::Truth(x), Val::Truth(y)) => {
                if *x == Truth::U || *y == Truth::U {
                    Truth::U
                } else {
                    (x == y).into()
                }
            }
            (Val::List(x), Val::List(y)) => {
                if x.len() != y.len() {
                    return Ok(Truth::F);
                }
                let mut acc = Truth::T;
                for (p, q) in x.iter().zip(y) {
                    acc = acc.and(self.equal(p, q)?);
                }
                acc
            }
            (x, y) => {
                return Err(self.err(format!("cannot compare {} with {}", x.kind(), y.kind())))
            }
        })
    }

    fn arith(&self, op: BinOp, a: Val, b: Val) -> Result<Val, EvalError> {
        if matches!(a, Val::Undef) || matches!(b, Val::Undef) {
            return Ok(Val::Undef);
        }
        if let (Val::Int(x), Val::Int(y)) = (&a, &b) {
            let r = match op {
                BinOp::Add => x.checked_add(*y),
                BinOp::Sub => x.checked_sub(*y),
                BinOp::Mul => x.checked_mul(*y),
                _ => {
                    if *y == 0 {
                        return Err(self.err("division by zero"));
                    }
                    x.checked_div(*y)
                }
            };
            return r
                .map(Val::Int)
                .ok_or_else(|| self.err(format!("integer overflow in `{}`", op.symbol())));
        }
        match (a.num(), b.num()) {
            (Some(x), Some(y)) => Ok(Val::Real(match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                _ => {
                    if y == 0.0 {
                        return Err(self.err("division by zero"));
                    }
                    x / y
                }
            })),
            _ => Err(self.err(format!(
                "`{}` needs numbers, got {} and {}",
                op.symbol(),
                a.kind(),
                b.kind()
            ))),
        }
    }

    fn list_op(&self, op: ListOp, items: &[Val]) -> Result<Val, EvalError> {
        if op == ListOp::Size {
            return Ok(Val::Int(items.len() as i64));
        }
        let mut best: Option<&Val> = None;
        for item in items {
            let x = item
                .num()
                .ok_or_else(|| self.err(format!("`#{}` needs a numeric list", op.name())))?;
            let better = match best {
                None => true,
                Some(b) => {
                    let y = b.num().unwrap();
                    if op == ListOp::Min {
                        x < y
                    } else {
                        x > y
                    }
                }
            };
            if better {
                best = Some(item);
            }
        }
        Ok(match (best, op) {
            (Some(v), _) => v.clone(),
            (None, ListOp::Min) => Val::Real(f64::INFINITY),
            (None, _) => Val::Real(f64::NEG_INFINITY),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propspec::parse_property;
    use crate::value::ValueTag;

    fn schema(names: &[(&str, ValueTag)]) -> Schema {
        Schema::new(names.iter().map(|(n, t)| (n.to_string(), *t)).collect())
    }

    fn c(v: Value) -> Cell {
        Cell::Concrete(v)
    }

    fn truth(s: &Schema, cur: &[Cell], next: Option<&[Cell]>, src: &str) -> Truth {
        let e = parse_property(src).unwrap();
        let next = next.map(|n| n.to_vec());
        let next_view: Option<&dyn StateView> = next.as_ref().map(|n| n as &dyn StateView);
        Frame {
            schema: s,
            cur,
            next: next_view,
            pos: 0,
            seq: Some(1),
        }
        .truth(&e, &NoTemporal)
        .unwrap()
    }

    #[test]
    fn readers_writers_state() {
        let s = schema(&[("r", ValueTag::Int), ("w", ValueTag::Int)]);
        let st = [c(Value::Int(2)), c(Value::Int(0))];
        assert_eq!(truth(&s, &st, None, "r > 0 -> w == 0"), Truth::T);
    }

    #[test]
    fn primed_variables_read_the_successor() {
        let s = schema(&[("ww", ValueTag::Int), ("r", ValueTag::Int)]);
        let cur = [c(Value::Int(1)), c(Value::Int(3))];
        let next = [c(Value::Int(1)), c(Value::Int(2))];
        assert_eq!(truth(&s, &cur, Some(&next), "ww > 0 -> r' <= r"), Truth::T);
        assert_eq!(truth(&s, &cur, None, "ww > 0 -> r' <= r"), Truth::U);
    }

    #[test]
    fn empty_list_sentinels() {
        let s = schema(&[("f", ValueTag::Int), ("up", ValueTag::IntList)]);
        let st = [c(Value::Int(3)), c(Value::IntList(vec![]))];
        assert_eq!(truth(&s, &st, None, "f >= up#max"), Truth::T);
        assert_eq!(truth(&s, &st, None, "f <= up#min"), Truth::T);
        assert_eq!(truth(&s, &st, None, "up#size == 0"), Truth::T);
        let st = [c(Value::Int(3)), c(Value::IntList(vec![5, 1]))];
        assert_eq!(truth(&s, &st, None, "up#min == 1 && up#max == 5"), Truth::T);
        assert_eq!(truth(&s, &st, None, "all(i, up, i != f) && exists(i, up, i > f)"), Truth::T);
        assert_eq!(truth(&s, &st, None, "5 in up && !(2 in up) && f in 1:4"), Truth::T);
    }

    #[test]
    fn undefined_components_yield_unknown() {
        let s = schema(&[("r", ValueTag::Int), ("w", ValueTag::Int)]);
        let st = [c(Value::Int(0)), Cell::Undefined];
        assert_eq!(truth(&s, &st, None, "w == 0"), Truth::U);
        assert_eq!(truth(&s, &st, None, "r > 0 -> w == 0"), Truth::T);
        assert_eq!(truth(&s, &st, None, "w + 1 > 0"), Truth::U);
    }

    #[test]
    fn type_and_arithmetic_errors() {
        let s = schema(&[("s", ValueTag::Str), ("k", ValueTag::Int)]);
        let st = [c(Value::Str("a".into())), c(Value::Int(0))];
        let e = parse_property("s < \"b\"").unwrap();
        let f = Frame { schema: &s, cur: &st[..], next: None, pos: 0, seq: Some(9) };
        let err = f.truth(&e, &NoTemporal).unwrap_err();
        assert_eq!(err.seq, Some(9));
        assert!(f.truth(&parse_property("1 / k == 0").unwrap(), &NoTemporal).is_err());
        assert!(f.truth(&parse_property("nope == 1").unwrap(), &NoTemporal).is_err());
        assert_eq!(truth(&s, &st, None, "7 / 2 == 3 && 7.0 / 2 == 3.5"), Truth::T);
    }
}
