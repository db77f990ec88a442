use std::fmt;

use super::constraint::Constraint;
use super::{AbstractValue, AbstractionError};
use crate::model::Cell;
use crate::propspec::{parse_property, pretty_print, BinOp, Expr};
use crate::value::{format_real, Value, ValueTag};

/// Predicate of a boolean abstraction over one attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum Pred {
    Atom { op: BinOp, constant: Value },
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

impl Pred {
    pub fn eval(&self, v: &Value) -> bool {
        match self {
            Pred::Atom { op, constant } => match (v.as_f64(), constant.as_f64()) {
                (Some(a), Some(b)) => match op {
                    BinOp::Eq => a == b,
                    BinOp::Ne => a != b,
                    BinOp::Lt => a < b,
                    BinOp::Gt => a > b,
                    BinOp::Le => a <= b,
                    BinOp::Ge => a >= b,
                    _ => false,
                },
                _ => match op {
                    BinOp::Eq => v == constant,
                    BinOp::Ne => v != constant,
                    _ => false,
                },
            },
            Pred::Not(p) => !p.eval(v),
            Pred::And(a, b) => a.eval(v) && b.eval(v),
            Pred::Or(a, b) => a.eval(v) || b.eval(v),
        }
    }

    /// The set of values satisfying the predicate.
    pub fn solutions(&self, tag: ValueTag) -> Result<Constraint, String> {
        match self {
            Pred::Atom { op, constant } => Constraint::atom(tag, *op, constant),
            Pred::Not(p) => Ok(p.solutions(tag)?.complement()),
            Pred::And(a, b) => a.solutions(tag)?.intersect(&b.solutions(tag)?),
            Pred::Or(a, b) => a.solutions(tag)?.union(&b.solutions(tag)?),
        }
    }

    fn to_expr(&self, attr: &str) -> Expr {
        match self {
            Pred::Atom { op, constant } => Expr::bin(*op, Expr::var(attr), literal(constant)),
            Pred::Not(p) => Expr::not(p.to_expr(attr)),
            Pred::And(a, b) => Expr::bin(BinOp::And, a.to_expr(attr), b.to_expr(attr)),
            Pred::Or(a, b) => Expr::bin(BinOp::Or, a.to_expr(attr), b.to_expr(attr)),
        }
    }

    fn from_expr(e: &Expr, attr: &str, tag: ValueTag) -> Result<Pred, String> {
        match e {
            Expr::Not(p) => Ok(Pred::Not(Box::new(Pred::from_expr(p, attr, tag)?))),
            Expr::Binary {
                op: op @ (BinOp::And | BinOp::Or),
                lhs,
                rhs,
            } => {
                let a = Box::new(Pred::from_expr(lhs, attr, tag)?);
                let b = Box::new(Pred::from_expr(rhs, attr, tag)?);
                Ok(if *op == BinOp::And {
                    Pred::And(a, b)
                } else {
                    Pred::Or(a, b)
                })
            }
            Expr::Binary { op, lhs, rhs } if op.is_relational() && *op != BinOp::In => {
                let (op, constant) = match (&**lhs, &**rhs) {
                    (Expr::Var { name, primed: false }, c) if name == attr => (*op, constant_of(c)?),
                    (c, Expr::Var { name, primed: false }) if name == attr => {
                        (op.flipped(), constant_of(c)?)
                    }
                    _ => {
                        return Err(format!(
                            "`{}` must compare `{attr}` with a constant",
                            pretty_print(e)
                        ))
                    }
                };
                let legal = if tag.is_numeric() {
                    matches!(op, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
                } else {
                    matches!(op, BinOp::Eq | BinOp::Ne)
                };
                if !legal {
                    return Err(format!(
                        "`{}` is not available on {tag} attributes",
                        op.symbol(),
                    ));
                }
                let ok = if tag.is_numeric() {
                    constant.as_f64().is_some()
                } else {
                    constant.tag() == tag
                };
                if !ok {
                    return Err(format!("constant {constant} does not fit {tag} attribute `{attr}`"));
                }
                Ok(Pred::Atom { op, constant })
            }
            other => Err(format!(
                "`{}` is not a comparison of `{attr}` with a constant",
                pretty_print(other)
            )),
        }
    }
}

fn constant_of(e: &Expr) -> Result<Value, String> {
    match e {
        Expr::Int(i) => Ok(Value::Int(*i)),
        Expr::Real(r) => Ok(Value::Real(*r)),
        Expr::Str(s) => Ok(Value::Str(s.clone())),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::List(items) => items
            .iter()
            .map(|i| match i {
                Expr::Int(v) => Ok(*v),
                _ => Err("list constants must hold integers".to_owned()),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Value::IntList),
        other => Err(format!("`{}` is not a constant", pretty_print(other))),
    }
}

fn literal(v: &Value) -> Expr {
    match v {
        Value::Int(i) => Expr::Int(*i),
        Value::Real(r) => Expr::Real(*r),
        Value::Bool(b) => Expr::Bool(*b),
        Value::Str(s) => Expr::Str(s.clone()),
        Value::IntList(l) => Expr::List(l.iter().map(|i| Expr::Int(*i)).collect()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbsForm {
    Identity,
    Bool(Pred),
    /// Strictly increasing cutpoints.
    Range(Vec<f64>),
}

/// Maps one attribute's concrete values to abstract values.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractionFunction {
    pub attr: String,
    pub tag: ValueTag,
    pub form: AbsForm,
}

impl AbstractionFunction {
    pub fn identity(attr: &str, tag: ValueTag) -> AbstractionFunction {
        AbstractionFunction {
            attr: attr.to_owned(),
            tag,
            form: AbsForm::Identity,
        }
    }

    /// Boolean abstraction from a predicate expression over `attr`.
    pub fn boolean(attr: &str, tag: ValueTag, pred: &Expr) -> Result<AbstractionFunction, String> {
        Ok(AbstractionFunction {
            attr: attr.to_owned(),
            tag,
            form: AbsForm::Bool(Pred::from_expr(pred, attr, tag)?),
        })
    }

    pub fn range(attr: &str, tag: ValueTag, cuts: Vec<f64>) -> Result<AbstractionFunction, String> {
        if !tag.is_numeric() {
            return Err(format!("range abstraction needs a numeric attribute, `{attr}` is {tag}"));
        }
        if cuts.is_empty() {
            return Err("range abstraction needs at least one cutpoint".into());
        }
        if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err("range cutpoints must be finite and strictly increasing".into());
        }
        Ok(AbstractionFunction {
            attr: attr.to_owned(),
            tag,
            form: AbsForm::Range(cuts),
        })
    }

    /// Parse `identity`, `bool(<pred>)`, or `range[c1:c2:...]`.
    pub fn parse(attr: &str, tag: ValueTag, text: &str) -> Result<AbstractionFunction, String> {
        let text = text.trim();
        if text == "identity" {
            return Ok(AbstractionFunction::identity(attr, tag));
        }
        if let Some(inner) = text.strip_prefix("bool(").and_then(|t| t.strip_suffix(')')) {
            let e = parse_property(inner).map_err(|e| format!("in bool(...): {e}"))?;
            return AbstractionFunction::boolean(attr, tag, &e);
        }
        if let Some(inner) = text.strip_prefix("range[").and_then(|t| t.strip_suffix(']')) {
            let cuts = inner
                .split(':')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("bad cutpoint `{}`", c.trim()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            return AbstractionFunction::range(attr, tag, cuts);
        }
        Err(format!(
            "unknown abstraction `{text}`; expected identity, bool(...), or range[...]"
        ))
    }

    pub fn is_identity(&self) -> bool {
        self.form == AbsForm::Identity
    }

    pub fn apply_value(&self, v: &Value) -> AbstractValue {
        match &self.form {
            AbsForm::Identity => AbstractValue::Raw(v.clone()),
            AbsForm::Bool(p) => AbstractValue::Bool(p.eval(v)),
            AbsForm::Range(cuts) => {
                let x = v.as_f64().unwrap_or(f64::NAN);
                AbstractValue::Bucket(cuts.iter().take_while(|c| **c <= x).count())
            }
        }
    }

    /// Abstract a cell. Undefined maps to `Unknown`.
    pub fn apply(&self, cell: &Cell, seq: u64) -> Result<AbstractValue, AbstractionError> {
        match cell {
            Cell::Undefined => Ok(AbstractValue::Unknown),
            Cell::Abstract(a) => Ok(a.clone()),
            Cell::Concrete(v) => {
                if v.tag() != self.tag {
                    return Err(AbstractionError::TagMismatch {
                        attr: self.attr.clone(),
                        seq,
                        expected: self.tag,
                        found: v.tag(),
                    });
                }
                Ok(self.apply_value(v))
            }
        }
    }

    /// Every abstract value the function can produce, or `None` when the
    /// range is the (unbounded) concrete domain.
    pub fn abstract_values(&self) -> Option<Vec<AbstractValue>> {
        match &self.form {
            AbsForm::Identity => None,
            AbsForm::Bool(_) => Some(vec![AbstractValue::Bool(false), AbstractValue::Bool(true)]),
            AbsForm::Range(c) => Some((0..=c.len()).map(AbstractValue::Bucket).collect()),
        }
    }

    /// The concrete values that abstract to `av`.
    pub fn characteristic(&self, av: &AbstractValue) -> Result<Constraint, AbstractionError> {
        let out_of_range = || AbstractionError::NotInRange {
            attr: self.attr.clone(),
            value: av.to_string(),
        };
        match (&self.form, av) {
            (_, AbstractValue::Unknown) => Ok(Constraint::full(self.tag)),
            (AbsForm::Identity, AbstractValue::Raw(v)) if v.tag() == self.tag => {
                Ok(Constraint::singleton(v))
            }
            (AbsForm::Bool(p), AbstractValue::Bool(b)) => {
                let set = p.solutions(self.tag).map_err(AbstractionError::Invalid)?;
                Ok(if *b { set } else { set.complement() })
            }
            (AbsForm::Range(cuts), AbstractValue::Bucket(i)) if *i <= cuts.len() => {
                let mut set = Constraint::full(self.tag);
                if *i > 0 {
                    set = set
                        .intersect(&Constraint::atom(self.tag, BinOp::Ge, &Value::Real(cuts[i - 1])).unwrap())
                        .unwrap();
                }
                if *i < cuts.len() {
                    set = set
                        .intersect(&Constraint::atom(self.tag, BinOp::Lt, &Value::Real(cuts[*i])).unwrap())
                        .unwrap();
                }
                Ok(set)
            }
            _ => Err(out_of_range()),
        }
    }

    /// Text of the abstract value as shown in diagrams: `E`, `∼E`,
    /// `[1:3)`, `<324`, `>=411`, or the predicate itself.
    pub fn label(&self, av: &AbstractValue) -> String {
        match (&self.form, av) {
            (_, AbstractValue::Unknown) => "?".into(),
            (AbsForm::Bool(Pred::Atom { op: BinOp::Eq, constant }), AbstractValue::Bool(b)) => {
                let c = match constant {
                    Value::Str(s) => s.clone(),
                    other => other.to_string(),
                };
                if *b {
                    c
                } else {
                    format!("∼{c}")
                }
            }
            (AbsForm::Bool(p), AbstractValue::Bool(b)) => {
                let text = pretty_print(&p.to_expr(&self.attr));
                if *b {
                    text
                } else {
                    format!("∼({text})")
                }
            }
            (AbsForm::Range(cuts), AbstractValue::Bucket(i)) => {
                let c = |k: usize| cut(cuts[k]);
                if *i == 0 {
                    format!("<{}", c(0))
                } else if *i == cuts.len() {
                    format!(">={}", c(i - 1))
                } else {
                    format!("[{}:{})", c(i - 1), c(*i))
                }
            }
            (_, other) => other.to_string(),
        }
    }

    /// Source form accepted by [`AbstractionFunction::parse`].
    pub fn describe(&self) -> String {
        match &self.form {
            AbsForm::Identity => "identity".into(),
            AbsForm::Bool(p) => format!("bool({})", pretty_print(&p.to_expr(&self.attr))),
            AbsForm::Range(cuts) => {
                let parts: Vec<_> = cuts.iter().map(|c| cut(*c)).collect();
                format!("range[{}]", parts.join(":"))
            }
        }
    }
}

fn cut(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{c}")
    } else {
        format_real(c)
    }
}

impl fmt::Display for AbstractionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.attr, self.describe())
    }
}
