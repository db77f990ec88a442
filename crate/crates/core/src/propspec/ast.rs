use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Implies => "->",
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::In => "in",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div => 7,
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::Implies | BinOp::Or | BinOp::And)
    }

    pub fn is_relational(self) -> bool {
        self.precedence() == 5
    }

    /// Comparison with the operands swapped: `c < x` is `x > c`.
    pub fn flipped(self) -> BinOp {
        match self {
            BinOp::Lt => BinOp::Gt,
            BinOp::Le => BinOp::Ge,
            BinOp::Gt => BinOp::Lt,
            BinOp::Ge => BinOp::Le,
            other => other,
        }
    }
}

/// Precedence of the prefix `!`, between `&&` and the comparisons.
pub const NOT_PRECEDENCE: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ListOp {
    Min,
    Max,
    Size,
}

impl ListOp {
    pub fn name(self) -> &'static str {
        match self {
            ListOp::Min => "min",
            ListOp::Max => "max",
            ListOp::Size => "size",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    All,
    Exists,
}

/// Property AST.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<Expr>),
    /// `lo:hi`, integers from `lo` up to but excluding `hi`.
    Range(Box<Expr>, Box<Expr>),
    Var {
        name: String,
        primed: bool,
    },
    Not(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    ListOp {
        list: Box<Expr>,
        op: ListOp,
    },
    Quant {
        q: Quantifier,
        var: String,
        list: Box<Expr>,
        body: Box<Expr>,
    },
    G(Box<Expr>),
    F(Box<Expr>),
    P(Box<[Expr; 3]>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var {
            name: name.to_owned(),
            primed: false,
        }
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn g(e: Expr) -> Expr {
        Expr::G(Box::new(e))
    }

    pub fn f(e: Expr) -> Expr {
        Expr::F(Box::new(e))
    }

    pub fn p(f1: Expr, f2: Expr, f3: Expr) -> Expr {
        Expr::P(Box::new([f1, f2, f3]))
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) | Expr::Str(_) | Expr::Var { .. } => {
                vec![]
            }
            Expr::List(items) => items.iter().collect(),
            Expr::Range(a, b) => vec![a, b],
            Expr::Not(e) | Expr::G(e) | Expr::F(e) => vec![e],
            Expr::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Expr::ListOp { list, .. } => vec![list],
            Expr::Quant { list, body, .. } => vec![list, body],
            Expr::P(slots) => slots.iter().collect(),
        }
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Expr::G(_) | Expr::F(_) | Expr::P(_))
    }

    /// True if a `G`, `F`, or `P` occurs anywhere in the expression.
    pub fn contains_temporal(&self) -> bool {
        self.is_temporal() || self.children().into_iter().any(Expr::contains_temporal)
    }

    pub fn contains_f_or_p(&self) -> bool {
        matches!(self, Expr::F(_) | Expr::P(_))
            || self.children().into_iter().any(Expr::contains_f_or_p)
    }

    pub fn contains_primed(&self) -> bool {
        matches!(self, Expr::Var { primed: true, .. })
            || self.children().into_iter().any(Expr::contains_primed)
    }

    /// Free attribute names, excluding quantifier-bound variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_vars(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var { name, .. } => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            Expr::Quant {
                var, list, body, ..
            } => {
                list.collect_vars(bound, out);
                bound.push(var.clone());
                body.collect_vars(bound, out);
                bound.pop();
            }
            other => {
                for c in other.children() {
                    c.collect_vars(bound, out);
                }
            }
        }
    }
}
