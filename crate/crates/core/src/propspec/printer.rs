use super::ast::{BinOp, Expr, Quantifier, NOT_PRECEDENCE};
use crate::value::{format_real, quote};

const ATOM: u8 = 10;
const UNARY: u8 = 8;

/// Canonical text with the fewest parentheses that reparse to the same AST.
pub fn pretty_print(e: &Expr) -> String {
    let mut out = String::new();
    write(e, false, &mut out);
    out
}

/// Every compound subexpression wrapped in parentheses.
pub fn print_parenthesized(e: &Expr) -> String {
    let mut out = String::new();
    write(e, true, &mut out);
    out
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => op.precedence(),
        Expr::Not(_) => NOT_PRECEDENCE,
        Expr::Int(i) if *i < 0 => UNARY,
        Expr::Real(r) if r.is_sign_negative() => UNARY,
        Expr::Range(..) => 5,
        _ => ATOM,
    }
}

fn operand(e: &Expr, parens: bool, full: bool, out: &mut String) {
    let wrap = parens || (full && prec(e) < ATOM);
    if wrap {
        out.push('(');
    }
    write(e, full, out);
    if wrap {
        out.push(')');
    }
}

fn write(e: &Expr, full: bool, out: &mut String) {
    match e {
        Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Int(i) => out.push_str(&i.to_string()),
        Expr::Real(r) => out.push_str(&format_real(*r)),
        Expr::Str(s) => out.push_str(&quote(s)),
        Expr::List(items) => {
            out.push('{');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                operand(item, prec(item) < 6, full, out);
            }
            out.push('}');
        }
        Expr::Range(lo, hi) => {
            operand(lo, prec(lo) < 6, full, out);
            out.push(':');
            operand(hi, prec(hi) < 6, full, out);
        }
        Expr::Var { name, primed } => {
            out.push_str(name);
            if *primed {
                out.push('\'');
            }
        }
        Expr::Not(inner) => {
            out.push('!');
            operand(inner, prec(inner) < ATOM && prec(inner) != UNARY, full, out);
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            let (lp, rp) = (prec(lhs), prec(rhs));
            let (lwrap, rwrap) = match op {
                BinOp::Implies => (lp <= p, rp < p),
                _ if op.is_relational() => (lp <= p, rp <= p),
                _ => (lp < p, rp <= p),
            };
            operand(lhs, lwrap, full, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            if *op == BinOp::In {
                if let Expr::Range(..) = **rhs {
                    write(rhs, full, out);
                    return;
                }
            }
            operand(rhs, rwrap, full, out);
        }
        Expr::ListOp { list, op } => {
            operand(list, prec(list) < ATOM, full, out);
            out.push('#');
            out.push_str(op.name());
        }
        Expr::Quant { q, var, list, body } => {
            out.push_str(match q {
                Quantifier::All => "all(",
                Quantifier::Exists => "exists(",
            });
            out.push_str(var);
            out.push_str(", ");
            write(list, full, out);
            out.push_str(", ");
            write(body, full, out);
            out.push(')');
        }
        Expr::G(body) | Expr::F(body) => {
            out.push_str(if matches!(e, Expr::G(_)) { "G[" } else { "F[" });
            write(body, full, out);
            out.push(']');
        }
        Expr::P(slots) => {
            out.push_str("P[");
            for (i, s) in slots.iter().enumerate() {
                if i > 0 {
                    out.push_str(" ~~> ");
                }
                write(s, full, out);
            }
            out.push(']');
        }
    }
}
