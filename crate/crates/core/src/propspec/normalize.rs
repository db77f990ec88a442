use super::ast::{BinOp, Expr};

/// Split a property into conjuncts using only the equivalences that are
/// sound for finite-trace checking:
///
/// - `A && B` at top level becomes `A`, `B`
/// - `G[P1 && P2]` becomes `G[P1]`, `G[P2]`
/// - `G[P -> (Q1 && Q2)]` becomes `G[P -> Q1]`, `G[P -> Q2]`
/// - `P[(a || b) ~~> c ~~> d]` becomes `P[a ~~> c ~~> d]`, `P[b ~~> c ~~> d]`
/// - `P[a ~~> b ~~> (c || d)]` becomes `P[a ~~> b ~~> c]`, `P[a ~~> b ~~> d]`
///
/// `G` over `||` and a disjunction in the middle slot of `P` are left alone.
pub fn normalize(p: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    split(p.clone(), &mut out);
    out
}

fn split(p: Expr, out: &mut Vec<Expr>) {
    match p {
        Expr::Binary {
            op: BinOp::And,
            lhs,
            rhs,
        } => {
            split(*lhs, out);
            split(*rhs, out);
        }
        Expr::G(body) => match *body {
            Expr::Binary {
                op: BinOp::And,
                lhs,
                rhs,
            } => {
                split(Expr::G(lhs), out);
                split(Expr::G(rhs), out);
            }
            Expr::Binary {
                op: BinOp::Implies,
                lhs,
                rhs,
            } if is_and(&rhs) => {
                let Expr::Binary { lhs: q1, rhs: q2, .. } = *rhs else {
                    unreachable!()
                };
                split(Expr::g(Expr::bin(BinOp::Implies, (*lhs).clone(), *q1)), out);
                split(Expr::g(Expr::bin(BinOp::Implies, *lhs, *q2)), out);
            }
            body => out.push(Expr::g(body)),
        },
        Expr::P(slots) => {
            let [f1, f2, f3] = *slots;
            if let Expr::Binary {
                op: BinOp::Or,
                lhs,
                rhs,
            } = f1
            {
                split(Expr::p(*lhs, f2.clone(), f3.clone()), out);
                split(Expr::p(*rhs, f2, f3), out);
            } else if let Expr::Binary {
                op: BinOp::Or,
                lhs,
                rhs,
            } = f3
            {
                split(Expr::p(f1.clone(), f2.clone(), *lhs), out);
                split(Expr::p(f1, f2, *rhs), out);
            } else {
                out.push(Expr::p(f1, f2, f3));
            }
        }
        other => out.push(other),
    }
}

fn is_and(e: &Expr) -> bool {
    matches!(e, Expr::Binary { op: BinOp::And, .. })
}

#[cfg(test)]
mod tests {
    use super::super::{parse_property, pretty_print};
    use super::*;

    fn norm(s: &str) -> Vec<String> {
        normalize(&parse_property(s).unwrap())
            .iter()
            .map(pretty_print)
            .collect()
    }

    #[test]
    fn g_distributes_over_conjunction() {
        assert_eq!(
            norm("G[(r>0 -> w==0) && (r>=0) && (w==0 || w==1)]"),
            vec!["G[r > 0 -> w == 0]", "G[r >= 0]", "G[w == 0 || w == 1]"]
        );
    }

    #[test]
    fn implication_with_conjunctive_consequent() {
        assert_eq!(
            norm("G[a -> (b && (c && d))]"),
            vec!["G[a -> b]", "G[a -> c]", "G[a -> d]"]
        );
    }

    #[test]
    fn non_equivalent_forms_are_untouched() {
        assert_eq!(norm("G[a || b]"), vec!["G[a || b]"]);
        assert_eq!(norm("P[a ~~> (b || c) ~~> d]"), vec!["P[a ~~> b || c ~~> d]"]);
        assert_eq!(norm("G[(a && b) -> c]"), vec!["G[a && b -> c]"]);
    }

    #[test]
    fn path_slots_one_and_three_split() {
        assert_eq!(
            norm("P[(a||b) ~~> c ~~> d]"),
            vec!["P[a ~~> c ~~> d]", "P[b ~~> c ~~> d]"]
        );
        assert_eq!(
            norm("P[a ~~> c ~~> (d || e || f)]"),
            vec!["P[a ~~> c ~~> d]", "P[a ~~> c ~~> e]", "P[a ~~> c ~~> f]"]
        );
    }

    #[test]
    fn top_level_conjunction_of_properties() {
        assert_eq!(
            norm("G [all(i, up, F[f == i]) ] && G [all(i, down, F[f == i]) ]"),
            vec!["G[all(i, up, F[f == i])]", "G[all(i, down, F[f == i])]"]
        );
    }
}
