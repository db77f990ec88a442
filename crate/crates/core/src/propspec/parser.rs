use super::ast::{BinOp, Expr, ListOp, Quantifier};
use super::lexer::{tokenize, Spanned, Tok};
use super::ParseError;

/// Parse a property or a temporal-free expression.
pub fn parse_property(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        i: 0,
        in_p: false,
    };
    let e = p.implies()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        _ => Err(p.unexpected("end of input")),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
    in_p: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i < self.toks.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        if *self.peek() == Tok::Leads && !self.in_p {
            return ParseError::new(self.pos(), "`~~>` is only allowed inside P[...]");
        }
        ParseError::new(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, t: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Expr::bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.and()?;
            lhs = Expr::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.not()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.not()?;
            lhs = Expr::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Expr::not(self.not()?));
        }
        self.relational()
    }

    fn rel_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Ident(s) if s == "in" => BinOp::In,
            _ => return None,
        })
    }

    fn relational(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.additive()?;
        let Some(op) = self.rel_op() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = if op == BinOp::In {
            self.list_expr()?
        } else {
            self.additive()?
        };
        if self.rel_op().is_some() {
            return Err(ParseError::new(
                self.pos(),
                "comparisons do not chain; add parentheses",
            ));
        }
        Ok(Expr::bin(op, lhs, rhs))
    }

    /// A list-valued position: any additive expression or a range `lo:hi`.
    fn list_expr(&mut self) -> Result<Expr, ParseError> {
        let lo = self.additive()?;
        if self.eat(&Tok::Colon) {
            let hi = self.additive()?;
            return Ok(Expr::Range(Box::new(lo), Box::new(hi)));
        }
        Ok(lo)
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        if self.eat(&Tok::Minus) {
            return Ok(match self.unary()? {
                Expr::Int(i) => Expr::Int(
                    i.checked_neg()
                        .ok_or_else(|| ParseError::new(pos, "integer out of range"))?,
                ),
                Expr::Real(r) => Expr::Real(-r),
                e => Expr::bin(BinOp::Sub, Expr::Int(0), e),
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Tok::Prime => {
                    let pos = self.pos();
                    if self.in_p {
                        return Err(ParseError::new(
                            pos,
                            "primed variables are not allowed inside P[...]",
                        ));
                    }
                    e = match e {
                        Expr::Var {
                            name,
                            primed: false,
                        } => Expr::Var { name, primed: true },
                        _ => return Err(ParseError::new(pos, "only a variable can be primed")),
                    };
                    self.bump();
                }
                Tok::Hash => {
                    self.bump();
                    let pos = self.pos();
                    let op = match self.bump() {
                        Tok::Ident(s) if s == "min" => ListOp::Min,
                        Tok::Ident(s) if s == "max" => ListOp::Max,
                        Tok::Ident(s) if s == "size" => ListOp::Size,
                        _ => return Err(ParseError::new(pos, "expected min, max, or size after `#`")),
                    };
                    e = Expr::ListOp {
                        list: Box::new(e),
                        op,
                    };
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::Int(i))
            }
            Tok::Real(r) => {
                self.bump();
                Ok(Expr::Real(r))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            Tok::LParen => {
                self.bump();
                let e = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::LBrace => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        items.push(self.additive()?);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(Tok::Comma, "`,` or `}`")?;
                    }
                }
                Ok(Expr::List(items))
            }
            Tok::Ident(name) => {
                let next = self.peek_at(1).clone();
                match (name.as_str(), next) {
                    ("true", _) => {
                        self.bump();
                        Ok(Expr::Bool(true))
                    }
                    ("false", _) => {
                        self.bump();
                        Ok(Expr::Bool(false))
                    }
                    ("G" | "F", Tok::LBracket) => {
                        self.bump();
                        self.bump();
                        let body = self.implies()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        Ok(if name == "G" {
                            Expr::g(body)
                        } else {
                            Expr::f(body)
                        })
                    }
                    ("P", Tok::LBracket) => {
                        self.bump();
                        self.bump();
                        if self.in_p {
                            return Err(ParseError::new(pos, "P[...] cannot be nested in P"));
                        }
                        self.in_p = true;
                        let f1 = self.implies()?;
                        self.expect(Tok::Leads, "`~~>`")?;
                        let f2 = self.implies()?;
                        self.expect(Tok::Leads, "`~~>`")?;
                        let f3 = self.implies()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        self.in_p = false;
                        Ok(Expr::p(f1, f2, f3))
                    }
                    ("all" | "exists", Tok::LParen) => {
                        self.bump();
                        self.bump();
                        let var = match self.bump() {
                            Tok::Ident(v) => v,
                            _ => {
                                return Err(ParseError::new(
                                    self.toks[self.i - 1].pos,
                                    "expected iterator variable",
                                ))
                            }
                        };
                        self.expect(Tok::Comma, "`,`")?;
                        let list = self.list_expr()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let body = self.implies()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::Quant {
                            q: if name == "all" {
                                Quantifier::All
                            } else {
                                Quantifier::Exists
                            },
                            var,
                            list: Box::new(list),
                            body: Box::new(body),
                        })
                    }
                    ("in", _) => Err(ParseError::new(pos, "`in` needs a left operand")),
                    _ => {
                        self.bump();
                        Ok(Expr::var(&name))
                    }
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse_property(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    fn eq(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Eq, a, b)
    }

    #[test]
    fn precedence_of_not_and_implies() {
        let got = p("!a && b -> c");
        let want = Expr::bin(
            BinOp::Implies,
            Expr::bin(BinOp::And, Expr::not(Expr::var("a")), Expr::var("b")),
            Expr::var("c"),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn implies_is_right_associative() {
        let got = p("a -> b -> c");
        let want = Expr::bin(
            BinOp::Implies,
            Expr::var("a"),
            Expr::bin(BinOp::Implies, Expr::var("b"), Expr::var("c")),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn dining_property_shape() {
        let e = p(r#"G [ (p1 == "E" -> p2 != "E") && (p2 == "E" -> p3 != "E") ]"#);
        let Expr::G(body) = e else { panic!() };
        let Expr::Binary { op: BinOp::And, lhs, .. } = *body else { panic!() };
        assert!(matches!(*lhs, Expr::Binary { op: BinOp::Implies, .. }));
    }

    #[test]
    fn single_equals_is_equality() {
        assert_eq!(p("p1 = \"E\""), eq(Expr::var("p1"), Expr::Str("E".into())));
    }

    #[test]
    fn nested_eventually_under_all() {
        let e = p("G [all(i, up, F[f == i])]");
        let Expr::G(body) = e else { panic!() };
        let Expr::Quant { q, var, list, body } = *body else { panic!() };
        assert_eq!(q, Quantifier::All);
        assert_eq!(var, "i");
        assert_eq!(*list, Expr::var("up"));
        assert_eq!(*body, Expr::f(eq(Expr::var("f"), Expr::var("i"))));
    }

    #[test]
    fn primes_list_ops_and_ranges() {
        let e = p("up == up' && f <= up#min && x in 1:4");
        let vars = e.free_vars();
        assert!(vars.contains("up") && vars.contains("x") && vars.contains("f"));
        assert!(e.contains_primed());
        assert!(p("i in {1, 2, 3}").children().len() == 2);
        assert_eq!(p("-3"), Expr::Int(-3));
        assert_eq!(p("-x"), Expr::bin(BinOp::Sub, Expr::Int(0), Expr::var("x")));
    }

    #[test]
    fn temporal_keywords_need_brackets() {
        assert_eq!(p("F == 1"), eq(Expr::var("F"), Expr::Int(1)));
        assert!(p("P[a ~~> b ~~> c]").is_temporal());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_property("G[a ~~> b]").unwrap_err();
        assert_eq!(err.pos, 4);
        assert!(err.message.contains("inside P"), "{err}");
        let err = parse_property("P[a' ~~> b ~~> c]").unwrap_err();
        assert_eq!(err.pos, 3);
        let err = parse_property("G[(a && b]").unwrap_err();
        assert_eq!(err.pos, 9);
        assert!(parse_property("a < b < c").is_err());
        assert!(parse_property("G[a").is_err());
        assert!(parse_property("3'").is_err());
    }
}
