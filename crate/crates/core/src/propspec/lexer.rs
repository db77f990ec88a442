use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Hash,
    Prime,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Leads,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Real(r) => format!("`{r}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Hash => "#",
            Tok::Prime => "'",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Arrow => "->",
            Tok::Leads => "~~>",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            _ => "",
        }
    }
}

/// A token with its character offset in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let peek = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '#' => (Tok::Hash, 1),
            '\'' | '′' => (Tok::Prime, 1),
            '+' => (Tok::Plus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            '!' if peek == Some('=') => (Tok::Ne, 2),
            '!' => (Tok::Bang, 1),
            '&' if peek == Some('&') => (Tok::AndAnd, 2),
            '|' if peek == Some('|') => (Tok::OrOr, 2),
            '-' if peek == Some('>') => (Tok::Arrow, 2),
            '-' => (Tok::Minus, 1),
            '~' if peek == Some('~') && chars.get(i + 2) == Some(&'>') => (Tok::Leads, 3),
            '=' if peek == Some('=') => (Tok::EqEq, 2),
            '=' => (Tok::EqEq, 1),
            '<' if peek == Some('=') => (Tok::Le, 2),
            '<' => (Tok::Lt, 1),
            '>' if peek == Some('=') => (Tok::Ge, 2),
            '>' => (Tok::Gt, 1),
            '"' => {
                let (s, len) = lex_string(&chars, i)?;
                (Tok::Str(s), len)
            }
            c if c.is_ascii_digit() => lex_number(&chars, i)?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => return Err(ParseError::new(i, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, pos: start });
        i += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: chars.len(),
    });
    Ok(out)
}

fn lex_string(chars: &[char], start: usize) -> Result<(String, usize), ParseError> {
    let mut s = String::new();
    let mut j = start + 1;
    loop {
        match chars.get(j) {
            None => return Err(ParseError::new(start, "unterminated string literal")),
            Some('"') => return Ok((s, j + 1 - start)),
            Some('\\') => {
                match chars.get(j + 1) {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    _ => return Err(ParseError::new(j, "invalid escape in string literal")),
                }
                j += 2;
            }
            Some(&c) => {
                s.push(c);
                j += 1;
            }
        }
    }
}

fn lex_number(chars: &[char], start: usize) -> Result<(Tok, usize), ParseError> {
    let mut j = start;
    while j < chars.len() && chars[j].is_ascii_digit() {
        j += 1;
    }
    let mut real = false;
    if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|c| c.is_ascii_digit()) {
        real = true;
        j += 1;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
    }
    if matches!(chars.get(j), Some('e' | 'E')) {
        let mut k = j + 1;
        if matches!(chars.get(k), Some('+' | '-')) {
            k += 1;
        }
        if chars.get(k).is_some_and(|c| c.is_ascii_digit()) {
            real = true;
            j = k;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
        }
    }
    let text: String = chars[start..j].iter().collect();
    let tok = if real {
        Tok::Real(
            text.parse()
                .map_err(|_| ParseError::new(start, format!("bad number `{text}`")))?,
        )
    } else {
        Tok::Int(
            text.parse()
                .map_err(|_| ParseError::new(start, format!("integer `{text}` out of range")))?,
        )
    };
    Ok((tok, j - start))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            toks("p1 = \"E\" -> r' <= 2.5 ~~> x#max"),
            vec![
                Tok::Ident("p1".into()),
                Tok::EqEq,
                Tok::Str("E".into()),
                Tok::Arrow,
                Tok::Ident("r".into()),
                Tok::Prime,
                Tok::Le,
                Tok::Real(2.5),
                Tok::Leads,
                Tok::Ident("x".into()),
                Tok::Hash,
                Tok::Ident("max".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn range_colon_is_not_a_real() {
        assert_eq!(toks("1:3"), vec![Tok::Int(1), Tok::Colon, Tok::Int(3), Tok::Eof]);
    }

    #[test]
    fn escapes_and_positions() {
        let t = tokenize(r#"  "a\"b""#).unwrap();
        assert_eq!(t[0].tok, Tok::Str("a\"b".into()));
        assert_eq!(t[0].pos, 2);
        let err = tokenize("a $ b").unwrap_err();
        assert_eq!(err.pos, 2);
        assert!(tokenize("\"open").is_err());
    }
}
