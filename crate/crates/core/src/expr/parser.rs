use super::{BinOp, ExprAst, ExprError, Func, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const ATOM_START: &[&str] = &["number", "variable", "function", "`(`", "`-`"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let end = scan_number(bytes, i).ok_or_else(|| ExprError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("`{}`", &src[start..(start + 1).min(src.len())]),
                })?;
                let text = &src[start..end];
                let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("`{text}`"),
                })?;
                if !v.is_finite() {
                    return Err(ExprError::Syntax {
                        offset: start,
                        expected: vec!["finite number"],
                        found: format!("`{text}`"),
                    });
                }
                i = end;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = i;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                i = end;
                out.push((Tok::Ident(src[start..end].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    expected: ATOM_START.to_vec(),
                    found: format!("`{ch}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// Decimal literal with optional fraction and exponent. Returns the end offset.
fn scan_number(b: &[u8], mut i: usize) -> Option<usize> {
    let digits = |b: &[u8], mut i: usize| {
        let s = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        (i, i - s)
    };
    let (after_int, n_int) = digits(b, i);
    i = after_int;
    let mut n_frac = 0;
    if i < b.len() && b[i] == b'.' {
        let (after_frac, n) = digits(b, i + 1);
        i = after_frac;
        n_frac = n;
    }
    if n_int + n_frac == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let (after_exp, n_exp) = digits(b, j);
        if n_exp == 0 {
            return None;
        }
        i = after_exp;
    }
    Some(i)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ExprError {
        ExprError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(ExprAst::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<ExprAst, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(ExprAst::neg(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ExprAst, ExprError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(ExprAst::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(v) = Var::from_name(&name) {
                    self.bump();
                    return Ok(ExprAst::Var(v));
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ExprError::UnknownIdentifier { name, offset });
                };
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Err(self.error(&["`(`"]));
                }
                self.bump();
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(ExprAst::call(func, arg))
            }
            _ => Err(self.error(ATOM_START)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&["`)`", "operator"]))
        }
    }
}

/// Parse an expression string.
pub fn parse(source: &str) -> Result<ExprAst, ExprError> {
    let mut p = Parser { toks: lex(source)?, pos: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(ast)
}
