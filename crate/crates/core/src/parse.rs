//! Recursive-descent parser for metric expressions and metric files.
//!
//! Expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' integer)?
//! base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Identifiers are `x1` .. `x6`. Note that `-x1^2` parses as `(-x1)^2`.

use crate::error::{Error, Result};
use crate::expr::{Expr, Func};
use crate::jet::MAX_DIM;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Int(i32),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, at: usize, msg: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.col0 + at + 1,
            message: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let Some(&c) = self.src.get(self.pos) else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            let tok = match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'0'..=b'9' | b'.' => {
                    let tok = self.number()?;
                    out.push((tok, start));
                    continue;
                }
                c if c.is_ascii_alphabetic() => {
                    while self
                        .src
                        .get(self.pos)
                        .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                    {
                        self.pos += 1;
                    }
                    let word = std::str::from_utf8(&self.src[start..self.pos])
                        .expect("ascii")
                        .to_string();
                    out.push((Tok::Ident(word), start));
                    continue;
                }
                other => {
                    return Err(self.err(start, format!("unexpected character `{}`", other as char)))
                }
            };
            self.pos += 1;
            out.push((tok, start));
        }
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        let digits = |s: &mut Self| {
            let b = s.pos;
            while s.src.get(s.pos).is_some_and(u8::is_ascii_digit) {
                s.pos += 1;
            }
            s.pos - b
        };
        let int_digits = digits(self);
        let mut is_int = true;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            is_int = false;
            if digits(self) == 0 && int_digits == 0 {
                return Err(self.err(start, "malformed number"));
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            } else {
                is_int = false;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if is_int {
            if let Ok(i) = text.parse::<i32>() {
                return Ok(Tok::Int(i));
            }
        }
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| self.err(start, format!("malformed number `{text}`")))
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    lexer: Lexer<'a>,
    max_dim: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        self.lexer.err(self.offset(), msg)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else if *self.peek() == Tok::End {
            Err(self.err(format!("expected {what} but reached end of expression")))
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Pow(Box::new(base), if negative { -n } else { n })),
            Tok::End => Err(self.err("expected integer exponent but reached end of expression")),
            _ => {
                self.at -= 1;
                Err(self.err("exponent must be an integer literal"))
            }
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Int(i) => Ok(Expr::Const(i as f64)),
            Tok::Minus => Ok(Expr::Neg(Box::new(self.base()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    Some(k) if (1..=self.max_dim).contains(&k) && !name[1..].starts_with('0') => {
                        Ok(Expr::Var(k - 1))
                    }
                    _ => Err(self
                        .lexer
                        .err(offset, format!("unknown identifier `{name}`"))),
                }
            }
            Tok::End => Err(self.lexer.err(offset, "unexpected end of expression")),
            _ => Err(self
                .lexer
                .err(offset, "expected a number, variable, function or `(`")),
        }
    }
}

fn parse_at(text: &str, line: usize, col0: usize, max_dim: usize) -> Result<Expr> {
    let lexer = || Lexer {
        src: text.as_bytes(),
        pos: 0,
        line,
        col0,
    };
    let mut p = Parser {
        toks: lexer().tokens()?,
        at: 0,
        lexer: lexer(),
        max_dim,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parse a single expression; variables `x1..x6` are accepted.
pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_at(text, 1, 0, MAX_DIM)
}

pub(crate) fn parse_expr_located(text: &str, line: usize, col0: usize, dim: usize) -> Result<Expr> {
    parse_at(text, line, col0, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 - 2 - 3").unwrap();
        assert_eq!(e.eval_f64(&[]).unwrap(), -4.0);
        let e = parse_expr("2 * 3 ^ 2").unwrap();
        assert_eq!(e.eval_f64(&[]).unwrap(), 18.0);
        let e = parse_expr("8 / 2 / 2").unwrap();
        assert_eq!(e.eval_f64(&[]).unwrap(), 2.0);
    }

    #[test]
    fn unary_minus_binds_to_base() {
        let e = parse_expr("-x1^2").unwrap();
        assert_eq!(e.eval_f64(&[3.0]).unwrap(), 9.0);
        let e = parse_expr("-(x1^2)").unwrap();
        assert_eq!(e.eval_f64(&[3.0]).unwrap(), -9.0);
        let e = parse_expr("2*-x1").unwrap();
        assert_eq!(e.eval_f64(&[3.0]).unwrap(), -6.0);
    }

    #[test]
    fn negative_and_scientific_literals() {
        let e = parse_expr("x1^-2 + 1.5e-3").unwrap();
        assert!((e.eval_f64(&[2.0]).unwrap() - 0.2515).abs() < 1e-15);
    }

    #[test]
    fn functions() {
        let e = parse_expr("exp(2*x3) + cosh(x1) - sqrt(4)").unwrap();
        let v = e.eval_f64(&[0.0, 0.0, 0.5]).unwrap();
        assert!((v - (1f64.exp() + 1.0 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn trailing_operator_reports_end() {
        let err = parse_expr("x1 +").unwrap_err();
        match err {
            Error::Syntax {
                column, message, ..
            } => {
                assert_eq!(column, 5);
                assert!(message.contains("end"), "{message}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rejects_unknown_identifiers_and_fractional_powers() {
        assert!(parse_expr("y + 1").is_err());
        assert!(parse_expr("x7").is_err());
        assert!(parse_expr("x0").is_err());
        assert!(parse_expr("x1^0.5").is_err());
        assert!(parse_expr("tan(x1)").is_err());
        assert!(parse_expr("(x1").is_err());
    }
}
