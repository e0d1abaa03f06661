//! Recursive-descent parser for the equation language.
//!
//! ```text
//! equation := "M" "=" expr
//! expr     := ["-"] term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := "-" factor | atom ["^" INT]
//! atom     := INT ["/" INT] | "M" | "D" | "z" | "u" | "x" | "(" expr ")"
//! ```
//! `#` starts a comment that runs to the end of the line.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::Rat;
use crate::poly::{MultiPoly, Var};

const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> Error {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Error::Parse { offset, line, column, message: message.into() }
}

impl Lexer {
    fn run(src: &str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => i += 1,
                b'#' => {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                }
                b'0'..=b'9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let v: BigInt = src[start..i].parse().expect("digits");
                    lx.toks.push((Tok::Int(v), start));
                }
                b'+' => lx.single(Tok::Plus, &mut i),
                b'-' => lx.single(Tok::Minus, &mut i),
                b'*' => lx.single(Tok::Star, &mut i),
                b'/' => lx.single(Tok::Slash, &mut i),
                b'^' => lx.single(Tok::Caret, &mut i),
                b'(' => lx.single(Tok::LParen, &mut i),
                b')' => lx.single(Tok::RParen, &mut i),
                b'=' => lx.single(Tok::Eq, &mut i),
                _ if (c as char).is_ascii_alphabetic() || c == b'_' => {
                    let start = i;
                    while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    lx.toks.push((Tok::Ident(src[start..i].to_string()), start));
                }
                _ => {
                    let ch = src[i..].chars().next().unwrap();
                    return Err(error_at(src, i, format!("unexpected character `{ch}`")));
                }
            }
        }
        lx.toks.push((Tok::Eof, src.len()));
        Ok(lx.toks)
    }

    fn single(&mut self, t: Tok, i: &mut usize) {
        self.toks.push((t, *i));
        *i += 1;
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
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

    fn err(&self, msg: impl Into<String>) -> Error {
        error_at(self.src, self.offset(), msg)
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Int(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn equation(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Tok::Ident(s) if s == "M" => {
                self.bump();
            }
            t => return Err(self.err(format!("expected `M` at the start of the equation, found {}", Self::describe(t)))),
        }
        if *self.peek() != Tok::Eq {
            return Err(self.err(format!("expected `=`, found {}", Self::describe(self.peek()))));
        }
        self.bump();
        let rhs = self.expr()?;
        if *self.peek() != Tok::Eof {
            return Err(self.err(format!("unexpected {}", Self::describe(self.peek()))));
        }
        Ok(rhs)
    }

    fn bare(&mut self) -> Result<MultiPoly> {
        let p = self.expr()?;
        if *self.peek() != Tok::Eof {
            return Err(self.err(format!("unexpected {}", Self::describe(self.peek()))));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc * self.factor()?;
                }
                Tok::Slash => return Err(self.err("division is only allowed inside a rational literal `p/q`")),
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Tok::Int(v) => {
                if *self.peek() == Tok::Slash {
                    return Err(self.err("non-integer exponent"));
                }
                let e = v
                    .to_u32()
                    .filter(|e| *e <= MAX_EXPONENT)
                    .ok_or_else(|| error_at(self.src, at, format!("exponent {v} is too large")))?;
                Ok(base.pow(e))
            }
            Tok::Minus => Err(error_at(self.src, at, "non-integer exponent: exponents must be nonnegative integers")),
            t => Err(error_at(
                self.src,
                at,
                format!("non-integer exponent: expected a nonnegative integer literal after `^`, found {}", Self::describe(&t)),
            )),
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dat = self.offset();
                    match self.bump() {
                        Tok::Int(d) if !d.is_zero() => Ok(MultiPoly::constant(Rat::new(n, d))),
                        Tok::Int(_) => Err(error_at(self.src, dat, "zero denominator")),
                        t => Err(error_at(self.src, dat, format!("expected a denominator, found {}", Self::describe(&t)))),
                    }
                } else {
                    Ok(MultiPoly::constant(Rat::from_integer(n)))
                }
            }
            Tok::Ident(name) => {
                let v = match name.as_str() {
                    "M" => Var::A0,
                    "D" => Var::A1,
                    "z" => Var::Z,
                    "u" => Var::U,
                    "x" => Var::X,
                    _ => {
                        return Err(error_at(
                            self.src,
                            at,
                            format!("unknown variable `{name}` (allowed: M, D, z, u, x)"),
                        ))
                    }
                };
                Ok(MultiPoly::var(v))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err(format!("expected `)`, found {}", Self::describe(self.peek()))));
                }
                self.bump();
                Ok(inner)
            }
            t => Err(error_at(self.src, at, format!("expected an operand, found {}", Self::describe(&t)))),
        }
    }
}

/// Parse `M = <expr>` and return the expanded right-hand side.
pub fn parse_rhs(text: &str) -> Result<MultiPoly> {
    let toks = Lexer::run(text)?;
    Parser { src: text, toks, pos: 0 }.equation()
}

/// Parse a bare polynomial expression in the same syntax.
pub fn parse_poly(text: &str) -> Result<MultiPoly> {
    let toks = Lexer::run(text)?;
    Parser { src: text, toks, pos: 0 }.bare()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    #[test]
    fn expands_products_and_powers() {
        let p = parse_rhs("M = 1 + z*(u+1)^2*M^2").unwrap();
        assert_eq!(p.coeff(&[2, 0, 1, 1, 0]), int(2));
        assert_eq!(p.coeff(&[0, 0, 0, 0, 0]), int(1));
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn literals_comments_and_signs() {
        let p = parse_rhs("# comment\nM = -3/4*u  # trailing\n - -x").unwrap();
        assert_eq!(p.coeff(&[0, 0, 0, 1, 0]), rat(-3, 4));
        assert_eq!(p.coeff(&[0, 0, 0, 0, 1]), int(1));
        assert_eq!(parse_rhs("M = -u^2").unwrap().coeff(&[0, 0, 0, 2, 0]), int(-1));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_rhs("M = 1 +\n  z*y") {
            Err(Error::Parse { line, column, message, .. }) => {
                assert_eq!((line, column), (2, 5));
                assert!(message.contains("unknown variable"));
            }
            other => panic!("{other:?}"),
        }
        for bad in ["M = z^(2)", "M = z^1/2", "M = z^-1", "M = 1/0", "M = z/u", "M = (z", "N = z", "M = z z", "M = z $"] {
            assert!(matches!(parse_rhs(bad), Err(Error::Parse { .. })), "{bad}");
        }
        assert!(parse_rhs("M = z^1/2").unwrap_err().to_string().contains("non-integer exponent"));
    }
}
