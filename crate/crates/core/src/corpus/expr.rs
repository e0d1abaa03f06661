//! Exact-looking constants such as `3*sqrt(3)/(2*sqrt(pi))`, evaluated at a
//! working precision.
//!
//! Grammar: integers, `pi`, `sqrt(...)`, `+ - * /`, `^` with an integer
//! exponent, and parentheses.

use crate::error::{Error, Result};
use crate::numeric::BigFloat;

pub fn evaluate(text: &str, prec: usize) -> Result<BigFloat> {
    let mut p = Eval { s: text.as_bytes(), pos: 0, prec, text };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

struct Eval<'a> {
    s: &'a [u8],
    pos: usize,
    prec: usize,
    text: &'a str,
}

impl Eval<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { offset: self.pos, line: 1, column: self.pos + 1, message: format!("{msg} in `{}`", self.text) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<BigFloat> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v = &v + &self.term()?;
            } else if self.eat(b'-') {
                v = &v - &self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<BigFloat> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v = &v * &self.unary()?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                v = v.try_div(&d).map_err(|_| self.error("division by zero"))?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<BigFloat> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let n = self.integer()?;
            let p = base.powi(n as usize);
            return if neg { p.recip().map_err(|_| self.error("zero to a negative power")) } else { Ok(p) };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("expected an integer"))
    }

    fn atom(&mut self) -> Result<BigFloat> {
        self.skip_ws();
        if self.eat(b'(') {
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(v);
        }
        let rest = &self.s[self.pos..];
        if rest.starts_with(b"pi") {
            self.pos += 2;
            return Ok(BigFloat::pi(self.prec));
        }
        if rest.starts_with(b"sqrt") {
            self.pos += 4;
            if !self.eat(b'(') {
                return Err(self.error("expected `(` after sqrt"));
            }
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            if v.is_negative() {
                return Err(self.error("square root of a negative number"));
            }
            return Ok(v.sqrt());
        }
        let n = self.integer()?;
        Ok(BigFloat::from_i64(n as i64, self.prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radicals() {
        let v = evaluate("3*sqrt(3)/(2*sqrt(pi))", 128).unwrap().to_f64();
        assert!((v - 3.0 * 3f64.sqrt() / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-15);
        assert!((evaluate("-4/3 + 2^2", 128).unwrap().to_f64() - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(evaluate("2^-1", 64).unwrap().to_f64(), 0.5);
        assert!(evaluate("sqrt(-1)", 64).is_err());
        assert!(evaluate("1/0", 64).is_err());
        assert!(evaluate("2 3", 64).is_err());
    }
}
