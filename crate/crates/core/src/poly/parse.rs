//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := ("+" | "-")? base ("^" uint)?
//! base   := var | number | "i" | "(" expr ")"
//! var    := "x" uint            (1-based, at most d)
//! number := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
//! ```
//!
//! Whitespace is ignored between tokens. Multiplication is always explicit.
//! The optional sign on a factor lets printed negative coefficients parse back.

use rustfft::num_complex::Complex64;

use super::MultiPoly;
use crate::error::{Error, Result};
use crate::grid::MAX_DIM;

/// Largest exponent accepted after `^`.
const MAX_POWER: u32 = 64;

/// Parses `text` as a polynomial in `x1..xd`.
pub fn parse_poly(text: &str, d: usize) -> Result<MultiPoly> {
    if !(1..=MAX_DIM).contains(&d) {
        return Err(Error::arg("d", format!("dimension {d} not in 1..=3")));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        d,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    d: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        if self.eat(b'-') {
            return Ok(self.factor()?.neg());
        }
        if self.eat(b'+') {
            return self.factor();
        }
        let base = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let n = self.uint().ok_or_else(|| self.error("expected an exponent after `^`"))?;
            if n > MAX_POWER as u64 {
                return Err(Error::Parse {
                    pos: at,
                    msg: format!("exponent {n} exceeds {MAX_POWER}"),
                });
            }
            return Ok(base.pow(n as u32));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MultiPoly> {
        let start = match self.peek() {
            None => return Err(self.error("unexpected end of input")),
            Some(c) => c,
        };
        match start {
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            b'x' => {
                let at = self.pos;
                self.pos += 1;
                let j = self
                    .uint()
                    .ok_or_else(|| self.error("expected a variable index after `x`"))?;
                if j == 0 || j > self.d as u64 {
                    return Err(Error::Parse {
                        pos: at,
                        msg: format!("variable x{j} is outside x1..x{}", self.d),
                    });
                }
                MultiPoly::var(self.d, j as usize)
            }
            b'i' => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.d, Complex64::new(0.0, 1.0)))
            }
            c if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                Ok(MultiPoly::constant(self.d, Complex64::new(v, 0.0)))
            }
            c => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }

    fn digits(&mut self) -> usize {
        let s = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - s
    }

    fn uint(&mut self) -> Option<u64> {
        let s = self.pos;
        if self.digits() == 0 {
            return None;
        }
        std::str::from_utf8(&self.src[s..self.pos]).ok()?.parse().ok()
    }

    fn number(&mut self) -> Result<f64> {
        let s = self.pos;
        let mut n = self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += self.digits();
        }
        if n == 0 {
            self.pos = s;
            return Err(self.error("expected digits"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                self.pos = save + 1;
                return Err(self.error("expected exponent digits"));
            }
        }
        let text = std::str::from_utf8(&self.src[s..self.pos]).expect("ascii");
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            pos: s,
            msg: format!("bad number `{text}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                pos: s,
                msg: format!("number `{text}` overflows"),
            });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_pos(text: &str, d: usize) -> usize {
        match parse_poly(text, d) {
            Err(Error::Parse { pos, .. }) => pos,
            other => panic!("expected a parse error for {text:?}, got {other:?}"),
        }
    }

    #[test]
    fn examples() {
        let p = parse_poly("x1*x2", 2).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[&vec![1, 1]], Complex64::new(1.0, 0.0));

        let c = parse_poly("3", 1).unwrap();
        assert_eq!(c.terms()[&vec![0]], Complex64::new(3.0, 0.0));
        assert_eq!(c.degree(), Some(0));

        let q = parse_poly("x1^2 + x2^2", 2).unwrap();
        assert_eq!(q.terms().len(), 2);
        assert_eq!(q.degree(), Some(2));
    }

    #[test]
    fn whitespace_and_numbers() {
        let a = parse_poly("  2.5e-1 *x1 ^ 2-  i ", 1).unwrap();
        let b = parse_poly("0.25*x1^2-i", 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly(".5", 1).unwrap(), parse_poly("0.5", 1).unwrap());
        assert_eq!(parse_poly("1E+2", 1).unwrap(), parse_poly("100", 1).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(err_pos("x1^", 1), 3);
        assert_eq!(err_pos("x3", 2), 0);
        assert_eq!(err_pos("2 x1", 1), 2);
        assert_eq!(err_pos("x1 + ", 1), 5);
        assert_eq!(err_pos("(x1", 1), 3);
        assert_eq!(err_pos("x", 1), 1);
        assert_eq!(err_pos("1e", 1), 2);
        assert_eq!(err_pos("x1 $", 1), 3);
        assert_eq!(err_pos("x0", 1), 0);
        assert_eq!(err_pos("1e999", 1), 0);
        assert!(parse_poly("x1", 4).is_err());
    }

    #[test]
    fn complex_unit() {
        let p = parse_poly("(1 + i)^2", 1).unwrap();
        assert_eq!(p.terms()[&vec![0]], Complex64::new(0.0, 2.0));
    }
}
