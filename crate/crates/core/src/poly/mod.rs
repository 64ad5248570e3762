//! Multivariate complex polynomials and their operator symbols.
//!
//! A polynomial `P` acts as the constant-coefficient operator `P(d)` with
//! `d = (d/dx1, .., d/dxd)`. Since `P(d) exp(i l.x) = P(i l) exp(i l.x)`, the
//! symbol of the operator is `l -> P(i l)`.

mod family;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::MAX_DIM;

pub use family::{
    center_lattice, circle_directions, family_explicit, family_linear, family_quadratic, FamilyMember, FamilyScheme,
    MemberShape, PolyFamily,
};
pub use parse::parse_poly;

/// Anything with an operator symbol `l -> P(i l)`.
pub trait Symbol: Sync {
    fn dim(&self) -> usize;

    /// `P(i l)`; `l` has length `dim()`.
    fn symbol(&self, l: &[f64]) -> Complex64;

    /// The underlying polynomial, for methods that need its monomials.
    fn to_poly(&self) -> MultiPoly;

    fn label(&self) -> String {
        self.to_poly().to_string()
    }
}

/// Exponent multi-index.
pub type MultiIndex = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    d: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(Error::arg("d", format!("dimension {d} not in 1..=3")))
    }
}

impl MultiPoly {
    pub fn zero(d: usize) -> Self {
        MultiPoly {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        Self::monomial(d, vec![0; d], c)
    }

    /// `c * x^alpha`; panics if `alpha.len() != d`.
    pub fn monomial(d: usize, alpha: MultiIndex, c: Complex64) -> Self {
        assert_eq!(alpha.len(), d, "multi-index length must equal the dimension");
        let mut terms = BTreeMap::new();
        if c.norm() != 0.0 {
            terms.insert(alpha, c);
        }
        MultiPoly { d, terms }
    }

    /// The coordinate `x_j`, 1-based.
    pub fn var(d: usize, j: usize) -> Result<Self> {
        check_dim(d)?;
        if j == 0 || j > d {
            return Err(Error::arg("poly", format!("variable x{j} outside 1..={d}")));
        }
        let mut alpha = vec![0; d];
        alpha[j - 1] = 1;
        Ok(Self::monomial(d, alpha, Complex64::new(1.0, 0.0)))
    }

    /// Builds from `(alpha, c)` pairs, summing repeats and dropping zeros.
    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        check_dim(d)?;
        let mut p = Self::zero(d);
        for (alpha, c) in terms {
            if alpha.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    found: alpha.len(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(e) => {
                if c.norm() != 0.0 {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let s = *e.get() + c;
                if s.norm() == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.iter().sum()).max()
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            d: self.d,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.d);
        for (a, c) in &self.terms {
            for (b, e) in &other.terms {
                let ab: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(ab, c * e);
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.d);
        for (a, v) in &self.terms {
            out.add_term(a.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut out = MultiPoly::constant(self.d, Complex64::new(1.0, 0.0));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Evaluates at a complex point.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.d {
            return Err(Error::Dimension {
                expected: self.d,
                found: z.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(a, c)| c * a.iter().zip(z).map(|(&k, v)| v.powu(k)).product::<Complex64>())
            .sum())
    }

    /// `P(i l) = sum_alpha c_alpha prod_j (i l_j)^alpha_j`.
    pub fn eval_symbol(&self, l: &[f64]) -> Result<Complex64> {
        if l.len() != self.d {
            return Err(Error::Dimension {
                expected: self.d,
                found: l.len(),
            });
        }
        Ok(self.symbol_unchecked(l))
    }

    fn symbol_unchecked(&self, l: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, c) in &self.terms {
            let mut real = 1.0;
            let mut deg = 0u32;
            for (&k, &x) in a.iter().zip(l) {
                real *= x.powi(k as i32);
                deg += k;
            }
            // i^deg times a real product
            let m = match deg % 4 {
                0 => Complex64::new(real, 0.0),
                1 => Complex64::new(0.0, real),
                2 => Complex64::new(-real, 0.0),
                _ => Complex64::new(0.0, -real),
            };
            acc += c * m;
        }
        acc
    }
}

impl Symbol for MultiPoly {
    fn dim(&self) -> usize {
        self.d
    }

    fn symbol(&self, l: &[f64]) -> Complex64 {
        debug_assert_eq!(l.len(), self.d);
        self.symbol_unchecked(l)
    }

    fn to_poly(&self) -> MultiPoly {
        self.clone()
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: Complex64, standalone: bool, leading: bool) -> fmt::Result {
    // returns with the sign already emitted through the separator
    let sep = |f: &mut fmt::Formatter<'_>, neg: bool| -> fmt::Result {
        match (leading, neg) {
            (true, true) => f.write_str("-"),
            (true, false) => Ok(()),
            (false, true) => f.write_str(" - "),
            (false, false) => f.write_str(" + "),
        }
    };
    if c.im == 0.0 {
        sep(f, c.re < 0.0)?;
        let a = c.re.abs();
        if standalone {
            write!(f, "{a:?}")
        } else if a == 1.0 {
            Ok(())
        } else {
            write!(f, "{a:?}*")
        }
    } else if c.re == 0.0 {
        sep(f, c.im < 0.0)?;
        let b = c.im.abs();
        let unit = if b == 1.0 { "i".to_string() } else { format!("{b:?}*i") };
        if standalone {
            f.write_str(&unit)
        } else {
            write!(f, "{unit}*")
        }
    } else {
        sep(f, false)?;
        let op = if c.im < 0.0 { '-' } else { '+' };
        write!(f, "({:?}{op}{:?}*i)", c.re, c.im.abs())?;
        if standalone {
            Ok(())
        } else {
            f.write_str("*")
        }
    }
}

/// Pretty-prints in the parser's grammar, so the text parses back to an equal polynomial.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&MultiIndex> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (n, alpha) in keys.into_iter().enumerate() {
            let c = self.terms[alpha];
            let constant = alpha.iter().all(|&k| k == 0);
            write_coeff(f, c, constant, n == 0)?;
            if !constant {
                let mut first = true;
                for (j, &k) in alpha.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    if !first {
                        f.write_str("*")?;
                    }
                    first = false;
                    if k == 1 {
                        write!(f, "x{}", j + 1)?;
                    } else {
                        write!(f, "x{}^{k}", j + 1)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symbol_examples() {
        let x1 = parse_poly("x1", 1).unwrap();
        let v = x1.eval_symbol(&[2.0]).unwrap();
        assert_eq!(v, c(0.0, 2.0));
        assert_eq!(v.norm(), 2.0);
        let lap = parse_poly("x1^2 + x2^2", 2).unwrap();
        assert_eq!(lap.eval_symbol(&[1.0, 1.0]).unwrap(), c(-2.0, 0.0));
        let xy = parse_poly("x1*x2", 2).unwrap();
        assert_eq!(xy.eval_symbol(&[3.0, 0.5]).unwrap(), c(-1.5, 0.0));
        assert!(xy.eval_symbol(&[1.0]).is_err());
    }

    #[test]
    fn zero_polynomial() {
        let z = parse_poly("x1 - x1", 1).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(z.to_string(), "0");
        assert!(parse_poly(&z.to_string(), 1).unwrap().is_zero());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "x1*x2",
            "3",
            "x1^2 + x2^2",
            "0.5 + 2*i*x1",
            "-(x1 - 0.25*i)^3 + 1e-7*x1*x2^2 - i",
            "(2 - 3*i)*x1^4 - x2",
        ] {
            let p = parse_poly(text, 2).unwrap();
            let back = parse_poly(&p.to_string(), 2).unwrap();
            assert_eq!(p, back, "{text} -> {p}");
        }
    }

    #[test]
    fn pretty_print_is_readable() {
        let p = parse_poly("0.5 + 2*i*x1", 1).unwrap();
        assert_eq!(p.to_string(), "2.0*i*x1 + 0.5");
        assert_eq!(parse_poly("x1^2 - x1", 1).unwrap().to_string(), "x1^2 - x1");
    }

    #[test]
    fn arithmetic() {
        let p = parse_poly("(x1 + 1)^2", 1).unwrap();
        let q = parse_poly("x1^2 + 2*x1 + 1", 1).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.degree(), Some(2));
        let r = p.mul(&MultiPoly::var(1, 1).unwrap()).sub(&q.scale(c(0.0, 1.0)));
        assert_eq!(r.eval(&[c(2.0, 0.0)]).unwrap(), c(18.0, -9.0));
    }
}
