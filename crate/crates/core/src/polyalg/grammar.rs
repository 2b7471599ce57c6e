//! Text form of polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | identifier | '(' expr ')'
//! number := digits ('.' digits)? (('e' | 'E') ('+' | '-')? digits)?
//! ```
//!
//! Identifiers are `s`, `eta`, `theta`, or a named parameter. Division is
//! only allowed by a nonzero constant. Decimal literals are read exactly.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::coeff::{Coeff, Scalar};
use super::poly::{Monomial, Poly, Var};
use super::PolyError;

/// Named scalar parameters usable inside polynomial text.
pub type Params = BTreeMap<String, Scalar>;

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    params: &'a Params,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Parse { text: self.src.to_string(), pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        self.pos = at;
                        return Err(self.err("division only by a nonzero constant"));
                    }
                    acc = acc.scale(&(Scalar::one() / d.constant_term()));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 =
                self.src[start..self.pos].parse().map_err(|_| self.err("expected a non-negative integer exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Poly::constant(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                match name {
                    "s" => Ok(Poly::var(Var::S)),
                    "eta" => Ok(Poly::var(Var::Eta)),
                    "theta" => Ok(Poly::var(Var::Theta)),
                    _ => match self.params.get(name) {
                        Some(v) => Ok(Poly::constant(v.clone())),
                        None => {
                            self.pos = start;
                            Err(self.err(format!("unknown identifier '{name}'")))
                        }
                    },
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Scalar, PolyError> {
        let digits = |p: &mut Self| {
            let start = p.pos;
            while p.pos < p.bytes.len() && p.bytes[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            &p.src[start..p.pos]
        };
        let int_part = digits(self).to_string();
        let mut frac = String::new();
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = digits(self).to_string();
        }
        if int_part.is_empty() && frac.is_empty() {
            return Err(self.err("malformed number"));
        }
        let mut exp: i64 = 0;
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.bytes.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let e = digits(self);
            if e.is_empty() {
                self.pos = save;
                return Err(self.err("malformed exponent"));
            }
            let e: i64 = e.parse().map_err(|_| self.err("exponent too large"))?;
            exp = if neg { -e } else { e };
        }
        let mantissa: BigInt = format!("{int_part}{frac}").parse().map_err(|_| self.err("malformed number"))?;
        let scale = exp - frac.len() as i64;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            Scalar::from_integer(mantissa * num_traits::pow(ten, scale as usize))
        } else {
            Scalar::new(mantissa, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(value)
    }
}

/// Parse polynomial text with exact rational coefficients.
pub fn parse_poly(text: &str, params: &Params) -> Result<Poly, PolyError> {
    let mut p = Parser { src: text, bytes: text.as_bytes(), pos: 0, params };
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Coefficients that have a text form compatible with [`parse_poly`].
pub trait TextCoeff: Coeff {
    fn is_negative_coeff(&self) -> bool;
    fn is_one_coeff(&self) -> bool;
    fn write_abs(&self, out: &mut String);
    fn from_parsed(x: &Scalar) -> Self;
}

impl TextCoeff for Scalar {
    fn is_negative_coeff(&self) -> bool {
        self.is_negative()
    }
    fn is_one_coeff(&self) -> bool {
        self.is_one()
    }
    fn write_abs(&self, out: &mut String) {
        let _ = write!(out, "{}", self.abs());
    }
    fn from_parsed(x: &Scalar) -> Self {
        x.clone()
    }
}

impl TextCoeff for f64 {
    fn is_negative_coeff(&self) -> bool {
        *self < 0.0
    }
    fn is_one_coeff(&self) -> bool {
        *self == 1.0
    }
    fn write_abs(&self, out: &mut String) {
        let _ = write!(out, "{:?}", self.abs());
    }
    fn from_parsed(x: &Scalar) -> Self {
        super::coeff::to_f64(x)
    }
}

fn write_monomial(out: &mut String, m: &Monomial) {
    let mut first = true;
    for v in Var::ALL {
        let e = m.exp(v);
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(v.name());
        if e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
}

/// Canonical text, terms in increasing monomial order.
pub fn format_poly<C: TextCoeff>(p: &Poly<C>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative_coeff();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if *m == Monomial::ONE {
            c.write_abs(&mut out);
        } else {
            if !c.is_one_coeff() && !c.neg_coeff().is_one_coeff() {
                c.write_abs(&mut out);
                out.push('*');
            }
            write_monomial(&mut out, m);
        }
    }
    out
}

/// Parse text produced by [`format_poly`] back into the given coefficient ring.
pub fn parse_poly_as<C: TextCoeff>(text: &str) -> Result<Poly<C>, PolyError> {
    Ok(parse_poly(text, &Params::new())?.map_coeffs(C::from_parsed))
}

impl fmt::Display for Poly<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self))
    }
}

impl fmt::Display for Poly<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::coeff::{int, ratio};
    use num_traits::Zero;

    fn p(t: &str) -> Poly {
        parse_poly(t, &Params::new()).unwrap()
    }

    #[test]
    fn parses_mixed_coefficients() {
        let s = Poly::var(Var::S);
        let expect = s.mul(&s).scale(&ratio(1, 2)).sub(&s.scale(&ratio(1, 3))).add(&Poly::from_int(2));
        assert_eq!(p("0.5*s^2 - 1/3*s + 2"), expect);
        assert_eq!(p("-(s - 1)^2"), p("-s^2 + 2*s - 1"));
        assert_eq!(p("1e-3"), Poly::constant(ratio(1, 1000)));
        assert_eq!(p("2.5E+1"), Poly::from_int(25));
        assert_eq!(p("s*eta - theta"), p("-theta + eta*s"));
    }

    #[test]
    fn params_resolve() {
        let mut params = Params::new();
        params.insert("lambda".into(), ratio(19, 2));
        assert_eq!(parse_poly("lambda*s", &params).unwrap(), Poly::var(Var::S).scale(&ratio(19, 2)));
        assert!(parse_poly("mu", &params).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "s +", "s/s", "1/0", "s^-1", "(s", "s s", "1.e", "x"] {
            assert!(parse_poly(bad, &Params::new()).is_err(), "{bad}");
        }
    }

    #[test]
    fn format_roundtrip() {
        for t in ["0", "1", "-1", "s", "-s + 2", "1/3*s*eta - 7/2*eta^2 + theta^3", "-4*s^5"] {
            let q = p(t);
            assert_eq!(p(&format_poly(&q)), q, "{t}");
        }
        assert_eq!(format_poly(&p("2 - s + 1/2*s^2")), "2 - s + 1/2*s^2");
        let f: Poly<f64> = p("0.1 - 3*s").map_coeffs(crate::polyalg::coeff::to_f64);
        assert_eq!(format_poly(&f), "0.1 - 3.0*s");
        assert_eq!(parse_poly_as::<f64>(&format_poly(&f)).unwrap(), f);
        assert_eq!(int(0), Scalar::zero());
    }
}
