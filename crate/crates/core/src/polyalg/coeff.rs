use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar. Always kept in lowest terms with a positive denominator.
pub type Scalar = BigRational;

/// Build a scalar from an integer.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Build a scalar `num / den`.
///
/// # Panics
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest double to an exact scalar.
pub fn to_f64(x: &Scalar) -> f64 {
    ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Exact scalar equal to a finite double.
pub fn from_f64(x: f64) -> Option<Scalar> {
    BigRational::from_float(x)
}

/// Coefficient ring of a polynomial.
///
/// Implemented for exact rationals, doubles, and [`Affine`] forms over
/// decision variables.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero_coeff() -> Self;
    fn is_zero_coeff(&self) -> bool;
    fn add_coeff(&mut self, rhs: &Self);
    fn neg_coeff(&self) -> Self;
    fn scale_by(&self, k: &Scalar) -> Self;
    fn from_scalar(k: &Scalar) -> Self;

    fn one_coeff() -> Self {
        Self::from_scalar(&Scalar::one())
    }
}

/// Multiplication between coefficient rings.
pub trait CoeffMul<Rhs = Self> {
    type Output: Coeff;
    fn mul_coeff(&self, rhs: &Rhs) -> Self::Output;
}

/// Coefficients that have a numeric value.
pub trait Numeric: Coeff {
    fn to_f64(&self) -> f64;
}

impl Coeff for Scalar {
    fn zero_coeff() -> Self {
        Scalar::zero()
    }
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_coeff(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn neg_coeff(&self) -> Self {
        -self
    }
    fn scale_by(&self, k: &Scalar) -> Self {
        self * k
    }
    fn from_scalar(k: &Scalar) -> Self {
        k.clone()
    }
}

impl Coeff for f64 {
    fn zero_coeff() -> Self {
        0.0
    }
    fn is_zero_coeff(&self) -> bool {
        *self == 0.0
    }
    fn add_coeff(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn neg_coeff(&self) -> Self {
        -self
    }
    fn scale_by(&self, k: &Scalar) -> Self {
        self * to_f64(k)
    }
    fn from_scalar(k: &Scalar) -> Self {
        to_f64(k)
    }
}

impl Numeric for Scalar {
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
}

impl Numeric for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl CoeffMul<Scalar> for Scalar {
    type Output = Scalar;
    fn mul_coeff(&self, rhs: &Scalar) -> Scalar {
        self * rhs
    }
}

impl CoeffMul<f64> for f64 {
    type Output = f64;
    fn mul_coeff(&self, rhs: &f64) -> f64 {
        self * rhs
    }
}

impl CoeffMul<f64> for Scalar {
    type Output = f64;
    fn mul_coeff(&self, rhs: &f64) -> f64 {
        to_f64(self) * rhs
    }
}

impl CoeffMul<Scalar> for f64 {
    type Output = f64;
    fn mul_coeff(&self, rhs: &Scalar) -> f64 {
        self * to_f64(rhs)
    }
}

/// Affine form `c + sum_i a_i x_i` over decision variables `x_i`, exact.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Affine {
    pub constant: Scalar,
    /// Sorted by variable index, no zero coefficients.
    terms: Vec<(usize, Scalar)>,
}

impl Affine {
    pub fn constant(c: Scalar) -> Self {
        Affine { constant: c, terms: Vec::new() }
    }

    /// The form `1 * x_index`.
    pub fn var(index: usize) -> Self {
        Affine { constant: Scalar::zero(), terms: vec![(index, Scalar::one())] }
    }

    /// Build from arbitrary (index, coefficient) pairs; duplicates are summed.
    pub fn from_terms(constant: Scalar, mut terms: Vec<(usize, Scalar)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Affine { constant, terms: out }
    }

    pub fn terms(&self) -> &[(usize, Scalar)] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluate with numeric values for the variables.
    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        let mut acc = to_f64(&self.constant);
        for (i, c) in &self.terms {
            acc += to_f64(c) * values[*i];
        }
        acc
    }

    /// Evaluate with exact values for the variables.
    pub fn eval_exact(&self, values: &[Scalar]) -> Scalar {
        let mut acc = self.constant.clone();
        for (i, c) in &self.terms {
            acc += c * &values[*i];
        }
        acc
    }

    fn merge(&self, rhs: &Self, sign: bool) -> Vec<(usize, Scalar)> {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            let take_left = j >= rhs.terms.len() || (i < self.terms.len() && self.terms[i].0 < rhs.terms[j].0);
            let take_right = i >= self.terms.len() || (j < rhs.terms.len() && rhs.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else if take_right {
                let c = if sign { rhs.terms[j].1.clone() } else { -&rhs.terms[j].1 };
                out.push((rhs.terms[j].0, c));
                j += 1;
            } else {
                let c = if sign { &self.terms[i].1 + &rhs.terms[j].1 } else { &self.terms[i].1 - &rhs.terms[j].1 };
                if !c.is_zero() {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }
}

impl Coeff for Affine {
    fn zero_coeff() -> Self {
        Affine::default()
    }
    fn is_zero_coeff(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }
    fn add_coeff(&mut self, rhs: &Self) {
        self.constant += &rhs.constant;
        if rhs.terms.is_empty() {
            return;
        }
        if self.terms.is_empty() {
            self.terms = rhs.terms.clone();
            return;
        }
        self.terms = self.merge(rhs, true);
    }
    fn neg_coeff(&self) -> Self {
        Affine { constant: -&self.constant, terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect() }
    }
    fn scale_by(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return Affine::default();
        }
        Affine { constant: &self.constant * k, terms: self.terms.iter().map(|(i, c)| (*i, c * k)).collect() }
    }
    fn from_scalar(k: &Scalar) -> Self {
        Affine::constant(k.clone())
    }
}

impl CoeffMul<Affine> for Scalar {
    type Output = Affine;
    fn mul_coeff(&self, rhs: &Affine) -> Affine {
        rhs.scale_by(self)
    }
}

impl CoeffMul<Scalar> for Affine {
    type Output = Affine;
    fn mul_coeff(&self, rhs: &Scalar) -> Affine {
        self.scale_by(rhs)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (i, c) in &self.terms {
            if c.is_negative() {
                write!(f, " - {}*x{}", -c, i)?;
            } else {
                write!(f, " + {}*x{}", c, i)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_merge_cancels() {
        let a = Affine::from_terms(int(1), vec![(0, int(2)), (3, int(1))]);
        let b = Affine::from_terms(int(-1), vec![(0, int(-2)), (1, int(5))]);
        let mut s = a.clone();
        s.add_coeff(&b);
        assert_eq!(s, Affine::from_terms(int(0), vec![(1, int(5)), (3, int(1))]));
        let mut z = a.clone();
        z.add_coeff(&a.neg_coeff());
        assert!(z.is_zero_coeff());
    }

    #[test]
    fn affine_eval() {
        let a = Affine::from_terms(ratio(1, 2), vec![(1, int(3)), (0, int(-1))]);
        assert_eq!(a.eval_exact(&[int(2), int(1)]), ratio(3, 2));
        assert!((a.eval_f64(&[2.0, 1.0]) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn scalar_canonical() {
        let r = ratio(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }
}
