use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::coeff::{int, Coeff, CoeffMul, Numeric, Scalar};
use super::PolyError;

/// One of the three spatial variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    S = 0,
    Eta = 1,
    Theta = 2,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::S, Var::Eta, Var::Theta];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::S => "s",
            Var::Eta => "eta",
            Var::Theta => "theta",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent triple `(e_s, e_eta, e_theta)`.
///
/// Ordered by total degree, then by the theta exponent, then the eta
/// exponent, so that for two variables the order reads
/// `1, s, eta, s^2, s*eta, eta^2, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn var(v: Var) -> Self {
        let mut e = [0; 3];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        Monomial([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }

    fn key(&self) -> (u32, u32, u32, u32) {
        (self.degree(), self.0[2], self.0[1], self.0[0])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in Var::ALL {
            let e = self.exp(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{}", v.name())?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Point at which to evaluate a polynomial; unbound variables are `None`.
#[derive(Clone, Debug, Default)]
pub struct Point<T> {
    vals: [Option<T>; 3],
}

impl<T: Clone> Point<T> {
    pub fn new() -> Self {
        Point { vals: [None, None, None] }
    }
    pub fn with(mut self, v: Var, x: T) -> Self {
        self.vals[v.index()] = Some(x);
        self
    }
    pub fn s(x: T) -> Self {
        Self::new().with(Var::S, x)
    }
    pub fn s_eta(s: T, eta: T) -> Self {
        Self::new().with(Var::S, s).with(Var::Eta, eta)
    }
    pub fn get(&self, v: Var) -> Option<&T> {
        self.vals[v.index()].as_ref()
    }
}

/// Sparse polynomial in `s`, `eta`, `theta`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C = Scalar> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn one() -> Self {
        Self::constant(C::one_coeff())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// The polynomial consisting of the single variable `v`.
    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), C::one_coeff())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    /// Constant term, zero if absent.
    pub fn constant_term(&self) -> C {
        self.terms.get(&Monomial::ONE).cloned().unwrap_or_else(C::zero_coeff)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero_coeff() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_coeff(&c);
                if existing.is_zero_coeff() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c.neg_coeff())).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.neg_coeff());
        }
        out
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.scale_by(k))))
    }

    pub fn mul<B: Coeff>(&self, rhs: &Poly<B>) -> Poly<C::Output>
    where
        C: CoeffMul<B>,
    {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.mul_coeff(cb));
            }
        }
        out
    }

    /// Multiply by an exact-coefficient polynomial.
    pub fn mul_scalar_poly(&self, rhs: &Poly<Scalar>) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.scale_by(cb));
            }
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Highest exponent of `v`; zero for the zero polynomial.
    pub fn degree(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    /// Relabel variables: every occurrence of `Var::ALL[i]` becomes `to[i]`.
    /// Variables mapped to the same target have their exponents summed.
    pub fn rename(&self, to: [Var; 3]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut e = [0u32; 3];
            for (i, target) in to.iter().enumerate() {
                e[target.index()] += m.0[i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exchange two variables.
    pub fn swap(&self, a: Var, b: Var) -> Self {
        let mut to = Var::ALL;
        to[a.index()] = b;
        to[b.index()] = a;
        self.rename(to)
    }

    /// Simultaneous substitution of variables by exact polynomials.
    pub fn substitute(&self, bindings: &[(Var, Poly<Scalar>)]) -> Self {
        let mut slot: [Option<&Poly<Scalar>>; 3] = [None, None, None];
        for (v, p) in bindings {
            slot[v.index()] = Some(p);
        }
        let mut cache: [Vec<Poly<Scalar>>; 3] = Default::default();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut factor = Poly::<Scalar>::one();
            let mut rest = [0u32; 3];
            for v in Var::ALL {
                let e = m.exp(v);
                match slot[v.index()] {
                    Some(p) if e > 0 => {
                        factor = factor.mul(power(&mut cache[v.index()], p, e));
                    }
                    _ => rest[v.index()] = e,
                }
            }
            let rest = Monomial(rest);
            for (fm, fc) in factor.terms() {
                out.add_term(fm.mul(&rest), c.scale_by(fc));
            }
        }
        out
    }

    /// Antiderivative in `v` with zero constant of integration.
    pub fn antiderivative(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut e = m.0;
            e[v.index()] += 1;
            out.add_term(Monomial(e), c.scale_by(&Scalar::new(1.into(), e[v.index()].into())));
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let k = m.exp(v);
            if k == 0 {
                continue;
            }
            let mut e = m.0;
            e[v.index()] -= 1;
            out.add_term(Monomial(e), c.scale_by(&int(k as i64)));
        }
        out
    }

    /// Exact definite integral over `v` from `lower` to `upper`.
    pub fn integrate(&self, v: Var, lower: &Poly<Scalar>, upper: &Poly<Scalar>) -> Result<Self, PolyError> {
        if lower.contains(v) || upper.contains(v) {
            return Err(PolyError::BoundContainsVariable(v));
        }
        let mut lo_cache = Vec::new();
        let mut hi_cache = Vec::new();
        let mut diffs: Vec<Option<Poly<Scalar>>> = Vec::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let k = m.exp(v) as usize + 1;
            if diffs.len() <= k {
                diffs.resize(k + 1, None);
            }
            if diffs[k].is_none() {
                let hi = power(&mut hi_cache, upper, k as u32).clone();
                let lo = power(&mut lo_cache, lower, k as u32);
                diffs[k] = Some(hi.sub(lo));
            }
            let diff = diffs[k].as_ref().unwrap();
            let mut rest = m.0;
            rest[v.index()] = 0;
            let rest = Monomial(rest);
            let inv = Scalar::new(1.into(), (k as i64).into());
            for (dm, dc) in diff.terms() {
                out.add_term(dm.mul(&rest), c.scale_by(&(dc * &inv)));
            }
        }
        Ok(out)
    }

    /// Evaluate exactly; every variable present must be bound.
    pub fn eval_exact(&self, point: &Point<Scalar>) -> Result<C, PolyError> {
        let mut acc = C::zero_coeff();
        for (m, c) in &self.terms {
            let mut w = Scalar::one();
            for v in Var::ALL {
                let e = m.exp(v);
                if e > 0 {
                    let x = point.get(v).ok_or(PolyError::UnboundVariable(v))?;
                    w *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc.add_coeff(&c.scale_by(&w));
        }
        Ok(acc)
    }

    /// Evaluate in double precision; every variable present must be bound.
    pub fn eval_f64(&self, point: &Point<f64>) -> Result<f64, PolyError>
    where
        C: Numeric,
    {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut w = c.to_f64();
            for v in Var::ALL {
                let e = m.exp(v);
                if e > 0 {
                    let x = point.get(v).ok_or(PolyError::UnboundVariable(v))?;
                    w *= x.powi(e as i32);
                }
            }
            acc += w;
        }
        Ok(acc)
    }
}

impl Poly<Scalar> {
    pub fn from_scalar(c: Scalar) -> Self {
        Self::constant(c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(int(n))
    }

    /// `v - c`.
    pub fn var_minus(v: Var, c: &Scalar) -> Self {
        Self::var(v).sub(&Self::constant(c.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

fn power<'a>(cache: &'a mut Vec<Poly<Scalar>>, base: &Poly<Scalar>, e: u32) -> &'a Poly<Scalar> {
    if cache.is_empty() {
        cache.push(Poly::one());
    }
    while cache.len() <= e as usize {
        let next = cache.last().unwrap().mul(base);
        cache.push(next);
    }
    &cache[e as usize]
}
