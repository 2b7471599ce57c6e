//! Partial-integral operators on `R^m x L2^n[a, b]` with polynomial kernels.
//!
//! An operator with blocks `(P, Q1, Q2, S, R1, R2)` maps `(x, z)` to
//!
//! ```text
//! ( P x + int_a^b Q1(s) z(s) ds,
//!   Q2(s) x + S(s) z(s) + int_a^s R1(s,eta) z(eta) deta + int_s^b R2(s,eta) z(eta) deta )
//! ```

mod serial;

pub use serial::{OperatorDoc, SerialError};

use num_traits::Zero;
use thiserror::Error;

use crate::polyalg::{Coeff, CoeffMul, Numeric, Poly, PolyError, PolyMatrix, Scalar, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PiError {
    #[error("operator dimension mismatch: {0}")]
    Dims(String),
    #[error("operators live on different intervals")]
    Interval,
    #[error("block {block} contains a forbidden variable ({var})")]
    Variable { block: &'static str, var: Var },
    #[error("empty or reversed interval")]
    BadInterval,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub a: Scalar,
    pub b: Scalar,
}

impl Interval {
    pub fn new(a: Scalar, b: Scalar) -> Result<Self, PiError> {
        if a >= b {
            return Err(PiError::BadInterval);
        }
        Ok(Interval { a, b })
    }

    pub fn unit() -> Self {
        Interval { a: Scalar::zero(), b: crate::polyalg::int(1) }
    }

    pub fn length(&self) -> Scalar {
        &self.b - &self.a
    }

    pub fn lo(&self) -> Poly {
        Poly::constant(self.a.clone())
    }

    pub fn hi(&self) -> Poly {
        Poly::constant(self.b.clone())
    }
}

/// `(m_out, n_out, m_in, n_in)`: the operator maps `R^m_in x L2^n_in` to `R^m_out x L2^n_out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub m_out: usize,
    pub n_out: usize,
    pub m_in: usize,
    pub n_in: usize,
}

impl Dims {
    pub fn square(m: usize, n: usize) -> Self {
        Dims { m_out: m, n_out: n, m_in: m, n_in: n }
    }

    pub fn transpose(&self) -> Self {
        Dims { m_out: self.m_in, n_out: self.n_in, m_in: self.m_out, n_in: self.n_out }
    }

    pub fn is_square(&self) -> bool {
        self.m_in == self.m_out && self.n_in == self.n_out
    }
}

/// A point of `R^m x L2^n[a, b]` whose function part is polynomial in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunction<C = Scalar> {
    pub x: Vec<C>,
    /// `n x 1`, variable `s` only.
    pub z: PolyMatrix<C>,
}

impl<C: Coeff> StateFunction<C> {
    pub fn new(x: Vec<C>, z: PolyMatrix<C>) -> Self {
        StateFunction { x, z }
    }

    pub fn zero(m: usize, n: usize) -> Self {
        StateFunction { x: vec![C::zero_coeff(); m], z: PolyMatrix::zeros(n, 1) }
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        self.z.rows()
    }

    fn x_matrix(&self) -> PolyMatrix<C> {
        PolyMatrix::from_fn(self.x.len(), 1, |i, _| Poly::constant(self.x[i].clone()))
    }

    /// `<self, other>` in `R^m x L2^n[a, b]`.
    pub fn dot(&self, other: &Self, iv: &Interval) -> Result<C, PiError>
    where
        C: CoeffMul<C, Output = C>,
    {
        if self.m() != other.m() || self.n() != other.n() {
            return Err(PiError::Dims("state functions differ in size".into()));
        }
        let mut acc = C::zero_coeff();
        for (a, b) in self.x.iter().zip(&other.x) {
            acc.add_coeff(&a.mul_coeff(b));
        }
        let mut integrand = Poly::<C>::zero();
        for i in 0..self.n() {
            integrand.add_assign(&self.z.get(i, 0).mul(other.z.get(i, 0)));
        }
        let integral = integrand.integrate(Var::S, &iv.lo(), &iv.hi())?;
        acc.add_coeff(&integral.constant_term());
        Ok(acc)
    }

    /// Squared norm.
    pub fn norm_sq(&self, iv: &Interval) -> Result<C, PiError>
    where
        C: CoeffMul<C, Output = C>,
    {
        self.dot(self, iv)
    }
}

impl StateFunction<Scalar> {
    pub fn to_f64(&self) -> StateFunction<f64> {
        StateFunction { x: self.x.iter().map(Numeric::to_f64).collect(), z: self.z.map_coeffs(Numeric::to_f64) }
    }
}

/// The operator with blocks `(P, Q1, Q2, S, R1, R2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiOperator<C = Scalar> {
    interval: Interval,
    dims: Dims,
    pub p: PolyMatrix<C>,
    pub q1: PolyMatrix<C>,
    pub q2: PolyMatrix<C>,
    pub s: PolyMatrix<C>,
    pub r1: PolyMatrix<C>,
    pub r2: PolyMatrix<C>,
}

const S_ONLY: [Var; 2] = [Var::Eta, Var::Theta];

impl<C: Coeff> PiOperator<C> {
    /// Assemble from blocks, checking shapes and variable content.
    pub fn new(
        interval: Interval,
        p: PolyMatrix<C>,
        q1: PolyMatrix<C>,
        q2: PolyMatrix<C>,
        s: PolyMatrix<C>,
        r1: PolyMatrix<C>,
        r2: PolyMatrix<C>,
    ) -> Result<Self, PiError> {
        let dims = Dims { m_out: p.rows(), m_in: p.cols(), n_out: s.rows(), n_in: s.cols() };
        let expect = [
            ("P", &p, (dims.m_out, dims.m_in)),
            ("Q1", &q1, (dims.m_out, dims.n_in)),
            ("Q2", &q2, (dims.n_out, dims.m_in)),
            ("S", &s, (dims.n_out, dims.n_in)),
            ("R1", &r1, (dims.n_out, dims.n_in)),
            ("R2", &r2, (dims.n_out, dims.n_in)),
        ];
        for (name, m, shape) in expect {
            if m.dims() != shape {
                return Err(PiError::Dims(format!("block {name} is {:?}, expected {:?}", m.dims(), shape)));
            }
        }
        for v in Var::ALL {
            if p.contains(v) {
                return Err(PiError::Variable { block: "P", var: v });
            }
        }
        for (name, m) in [("Q1", &q1), ("Q2", &q2), ("S", &s)] {
            for v in S_ONLY {
                if m.contains(v) {
                    return Err(PiError::Variable { block: name, var: v });
                }
            }
        }
        for (name, m) in [("R1", &r1), ("R2", &r2)] {
            if m.contains(Var::Theta) {
                return Err(PiError::Variable { block: name, var: Var::Theta });
            }
        }
        Ok(PiOperator { interval, dims, p, q1, q2, s, r1, r2 })
    }

    pub fn zero(interval: Interval, dims: Dims) -> Self {
        let Dims { m_out, n_out, m_in, n_in } = dims;
        PiOperator {
            interval,
            dims,
            p: PolyMatrix::zeros(m_out, m_in),
            q1: PolyMatrix::zeros(m_out, n_in),
            q2: PolyMatrix::zeros(n_out, m_in),
            s: PolyMatrix::zeros(n_out, n_in),
            r1: PolyMatrix::zeros(n_out, n_in),
            r2: PolyMatrix::zeros(n_out, n_in),
        }
    }

    pub fn identity(interval: Interval, m: usize, n: usize) -> Self {
        let mut op = Self::zero(interval, Dims::square(m, n));
        op.p = PolyMatrix::identity(m);
        op.s = PolyMatrix::identity(n);
        op
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn blocks(&self) -> [(&'static str, &PolyMatrix<C>); 6] {
        [("P", &self.p), ("Q1", &self.q1), ("Q2", &self.q2), ("S", &self.s), ("R1", &self.r1), ("R2", &self.r2)]
    }

    pub fn is_zero(&self) -> bool {
        self.blocks().iter().all(|(_, m)| m.is_zero())
    }

    fn check_same(&self, rhs: &Self) -> Result<(), PiError> {
        if self.interval != rhs.interval {
            return Err(PiError::Interval);
        }
        if self.dims != rhs.dims {
            return Err(PiError::Dims(format!("{:?} vs {:?}", self.dims, rhs.dims)));
        }
        Ok(())
    }

    fn zip(
        &self,
        rhs: &Self,
        f: impl Fn(&PolyMatrix<C>, &PolyMatrix<C>) -> Result<PolyMatrix<C>, PolyError>,
    ) -> Result<Self, PiError> {
        self.check_same(rhs)?;
        Ok(PiOperator {
            interval: self.interval.clone(),
            dims: self.dims,
            p: f(&self.p, &rhs.p)?,
            q1: f(&self.q1, &rhs.q1)?,
            q2: f(&self.q2, &rhs.q2)?,
            s: f(&self.s, &rhs.s)?,
            r1: f(&self.r1, &rhs.r1)?,
            r2: f(&self.r2, &rhs.r2)?,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, PiError> {
        self.zip(rhs, PolyMatrix::add)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, PiError> {
        self.zip(rhs, PolyMatrix::sub)
    }

    pub fn map_blocks(&self, f: impl Fn(&PolyMatrix<C>) -> PolyMatrix<C>) -> Self {
        PiOperator {
            interval: self.interval.clone(),
            dims: self.dims,
            p: f(&self.p),
            q1: f(&self.q1),
            q2: f(&self.q2),
            s: f(&self.s),
            r1: f(&self.r1),
            r2: f(&self.r2),
        }
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        self.map_blocks(|m| m.scale(k))
    }

    pub fn neg(&self) -> Self {
        self.map_blocks(PolyMatrix::neg)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PiOperator<D> {
        PiOperator {
            interval: self.interval.clone(),
            dims: self.dims,
            p: self.p.map_coeffs(&f),
            q1: self.q1.map_coeffs(&f),
            q2: self.q2.map_coeffs(&f),
            s: self.s.map_coeffs(&f),
            r1: self.r1.map_coeffs(&f),
            r2: self.r2.map_coeffs(&f),
        }
    }

    /// Blocks `(P', Q2', Q1', S', R1', R2')` with `R1'(s,eta) = R2(eta,s)^T`,
    /// `R2'(s,eta) = R1(eta,s)^T`, all others transposed.
    pub fn adjoint(&self) -> Self {
        PiOperator {
            interval: self.interval.clone(),
            dims: self.dims.transpose(),
            p: self.p.transpose(),
            q1: self.q2.transpose(),
            q2: self.q1.transpose(),
            s: self.s.transpose(),
            r1: self.r2.swap(Var::S, Var::Eta).transpose(),
            r2: self.r1.swap(Var::S, Var::Eta).transpose(),
        }
    }

    /// `A + A*`.
    pub fn symmetrize(&self) -> Result<Self, PiError> {
        if !self.dims.is_square() {
            return Err(PiError::Dims("symmetrize needs a square operator".into()));
        }
        self.add(&self.adjoint())
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }

    /// `self o rhs`.
    pub fn compose<B: Coeff>(&self, rhs: &PiOperator<B>) -> Result<PiOperator<C::Output>, PiError>
    where
        C: CoeffMul<B>,
    {
        if self.interval != rhs.interval {
            return Err(PiError::Interval);
        }
        if self.dims.m_in != rhs.dims.m_out || self.dims.n_in != rhs.dims.n_out {
            return Err(PiError::Dims(format!("cannot compose {:?} with {:?}", self.dims, rhs.dims)));
        }
        let iv = &self.interval;
        let (lo, hi) = (iv.lo(), iv.hi());
        let s = Poly::var(Var::S);
        let eta = Poly::var(Var::Eta);

        // Left operand blocks (A, B1, B2, D, C1, C2), right operand (P, Q1, Q2, S, R1, R2).
        let (a, b1, b2, d, c1, c2) = (&self.p, &self.q1, &self.q2, &self.s, &self.r1, &self.r2);
        let (p, q1, q2, sm, r1, r2) = (&rhs.p, &rhs.q1, &rhs.q2, &rhs.s, &rhs.r1, &rhs.r2);

        let s_to_eta = [Var::Eta, Var::Eta, Var::Theta];
        let eta_to_theta = [Var::S, Var::Theta, Var::Theta];
        let s_to_theta = [Var::Theta, Var::Eta, Var::Theta];

        let b1_eta = b1.rename(s_to_eta);
        let q1_eta = q1.rename(s_to_eta);
        let q2_eta = q2.rename(s_to_eta);
        let s_eta = sm.rename(s_to_eta);
        let c1_st = c1.rename(eta_to_theta);
        let c2_st = c2.rename(eta_to_theta);
        let r1_te = r1.rename(s_to_theta);
        let r2_te = r2.rename(s_to_theta);

        let p_hat = {
            let mut m = a.mul(p)?;
            m.add_assign(&b1.mul(q2)?.integrate(Var::S, &lo, &hi)?)?;
            m
        };
        let q1_hat = {
            let mut m = a.mul(q1)?;
            m.add_assign(&b1.mul(sm)?)?;
            m.add_assign(&b1_eta.mul(&r1.swap(Var::S, Var::Eta))?.integrate(Var::Eta, &s, &hi)?)?;
            m.add_assign(&b1_eta.mul(&r2.swap(Var::S, Var::Eta))?.integrate(Var::Eta, &lo, &s)?)?;
            m
        };
        let q2_hat = {
            let mut m = b2.mul(p)?;
            m.add_assign(&d.mul(q2)?)?;
            m.add_assign(&c1.mul(&q2_eta)?.integrate(Var::Eta, &lo, &s)?)?;
            m.add_assign(&c2.mul(&q2_eta)?.integrate(Var::Eta, &s, &hi)?)?;
            m
        };
        let s_hat = d.mul(sm)?;

        let shared = b2.mul(&q1_eta)?;
        let c1r1 = c1_st.mul(&r1_te)?;
        let c1r2 = c1_st.mul(&r2_te)?;
        let c2r1 = c2_st.mul(&r1_te)?;
        let c2r2 = c2_st.mul(&r2_te)?;
        let r1_hat = {
            let mut m = shared.clone();
            m.add_assign(&d.mul(r1)?)?;
            m.add_assign(&c1.mul(&s_eta)?)?;
            m.add_assign(&c1r2.integrate(Var::Theta, &lo, &eta)?)?;
            m.add_assign(&c1r1.integrate(Var::Theta, &eta, &s)?)?;
            m.add_assign(&c2r1.integrate(Var::Theta, &s, &hi)?)?;
            m
        };
        let r2_hat = {
            let mut m = shared;
            m.add_assign(&d.mul(r2)?)?;
            m.add_assign(&c2.mul(&s_eta)?)?;
            m.add_assign(&c1r2.integrate(Var::Theta, &lo, &s)?)?;
            m.add_assign(&c2r2.integrate(Var::Theta, &s, &eta)?)?;
            m.add_assign(&c2r1.integrate(Var::Theta, &eta, &hi)?)?;
            m
        };

        Ok(PiOperator {
            interval: iv.clone(),
            dims: Dims { m_out: self.dims.m_out, n_out: self.dims.n_out, m_in: rhs.dims.m_in, n_in: rhs.dims.n_in },
            p: p_hat,
            q1: q1_hat,
            q2: q2_hat,
            s: s_hat,
            r1: r1_hat,
            r2: r2_hat,
        })
    }

    /// Apply to a polynomial state, exactly.
    pub fn apply<B: Coeff>(&self, v: &StateFunction<B>) -> Result<StateFunction<C::Output>, PiError>
    where
        C: CoeffMul<B>,
    {
        if v.m() != self.dims.m_in || v.n() != self.dims.n_in {
            return Err(PiError::Dims(format!("state ({}, {}) does not fit operator {:?}", v.m(), v.n(), self.dims)));
        }
        if v.z.contains(Var::Eta) || v.z.contains(Var::Theta) {
            return Err(PiError::Variable { block: "z", var: Var::Eta });
        }
        let iv = &self.interval;
        let (lo, hi) = (iv.lo(), iv.hi());
        let s = Poly::var(Var::S);
        let x = v.x_matrix();
        let z_eta = v.z.rename([Var::Eta, Var::Eta, Var::Theta]);

        let mut out_x = self.p.mul(&x)?;
        out_x.add_assign(&self.q1.mul(&v.z)?.integrate(Var::S, &lo, &hi)?)?;
        let mut out_z = self.q2.mul(&x)?;
        out_z.add_assign(&self.s.mul(&v.z)?)?;
        out_z.add_assign(&self.r1.mul(&z_eta)?.integrate(Var::Eta, &lo, &s)?)?;
        out_z.add_assign(&self.r2.mul(&z_eta)?.integrate(Var::Eta, &s, &hi)?)?;

        let x_vals = (0..out_x.rows()).map(|i| out_x.get(i, 0).constant_term()).collect();
        Ok(StateFunction { x: x_vals, z: out_z })
    }
}

/// `<u, T v>` computed exactly.
pub fn inner_product<C>(u: &StateFunction<C>, t: &PiOperator<C>, v: &StateFunction<C>) -> Result<C, PiError>
where
    C: Coeff + CoeffMul<C, Output = C>,
{
    let tv = t.apply(v)?;
    u.dot(&tv, t.interval())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{int, ratio};

    fn poly(t: &str) -> Poly {
        crate::polyalg::parse_poly(t, &Default::default()).unwrap()
    }

    fn one_by_one(t: &str) -> PolyMatrix {
        PolyMatrix::new(1, 1, vec![poly(t)]).unwrap()
    }

    fn op(p: &str, q1: &str, q2: &str, s: &str, r1: &str, r2: &str) -> PiOperator {
        PiOperator::new(
            Interval::unit(),
            one_by_one(p),
            one_by_one(q1),
            one_by_one(q2),
            one_by_one(s),
            one_by_one(r1),
            one_by_one(r2),
        )
        .unwrap()
    }

    fn state(x: i64, z: &str) -> StateFunction {
        StateFunction::new(vec![int(x)], one_by_one(z))
    }

    #[test]
    fn apply_examples() {
        let v = state(3, "s^2 - 2*s");
        assert_eq!(PiOperator::<Scalar>::identity(Interval::unit(), 1, 1).apply(&v).unwrap(), v);

        let q = op("0", "1", "0", "0", "0", "0");
        assert_eq!(q.apply(&state(0, "s")).unwrap().x, vec![ratio(1, 2)]);

        let r = op("0", "0", "0", "0", "1", "1");
        assert_eq!(r.apply(&state(0, "1")).unwrap().z, one_by_one("1"));
    }

    #[test]
    fn multiplier_composition() {
        let a = op("0", "0", "0", "s + 1", "0", "0");
        let b = op("0", "0", "0", "2*s", "0", "0");
        assert_eq!(a.compose(&b).unwrap(), op("0", "0", "0", "2*s^2 + 2*s", "0", "0"));
    }

    #[test]
    fn identity_is_neutral() {
        let x = op("2", "s", "1 - s", "s^2", "s*eta", "eta - 1");
        let id: PiOperator = PiOperator::identity(Interval::unit(), 1, 1);
        assert_eq!(id.compose(&x).unwrap(), x);
        assert_eq!(x.compose(&id).unwrap(), x);
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn linear_combinations() {
        let x = op("2", "s", "1 - s", "s^2", "s*eta", "eta - 1");
        assert!(x.add(&x.scale(&int(-1))).unwrap().is_zero());
        let v = state(1, "s");
        let two: PiOperator = PiOperator::identity(Interval::unit(), 1, 1).scale(&int(2));
        assert_eq!(two.apply(&v).unwrap(), state(2, "2*s"));
        assert!(x.symmetrize().unwrap().is_self_adjoint());
    }

    #[test]
    fn skew_symmetrizes_to_zero() {
        let p = PolyMatrix::from_constants(2, 2, &[int(0), int(1), int(-1), int(0)]).unwrap();
        let mut skew = PiOperator::zero(Interval::unit(), Dims::square(2, 0));
        skew.p = p;
        assert!(skew.symmetrize().unwrap().is_zero());
        let z: PiOperator = PiOperator::zero(Interval::unit(), Dims::square(1, 1));
        assert!(z.symmetrize().unwrap().is_zero());
    }

    #[test]
    fn inner_product_examples() {
        let v = state(1, "1");
        let id: PiOperator = PiOperator::identity(Interval::unit(), 1, 1);
        assert_eq!(inner_product(&v, &id, &v).unwrap(), int(2));
        let z: PiOperator = PiOperator::zero(Interval::unit(), Dims::square(1, 1));
        assert_eq!(inner_product(&v, &z, &v).unwrap(), int(0));
    }

    #[test]
    fn rejects_bad_blocks() {
        let bad = PiOperator::new(
            Interval::unit(),
            one_by_one("s"),
            one_by_one("0"),
            one_by_one("0"),
            one_by_one("0"),
            one_by_one("0"),
            one_by_one("0"),
        );
        assert!(matches!(bad, Err(PiError::Variable { block: "P", .. })));
        let bad = PiOperator::new(
            Interval::unit(),
            one_by_one("0"),
            one_by_one("0"),
            one_by_one("0"),
            one_by_one("0"),
            one_by_one("theta"),
            one_by_one("0"),
        );
        assert!(matches!(bad, Err(PiError::Variable { block: "R1", .. })));
        assert!(Interval::new(int(1), int(1)).is_err());
    }

    #[test]
    fn empty_blocks_compose() {
        let a: PiOperator = PiOperator::identity(Interval::unit(), 2, 0);
        let b = a.compose(&a).unwrap();
        assert_eq!(b, a);
        assert_eq!(b.dims(), Dims::square(2, 0));
    }
}
