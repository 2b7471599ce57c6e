//! Exact matrix-valued polynomials in `s`, `eta`, `theta`.

mod coeff;
mod grammar;
pub mod linalg;
mod matrix;
mod poly;

pub use coeff::{from_f64, int, ratio, to_f64, Affine, Coeff, CoeffMul, Numeric, Scalar};
pub use grammar::{format_poly, parse_poly, parse_poly_as, Params, TextCoeff};
pub use matrix::PolyMatrix;
pub use poly::{Monomial, Point, Poly, Var};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("integration bound contains the integration variable {0}")]
    BoundContainsVariable(Var),
    #[error("variable {0} is not bound")]
    UnboundVariable(Var),
    #[error("matrix is not constant")]
    NotConstant,
    #[error("cannot parse '{text}' at offset {pos}: {msg}")]
    Parse { text: String, pos: usize, msg: String },
}

/// `[a, b]` as a pair of constant polynomials, handy for integration bounds.
pub fn bounds(a: &Scalar, b: &Scalar) -> (Poly, Poly) {
    (Poly::constant(a.clone()), Poly::constant(b.clone()))
}
