use num_traits::{One, Zero};

use super::{ModelError, PdeModel};
use crate::pi_operator::{Dims, Interval, PiOperator};
use crate::polyalg::{linalg, Poly, PolyMatrix, Scalar, Var};

/// Kernels reconstructing `z` and `z_s` from `z_ss` under `Bc z_b = 0`.
///
/// `z(s) = int_a^s G1(s,eta) z_ss(eta) deta + int_s^b G2(s,eta) z_ss(eta) deta`,
/// and likewise `z_s` with `G3`, `G4`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalMaps {
    pub interval: Interval,
    pub bd: PolyMatrix,
    /// `2n x n`, in `eta`.
    pub bf: PolyMatrix,
    /// `n x n`, in `(s, eta)`.
    pub ba: PolyMatrix,
    /// `n x n`, in `eta`.
    pub bb: PolyMatrix,
    pub g1: PolyMatrix,
    pub g2: PolyMatrix,
    pub g3: PolyMatrix,
    pub g4: PolyMatrix,
    /// `p x n`, in `s`; `C1 z_b = int_a^b C3(s) z_ss(s) ds`.
    pub c3: PolyMatrix,
}

impl FundamentalMaps {
    pub fn n(&self) -> usize {
        self.g1.rows()
    }

    /// `(x, z_ss) -> (x, z)` with an `m`-dimensional finite part.
    pub fn g12_operator(&self, m: usize) -> PiOperator {
        self.reconstruction(m, &self.g1, &self.g2)
    }

    /// `(x, z_ss) -> (x, z_s)`.
    pub fn g34_operator(&self, m: usize) -> PiOperator {
        self.reconstruction(m, &self.g3, &self.g4)
    }

    fn reconstruction(&self, m: usize, r1: &PolyMatrix, r2: &PolyMatrix) -> PiOperator {
        let mut op = PiOperator::zero(self.interval.clone(), Dims::square(m, self.n()));
        op.p = PolyMatrix::identity(m);
        op.r1 = r1.clone();
        op.r2 = r2.clone();
        op
    }
}

fn const_poly_matrix(m: &linalg::RatMat, rows: usize, cols: usize) -> PolyMatrix {
    PolyMatrix::from_fn(rows, cols, |i, j| Poly::constant(m[i][j].clone()))
}

/// `[I 0; I (b-a)I; 0 I; 0 I]`, `4n x 2n`.
pub(crate) fn bd_matrix(n: usize, iv: &Interval) -> linalg::RatMat {
    let len = iv.length();
    let mut m = vec![vec![Scalar::zero(); 2 * n]; 4 * n];
    for i in 0..n {
        m[i][i] = Scalar::one();
        m[n + i][i] = Scalar::one();
        m[n + i][n + i] = len.clone();
        m[2 * n + i][n + i] = Scalar::one();
        m[3 * n + i][n + i] = Scalar::one();
    }
    m
}

/// `col(0, (b - v) I, 0, I)`, `4n x n`, in variable `v`.
fn tail_column(n: usize, iv: &Interval, v: Var) -> PolyMatrix {
    let b_minus = iv.hi().sub(&Poly::var(v));
    PolyMatrix::from_fn(4 * n, n, |i, j| {
        if i == n + j {
            b_minus.clone()
        } else if i == 3 * n + j {
            Poly::one()
        } else {
            Poly::zero()
        }
    })
}

pub fn build_fundamental_maps(pde: &PdeModel) -> Result<FundamentalMaps, ModelError> {
    let n = pde.n();
    let iv = &pde.interval;
    let bc = pde.bc.constants()?;
    let bd = bd_matrix(n, iv);
    let bcbd = linalg::matmul(&bc, &bd, 4 * n, 2 * n);
    let inv = linalg::inverse(&bcbd).ok_or(ModelError::IllPosed)?;
    let proj = const_poly_matrix(&linalg::matmul(&inv, &bc, 2 * n, 4 * n), 2 * n, 4 * n);
    let bd = const_poly_matrix(&bd, 4 * n, 2 * n);

    let bf = proj.mul(&tail_column(n, iv, Var::Eta))?;
    let s_minus_a = Poly::var_minus(Var::S, &iv.a);
    let left = PolyMatrix::from_fn(n, 2 * n, |i, j| {
        if j == i {
            Poly::one()
        } else if j == n + i {
            s_minus_a.clone()
        } else {
            Poly::zero()
        }
    });
    let right: PolyMatrix = PolyMatrix::from_fn(n, 2 * n, |i, j| if j == n + i { Poly::one() } else { Poly::zero() });
    let ba = left.mul(&bf)?.neg();
    let bb = right.mul(&bf)?.neg();

    let s_minus_eta = Poly::var(Var::S).sub(&Poly::var(Var::Eta));
    let diag = |p: &Poly| PolyMatrix::from_fn(n, n, |i, j| if i == j { p.clone() } else { Poly::zero() });
    let g1 = ba.add(&diag(&s_minus_eta))?;
    let g2 = ba.clone();
    let g3 = bb.add(&PolyMatrix::identity(n))?;
    let g4 = bb.clone();

    let bf_s = bf.swap(Var::S, Var::Eta);
    let c3 = pde.c1.mul(&tail_column(n, iv, Var::S))?.sub(&pde.c1.mul(&bd)?.mul(&bf_s)?)?;

    Ok(FundamentalMaps { interval: iv.clone(), bd, bf, ba, bb, g1, g2, g3, g4, c3 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi_operator::StateFunction;
    use crate::polyalg::{parse_poly, ratio, Params};

    fn p(t: &str) -> Poly {
        parse_poly(t, &Params::new()).unwrap()
    }

    #[test]
    fn dirichlet_unit_interval() {
        let sys = super::super::problem::tests::heat_system();
        let maps = build_fundamental_maps(&sys.pde).unwrap();
        assert_eq!(maps.bf.get(0, 0), &Poly::zero());
        assert_eq!(maps.bf.get(1, 0), &p("1 - eta"));
        assert_eq!(maps.ba.get(0, 0), &p("-s*(1 - eta)"));
        assert_eq!(maps.g1.get(0, 0), &p("-s*(1 - eta) + s - eta"));
        assert_eq!(maps.g2.get(0, 0), &p("-s*(1 - eta)"));
        assert!(!maps.bb.contains(Var::S));

        let c = ratio(3, 5);
        let v = StateFunction::new(vec![], PolyMatrix::new(1, 1, vec![Poly::constant(c.clone())]).unwrap());
        let z = maps.g12_operator(0).apply(&v).unwrap().z;
        assert_eq!(z.get(0, 0), &p("s*(s - 1)/2").scale(&c));
    }
}
