use rand::Rng;

use super::{maps::bd_matrix, ModelError, PdeModel};
use crate::pi_operator::Interval;
use crate::polyalg::{linalg, Monomial, Poly, PolyMatrix, Scalar, Var};

/// Small random rational with numerator in `[-9, 9]` and denominator in `[1, 4]`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    Scalar::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=4).into())
}

/// Random polynomial in `vars` with every monomial of total degree at most
/// `degree` present with probability 3/4.
pub fn random_poly<R: Rng + ?Sized>(rng: &mut R, vars: &[Var], degree: u32) -> Poly {
    let mut out = Poly::zero();
    let mut exps = vec![[0u32; 3]];
    for v in vars {
        let mut next = Vec::new();
        for e in &exps {
            let used: u32 = e.iter().sum();
            for k in 0..=(degree - used) {
                let mut f = *e;
                f[v.index()] = k;
                next.push(f);
            }
        }
        exps = next;
    }
    for e in exps {
        if rng.gen_bool(0.75) {
            out.add_term(Monomial(e), random_scalar(rng));
        }
    }
    out
}

/// `col(z(a), z(b), z_s(a), z_s(b))`.
pub fn boundary_vector(z: &PolyMatrix, iv: &Interval) -> Vec<Scalar> {
    let zs = z.derivative(Var::S);
    let at = |m: &PolyMatrix, x: &Scalar| -> Vec<Scalar> {
        (0..m.rows()).map(|i| m.get(i, 0).substitute(&[(Var::S, Poly::constant(x.clone()))]).constant_term()).collect()
    };
    [at(z, &iv.a), at(z, &iv.b), at(&zs, &iv.a), at(&zs, &iv.b)].concat()
}

/// Random polynomial `z` (`n x 1`, degree `degree`) with `Bc z_b = 0` exactly.
///
/// A random polynomial is corrected by an affine function `c0 + (s - a) c1`,
/// whose boundary vector is `Bd [c0; c1]`.
pub fn admissible_sample<R: Rng + ?Sized>(pde: &PdeModel, degree: u32, rng: &mut R) -> Result<PolyMatrix, ModelError> {
    let n = pde.n();
    let iv = &pde.interval;
    let p = PolyMatrix::from_fn(n, 1, |_, _| random_poly(rng, &[Var::S], degree));
    let pb = boundary_vector(&p, iv);
    let bc = pde.bc.constants()?;
    let bd = bd_matrix(n, iv);
    let inv = linalg::inverse(&linalg::matmul(&bc, &bd, 4 * n, 2 * n)).ok_or(ModelError::IllPosed)?;
    let rhs: linalg::RatMat = linalg::matmul(&bc, &pb.into_iter().map(|x| vec![x]).collect(), 4 * n, 1);
    let c = linalg::matmul(&inv, &rhs, 2 * n, 1);
    let s_minus_a = Poly::var_minus(Var::S, &iv.a);
    Ok(PolyMatrix::from_fn(n, 1, |i, _| {
        let corr = Poly::constant(c[i][0].clone()).add(&s_minus_a.scale(&c[n + i][0]));
        p.get(i, 0).sub(&corr)
    }))
}
