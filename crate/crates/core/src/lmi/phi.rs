use super::basis::{relabel, GramCandidate};
use super::LmiError;
use crate::pi_operator::{Interval, PiOperator};
use crate::polyalg::{Coeff, CoeffMul, Poly, PolyMatrix, Scalar, Var};

/// Operator whose quadratic form is
/// `int_a^b |U1 x + U2 Z(s) z(s) + int_a^s U3 Z(s,eta) z(eta) deta + int_s^b U4 Z(s,eta) z(eta) deta|^2 ds`
/// for `T = U^T U`. Affine in the entries of `T`.
pub fn phi_parametrize<C>(g: &GramCandidate<C>, interval: &Interval) -> Result<PiOperator<C>, LmiError>
where
    C: Coeff + CoeffMul<Scalar, Output = C>,
    Scalar: CoeffMul<C, Output = C>,
{
    let basis = &g.basis;
    let n = basis.n();
    let (lo, hi) = (interval.lo(), interval.hi());
    let s = Poly::var(Var::S);
    let eta = Poly::var(Var::Eta);

    let zs = basis.zs();
    let zs_t = zs.transpose();
    let zs_eta = zs.rename(relabel::S_TO_ETA);
    let zh = basis.zsh();
    let zh_swap = zh.rename(relabel::SWAP);
    let zh_swap_t = zh_swap.transpose();
    let zh_theta_s_t = zh.rename(relabel::TO_THETA_S).transpose();
    let zh_theta_eta = zh.rename(relabel::TO_THETA_ETA);

    let t = |i: usize, j: usize| g.block(i, j);

    let p = t(0, 0).scale(&interval.length());

    let mut q = t(0, 1).mul(&zs)?;
    let t13z = t(0, 2).mul(&zh_swap)?;
    q.add_assign(&t13z.integrate(Var::Eta, &s, &hi)?)?;
    let t14z = t(0, 3).mul(&zh_swap)?;
    q.add_assign(&t14z.integrate(Var::Eta, &lo, &s)?)?;

    let smult = zs_t.mul(&t(1, 1))?.mul(&zs)?;

    // Integrands in (theta, s, eta) shared by both kernels.
    let inner = |bi: usize, bj: usize| -> Result<PolyMatrix<C>, LmiError> {
        Ok(zh_theta_s_t.mul(&t(bi, bj))?.mul(&zh_theta_eta)?)
    };
    let k33 = inner(2, 2)?;
    let k44 = inner(3, 3)?;

    let mut r1 = zs_t.mul(&t(1, 2))?.mul(&zh)?;
    r1.add_assign(&zh_swap_t.mul(&t(3, 1))?.mul(&zs_eta)?)?;
    r1.add_assign(&k33.integrate(Var::Theta, &s, &hi)?)?;
    r1.add_assign(&inner(3, 2)?.integrate(Var::Theta, &eta, &s)?)?;
    r1.add_assign(&k44.integrate(Var::Theta, &lo, &eta)?)?;

    let mut r2 = zs_t.mul(&t(1, 3))?.mul(&zh)?;
    r2.add_assign(&zh_swap_t.mul(&t(2, 1))?.mul(&zs_eta)?)?;
    r2.add_assign(&k33.integrate(Var::Theta, &eta, &hi)?)?;
    r2.add_assign(&inner(2, 3)?.integrate(Var::Theta, &s, &eta)?)?;
    r2.add_assign(&k44.integrate(Var::Theta, &lo, &s)?)?;

    debug_assert_eq!(smult.dims(), (n, n));
    let qt = q.transpose();
    Ok(PiOperator::new(interval.clone(), p, q, qt, smult, r1, r2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmi::basis::MonomialBasis;
    use crate::polyalg::{int, parse_poly, Params};

    fn p(t: &str) -> Poly {
        parse_poly(t, &Params::new()).unwrap()
    }

    #[test]
    fn identity_gram_unit_interval() {
        let basis = MonomialBasis::new(1, Some(0), 0);
        let eye: Vec<Vec<Scalar>> = (0..4).map(|i| (0..4).map(|j| int((i == j) as i64)).collect()).collect();
        let g = GramCandidate::from_dense(basis, 1, &eye);
        let op = phi_parametrize(&g, &Interval::unit()).unwrap();
        assert_eq!(op.p.get(0, 0), &p("1"));
        assert!(op.q1.is_zero());
        assert_eq!(op.s.get(0, 0), &p("1"));
        assert_eq!(op.r1.get(0, 0), &p("(1 - s) + eta"));
        assert_eq!(op.r2.get(0, 0), &p("(1 - eta) + s"));
        assert!(op.is_self_adjoint());
    }

    #[test]
    fn zero_gram_gives_zero() {
        let basis = MonomialBasis::new(2, Some(1), 1);
        let g: GramCandidate<Scalar> = GramCandidate::zero(basis, 3);
        assert!(phi_parametrize(&g, &Interval::unit()).unwrap().is_zero());
    }

    #[test]
    fn length_scales_constant_block() {
        let basis = MonomialBasis::new(1, None, 0);
        let mut rows = vec![vec![int(0); 3]; 3];
        rows[0][0] = int(1);
        let g = GramCandidate::from_dense(basis, 1, &rows);
        let iv = Interval::new(int(0), int(3)).unwrap();
        assert_eq!(phi_parametrize(&g, &iv).unwrap().p.get(0, 0), &p("3"));
    }
}
