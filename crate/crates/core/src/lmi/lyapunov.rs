use super::basis::GramCandidate;
use super::phi::phi_parametrize;
use super::LmiError;
use crate::pi_operator::{Interval, PiOperator};
use crate::polyalg::{Coeff, CoeffMul, Scalar};
use crate::system_model::FundamentalMaps;

/// `Phi(T) + eps * I`, acting on `(x, z)`.
pub fn lyapunov_candidate<C>(t: &GramCandidate<C>, eps: &Scalar, interval: &Interval) -> Result<PiOperator<C>, LmiError>
where
    C: Coeff + CoeffMul<Scalar, Output = C>,
    Scalar: CoeffMul<C, Output = C>,
{
    let phi = phi_parametrize(t, interval)?;
    let d = phi.dims();
    let shift = PiOperator::<C>::identity(interval.clone(), d.m_out, d.n_out).scale(eps);
    Ok(phi.add(&shift)?)
}

/// Operator on `(x, z_ss)` whose quadratic form is the time derivative of
/// `<(x, z), cand (x, z)>` along the dynamics `dyn_op`.
pub fn derivative_operator<C>(
    cand: &PiOperator<C>,
    dyn_op: &PiOperator,
    maps: &FundamentalMaps,
) -> Result<PiOperator<C>, LmiError>
where
    C: Coeff + CoeffMul<Scalar, Output = C>,
    Scalar: CoeffMul<C, Output = C>,
{
    let g = maps.g12_operator(cand.dims().m_in);
    let inner = cand.compose(dyn_op)?;
    let k = g.adjoint().compose(&inner)?;
    Ok(k.symmetrize()?)
}

/// `G* G` with `G = (I, 0, 0, 0, G1, G2)`: the state norm as a form in `(x, z_ss)`.
pub fn norm_equivalence_operator(maps: &FundamentalMaps, n_o: usize) -> Result<PiOperator, LmiError> {
    let g = maps.g12_operator(n_o);
    Ok(g.adjoint().compose(&g)?)
}
