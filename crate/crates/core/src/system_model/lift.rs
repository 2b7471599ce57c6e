use super::{CoupledSystem, FundamentalMaps, ModelError};
use crate::pi_operator::{Dims, PiOperator, StateFunction};
use crate::polyalg::{Poly, PolyMatrix, Scalar, Var};

/// Separable kernel `K(s, eta) = left(s) * right(eta)`.
fn separable(left: &PolyMatrix, right: &PolyMatrix) -> Result<PolyMatrix, ModelError> {
    Ok(left.mul(&right.rename([Var::Eta, Var::Eta, Var::Theta]))?)
}

/// The generator of the coupled system as an operator on `(x, z_ss)`.
pub fn lift_dynamics(sys: &CoupledSystem, maps: &FundamentalMaps) -> Result<PiOperator, ModelError> {
    let n_o = sys.n_o();
    let n_p = sys.n_p();
    let iv = sys.interval().clone();
    let (ode, pde, link) = (&sys.ode, &sys.pde, &sys.link);
    let (l1, l2, l3, l4) = (link.l1(), link.l2(), link.l3(), link.l4());
    let b1l4 = pde.b1.mul(&l4)?;
    let bl2 = ode.b.mul(&l2)?;
    let dims = Dims::square(n_o, n_p);

    // Terms acting on z.
    let mut on_z = PiOperator::zero(iv.clone(), dims);
    on_z.p = ode.a.add(&ode.b.mul(&l1)?.mul(&ode.c)?)?;
    on_z.q1 = bl2.mul(&pde.ca)?;
    on_z.q2 = pde.b1.mul(&l3)?.mul(&ode.c)?;
    on_z.s = pde.a0.clone();
    on_z.r1 = separable(&b1l4, &pde.ca)?;
    on_z.r2 = on_z.r1.clone();

    // Terms acting on z_s.
    let mut on_zs = PiOperator::zero(iv.clone(), dims);
    on_zs.q1 = bl2.mul(&pde.cb)?;
    on_zs.s = pde.a1.clone();
    on_zs.r1 = separable(&b1l4, &pde.cb)?;
    on_zs.r2 = on_zs.r1.clone();

    // Terms acting on z_ss, including the boundary output.
    let mut on_zss = PiOperator::zero(iv, dims);
    on_zss.q1 = bl2.mul(&maps.c3)?;
    on_zss.s = pde.a2.clone();
    on_zss.r1 = separable(&b1l4, &maps.c3)?;
    on_zss.r2 = on_zss.r1.clone();

    let lifted = on_z.compose(&maps.g12_operator(n_o))?.add(&on_zs.compose(&maps.g34_operator(n_o))?)?.add(&on_zss)?;
    Ok(lifted)
}

/// Evaluate the coupled generator directly on `(x, z)` with `z` polynomial
/// and admissible.
pub fn direct_dynamics(sys: &CoupledSystem, state: &StateFunction) -> Result<StateFunction, ModelError> {
    let iv = sys.interval();
    let (lo, hi) = (iv.lo(), iv.hi());
    let (ode, pde, link) = (&sys.ode, &sys.pde, &sys.link);
    let z = &state.z;
    let zs = z.derivative(Var::S);
    let zss = zs.derivative(Var::S);
    let x = PolyMatrix::from_fn(state.x.len(), 1, |i, _| Poly::constant(state.x[i].clone()));

    let zb = PolyMatrix::vstack(&[
        &z.substitute(&[(Var::S, lo.clone())]),
        &z.substitute(&[(Var::S, hi.clone())]),
        &zs.substitute(&[(Var::S, lo.clone())]),
        &zs.substitute(&[(Var::S, hi.clone())]),
    ])?;
    let y = pde.c1.mul(&zb)?.add(&pde.ca.mul(z)?.add(&pde.cb.mul(&zs)?)?.integrate(Var::S, &lo, &hi)?)?;
    let w = ode.c.mul(&x)?;
    let v = link.l1().mul(&w)?.add(&link.l2().mul(&y)?)?;
    let u = link.l3().mul(&w)?.add(&link.l4().mul(&y)?)?;

    let xdot = ode.a.mul(&x)?.add(&ode.b.mul(&v)?)?;
    let zdot = pde.a0.mul(z)?.add(&pde.a1.mul(&zs)?)?.add(&pde.a2.mul(&zss)?)?.add(&pde.b1.mul(&u)?)?;
    let xs: Vec<Scalar> = (0..xdot.rows()).map(|i| xdot.get(i, 0).constant_term()).collect();
    Ok(StateFunction::new(xs, zdot))
}
