//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use piestab_core::pi_operator::{Dims, Interval, PiOperator};
use piestab_core::polyalg::{PolyMatrix, Var};
use piestab_core::system_model::{random_poly, ProblemDoc};
use piestab_core::CoupledSystem;
use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn fixture(name: &str) -> CoupledSystem {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(format!("{name}.json"));
    ProblemDoc::from_path(&path).unwrap().build(&Default::default()).unwrap()
}

/// Square operator on `R^m x L2^n[0, 1]` with random kernels of total degree `deg`.
pub fn random_operator(seed: u64, m: usize, n: usize, deg: u32) -> PiOperator {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut op = PiOperator::zero(Interval::unit(), Dims::square(m, n));
    let mut fill = |rows, cols, vars: &[Var]| PolyMatrix::from_fn(rows, cols, |_, _| random_poly(&mut rng, vars, deg));
    op.p = fill(m, m, &[]);
    op.q1 = fill(m, n, &[Var::S]);
    op.q2 = fill(n, m, &[Var::S]);
    op.s = fill(n, n, &[Var::S]);
    op.r1 = fill(n, n, &[Var::S, Var::Eta]);
    op.r2 = fill(n, n, &[Var::S, Var::Eta]);
    op
}
