#![allow(dead_code)]

use std::path::PathBuf;

use piestab_core::polyalg::{from_f64, Params};
use piestab_core::system_model::{CoupledSystem, ProblemDoc};

pub const FIXTURES: [&str; 4] =
    ["heat_actuator", "heat_actuator_minimal_ports", "reaction_diffusion_dirichlet", "reaction_diffusion_neumann"];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn doc(name: &str) -> ProblemDoc {
    ProblemDoc::from_path(&fixture(name)).unwrap()
}

pub fn system(name: &str) -> CoupledSystem {
    doc(name).build(&Params::new()).unwrap()
}

pub fn with_lambda(lambda: f64) -> Params {
    let mut p = Params::new();
    p.insert("lambda".into(), from_f64(lambda).unwrap());
    p
}

pub fn system_at(name: &str, lambda: f64) -> CoupledSystem {
    doc(name).build(&with_lambda(lambda)).unwrap()
}

pub fn from_json(text: &str) -> CoupledSystem {
    ProblemDoc::from_json(text).unwrap().build(&Params::new()).unwrap()
}

pub const PURE_HEAT: &str = r#"{"interval": [0, 1], "pde": {"n": 1, "A2": [[1]], "Bc": "dirichlet-dirichlet"}}"#;

use piestab_core::pi_operator::{Interval, PiOperator, StateFunction};
use piestab_core::polyalg::{int, ratio, PolyMatrix, Var};
use piestab_core::system_model::{random_poly, random_scalar};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_interval(rng: &mut StdRng) -> Interval {
    let starts = [int(-1), int(0), ratio(1, 2)];
    let lengths = [int(1), int(2), ratio(1, 2)];
    let a = starts[rng.gen_range(0..3)].clone();
    let len = lengths[rng.gen_range(0..3)].clone();
    let b = &a + &len;
    Interval::new(a, b).unwrap()
}

/// `(m, n)` with `m` in `0..=2` and `n` in `1..=2`.
pub fn random_space(rng: &mut StdRng) -> (usize, usize) {
    (rng.gen_range(0..=2), rng.gen_range(1..=2))
}

pub fn random_operator(
    rng: &mut StdRng,
    iv: &Interval,
    out: (usize, usize),
    inp: (usize, usize),
    deg: u32,
) -> PiOperator {
    let mut m = |rows, cols, vars: &[Var]| PolyMatrix::from_fn(rows, cols, |_, _| random_poly(rng, vars, deg));
    let p = m(out.0, inp.0, &[]);
    let q1 = m(out.0, inp.1, &[Var::S]);
    let q2 = m(out.1, inp.0, &[Var::S]);
    let s = m(out.1, inp.1, &[Var::S]);
    let r1 = m(out.1, inp.1, &[Var::S, Var::Eta]);
    let r2 = m(out.1, inp.1, &[Var::S, Var::Eta]);
    PiOperator::new(iv.clone(), p, q1, q2, s, r1, r2).unwrap()
}

pub fn random_state(rng: &mut StdRng, space: (usize, usize), deg: u32) -> StateFunction {
    let x = (0..space.0).map(|_| random_scalar(rng)).collect();
    let z = PolyMatrix::from_fn(space.1, 1, |_, _| random_poly(rng, &[Var::S], deg));
    StateFunction::new(x, z)
}
