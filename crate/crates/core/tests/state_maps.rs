mod common;

use num_traits::Zero;
use piestab_core::lmi::{norm_equivalence_operator, phi_parametrize, GramCandidate, MonomialBasis};
use piestab_core::pi_operator::{inner_product, Interval, StateFunction};
use piestab_core::polyalg::{PolyMatrix, Scalar, Var};
use piestab_core::system_model::{
    admissible_sample, boundary_vector, build_fundamental_maps, direct_dynamics, lift_dynamics, random_scalar,
    BoundaryPreset, PdeModel,
};
use rand::Rng;

use common::*;

fn preset_pde(preset: BoundaryPreset, n: usize, iv: Interval) -> PdeModel {
    let sq = || PolyMatrix::zeros(n, n);
    PdeModel {
        interval: iv,
        a0: sq(),
        a1: sq(),
        a2: PolyMatrix::identity(n),
        b1: PolyMatrix::zeros(n, 0),
        c1: PolyMatrix::zeros(0, 4 * n),
        ca: PolyMatrix::zeros(0, n),
        cb: PolyMatrix::zeros(0, n),
        bc: preset.matrix(n),
    }
}

fn state_with_second_derivative(x: Vec<Scalar>, z: &PolyMatrix) -> (StateFunction, StateFunction) {
    let zss = z.derivative(Var::S).derivative(Var::S);
    (StateFunction::new(x.clone(), z.clone()), StateFunction::new(x, zss))
}

#[test]
fn reconstruction_from_second_derivative() {
    for preset in BoundaryPreset::ALL {
        let mut r = rng(0x4ec0 + preset as u64);
        for _ in 0..50 {
            let n = r.gen_range(1..=2);
            let m = r.gen_range(0..=2);
            let pde = preset_pde(preset, n, random_interval(&mut r));
            let maps = build_fundamental_maps(&pde).unwrap();
            let z = admissible_sample(&pde, r.gen_range(2..=6), &mut r).unwrap();
            let x: Vec<Scalar> = (0..m).map(|_| random_scalar(&mut r)).collect();
            let (v, fundamental) = state_with_second_derivative(x.clone(), &z);
            assert_eq!(maps.g12_operator(m).apply(&fundamental).unwrap(), v, "{}", preset.name());
            let vs = StateFunction::new(x, z.derivative(Var::S));
            assert_eq!(maps.g34_operator(m).apply(&fundamental).unwrap(), vs, "{}", preset.name());
        }
    }
}

#[test]
fn admissible_samples_satisfy_boundary_conditions() {
    let mut r = rng(11);
    for preset in BoundaryPreset::ALL {
        for _ in 0..20 {
            let pde = preset_pde(preset, 2, random_interval(&mut r));
            let z = admissible_sample(&pde, 4, &mut r).unwrap();
            let zb = boundary_vector(&z, &pde.interval);
            let bc = pde.bc.constants().unwrap();
            for row in bc {
                let dot = row.iter().zip(&zb).fold(Scalar::zero(), |acc, (a, b)| acc + a * b);
                assert!(dot.is_zero());
            }
        }
    }
}

#[test]
fn lifted_dynamics_match_direct_evaluation() {
    for name in FIXTURES {
        let sys = system(name);
        let maps = build_fundamental_maps(&sys.pde).unwrap();
        let lifted = lift_dynamics(&sys, &maps).unwrap();
        let mut r = rng(0x11f7);
        for _ in 0..25 {
            let z = admissible_sample(&sys.pde, r.gen_range(2..=6), &mut r).unwrap();
            let x: Vec<Scalar> = (0..sys.n_o()).map(|_| random_scalar(&mut r)).collect();
            let (v, fundamental) = state_with_second_derivative(x, &z);
            let direct = direct_dynamics(&sys, &v).unwrap();
            let via_lift = lifted.apply(&fundamental).unwrap();
            assert_eq!(via_lift, direct, "{name}");
        }
    }
}

/// `U^T U` for a random rational `U`.
fn random_psd(r: &mut rand::rngs::StdRng, size: usize) -> Vec<Vec<Scalar>> {
    let u: Vec<Vec<Scalar>> = (0..size).map(|_| (0..size).map(|_| random_scalar(r)).collect()).collect();
    (0..size)
        .map(|i| (0..size).map(|j| (0..size).fold(Scalar::zero(), |acc, k| acc + &u[k][i] * &u[k][j])).collect())
        .collect()
}

#[test]
fn gram_parametrization_is_positive() {
    for d in 0..=2u32 {
        let mut r = rng(0x9a11 + d as u64);
        for _ in 0..100 {
            let n = r.gen_range(1..=2);
            let n_o = r.gen_range(0..=1);
            let iv = random_interval(&mut r);
            let basis = MonomialBasis::new(n, Some(d), d);
            let size = n_o + n * (basis.q1() + 2 * basis.q2());
            let gram = GramCandidate::from_dense(basis, n_o, &random_psd(&mut r, size));
            let phi = phi_parametrize(&gram, &iv).unwrap();
            assert!(phi.is_self_adjoint());
            let deg = r.gen_range(1..=4);
            let v = random_state(&mut r, (n_o, n), deg);
            let q = inner_product(&v, &phi, &v).unwrap();
            assert!(q >= Scalar::zero(), "degree {d}: {q}");
        }
    }
}

#[test]
fn norm_equivalence_reproduces_state_norm() {
    let mut r = rng(0x0e9);
    for preset in BoundaryPreset::ALL {
        for _ in 0..20 {
            let n = r.gen_range(1..=2);
            let n_o = r.gen_range(0..=2);
            let pde = preset_pde(preset, n, random_interval(&mut r));
            let maps = build_fundamental_maps(&pde).unwrap();
            let op = norm_equivalence_operator(&maps, n_o).unwrap();
            let z = admissible_sample(&pde, r.gen_range(2..=6), &mut r).unwrap();
            let x: Vec<Scalar> = (0..n_o).map(|_| random_scalar(&mut r)).collect();
            let (v, fundamental) = state_with_second_derivative(x, &z);
            let lhs = inner_product(&fundamental, &op, &fundamental).unwrap();
            assert_eq!(lhs, v.norm_sq(&pde.interval).unwrap(), "{}", preset.name());
        }
    }
}

#[test]
fn output_kernel_matches_boundary_output() {
    let mut r = rng(0xc3);
    for name in FIXTURES {
        let sys = system(name);
        let maps = build_fundamental_maps(&sys.pde).unwrap();
        let iv = sys.interval();
        for _ in 0..20 {
            let z = admissible_sample(&sys.pde, r.gen_range(2..=6), &mut r).unwrap();
            let zss = z.derivative(Var::S).derivative(Var::S);
            let lhs = maps.c3.mul(&zss).unwrap().integrate(Var::S, &iv.lo(), &iv.hi()).unwrap();
            let zb = boundary_vector(&z, iv);
            let zb = PolyMatrix::from_fn(zb.len(), 1, |i, _| piestab_core::polyalg::Poly::constant(zb[i].clone()));
            assert_eq!(lhs, sys.pde.c1.mul(&zb).unwrap(), "{name}");
        }
    }
}

#[test]
fn gram_parametrization_is_affine() {
    let mut r = rng(0xaff);
    for d in 0..=2u32 {
        for _ in 0..10 {
            let (n, n_o) = (r.gen_range(1..=2), r.gen_range(0..=2));
            let iv = random_interval(&mut r);
            let basis = MonomialBasis::new(n, Some(d), d);
            let size = n_o + n * (basis.q1() + 2 * basis.q2());
            let (t, u) = (random_psd(&mut r, size), random_psd(&mut r, size));
            let (alpha, beta) = (random_scalar(&mut r), random_scalar(&mut r));
            let mix: Vec<Vec<Scalar>> =
                (0..size).map(|i| (0..size).map(|j| &alpha * &t[i][j] + &beta * &u[i][j]).collect()).collect();
            let phi =
                |m: &[Vec<Scalar>]| phi_parametrize(&GramCandidate::from_dense(basis.clone(), n_o, m), &iv).unwrap();
            let combined = phi(&t).scale(&alpha).add(&phi(&u).scale(&beta)).unwrap();
            assert_eq!(phi(&mix), combined, "degree {d}");
        }
    }
}
