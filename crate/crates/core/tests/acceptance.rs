//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::Zero;
use piestab_core::analysis::{analyze, analyze_system, sweep, AnalysisConfig, Outputs, SweepSpec};
use piestab_core::lmi::{norm_equivalence_operator, phi_parametrize, GramCandidate, MonomialBasis, VerdictStatus};
use piestab_core::pi_operator::{inner_product, StateFunction};
use piestab_core::polyalg::{PolyMatrix, Scalar, Var};
use piestab_core::simulate::{semidiscretize, simulate, SimConfig};
use piestab_core::system_model::{
    admissible_sample, build_fundamental_maps, direct_dynamics, lift_dynamics, random_scalar, BoundaryPreset, PdeModel,
};
use rand::Rng;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn status_at(name: &str, lambda: Option<f64>, d: u32) -> VerdictStatus {
    let sys = match lambda {
        Some(l) => system_at(name, l),
        None => system(name),
    };
    analyze_system(sys, &AnalysisConfig::default().with_degrees(d, d), None).unwrap().verdict.status
}

fn threshold(name: &str, lower: f64, upper: f64, d: u32) -> Option<f64> {
    let spec = SweepSpec { param: "lambda".into(), lower, upper, tol: 0.05 };
    let config = AnalysisConfig { sweep: Some(spec), ..Default::default() }.with_degrees(d, d);
    sweep(&fixture(name), &config).unwrap().sweep.unwrap().threshold
}

fn never_certified(name: &str, lambda: f64) -> Result<(), String> {
    for d in 0..=6 {
        let status = status_at(name, Some(lambda), d);
        ensure(
            status == VerdictStatus::UnknownInfeasible,
            format!("lambda={lambda} at degree {d}: {}", status.as_str()),
        )?;
    }
    Ok(())
}

fn heat_actuator() -> Outcome {
    for d in 1..=2 {
        let t = Instant::now();
        let status = status_at("heat_actuator", None, d);
        let secs = t.elapsed().as_secs_f64();
        ensure(status == VerdictStatus::StableCertified, format!("degree {d}: {}", status.as_str()))?;
        ensure(secs < 30.0, format!("degree {d} took {secs:.1}s"))?;
    }
    Ok("certified at degrees 1 and 2".into())
}

fn dirichlet_threshold() -> Outcome {
    let name = "reaction_diffusion_dirichlet";
    ensure(status_at(name, Some(9.0), 1) == VerdictStatus::StableCertified, "lambda=9 not certified at degree 1")?;
    let t = threshold(name, 0.0, 15.0, 2).ok_or("sweep certified nothing")?;
    ensure(t >= 9.5, format!("threshold {t:.3} below 9.5"))?;
    never_certified(name, 10.5)?;
    Ok(format!("threshold {t:.3} (pi^2 = {:.4}); lambda=10.5 infeasible at degrees 0..=6", PI * PI))
}

fn neumann_threshold() -> Outcome {
    let name = "reaction_diffusion_neumann";
    ensure(status_at(name, Some(2.3), 1) == VerdictStatus::StableCertified, "lambda=2.3 not certified at degree 1")?;
    let t = threshold(name, 0.0, 5.0, 2).ok_or("sweep certified nothing")?;
    ensure(t >= 2.3, format!("threshold {t:.3} below 2.3"))?;
    never_certified(name, 2.6)?;
    Ok(format!("threshold {t:.3}; lambda=2.6 infeasible at degrees 0..=6"))
}

fn operator_algebra() -> Outcome {
    const CASES: usize = 60;
    let mut r = rng(0xa1);
    for _ in 0..CASES {
        let iv = random_interval(&mut r);
        let spaces: Vec<_> = (0..4).map(|_| random_space(&mut r)).collect();
        let a = random_operator(&mut r, &iv, spaces[3], spaces[2], 1);
        let b = random_operator(&mut r, &iv, spaces[2], spaces[1], 1);
        let c = random_operator(&mut r, &iv, spaces[1], spaces[0], 1);
        let u = random_state(&mut r, spaces[3], 3);
        let v = random_state(&mut r, spaces[2], 3);
        let w = random_state(&mut r, spaces[1], 3);
        let adj = u.dot(&a.apply(&v).unwrap(), &iv).unwrap() == a.adjoint().apply(&u).unwrap().dot(&v, &iv).unwrap();
        ensure(adj, "adjoint identity")?;
        let ab = a.compose(&b).unwrap();
        ensure(ab.apply(&w).unwrap() == a.apply(&b.apply(&w).unwrap()).unwrap(), "composition order")?;
        ensure(ab.compose(&c).unwrap() == a.compose(&b.compose(&c).unwrap()).unwrap(), "associativity")?;
        ensure(ab.adjoint() == b.adjoint().compose(&a.adjoint()).unwrap(), "adjoint of composition")?;
    }
    Ok(format!("{CASES} instances, exact"))
}

fn preset_pde(preset: BoundaryPreset, n: usize, r: &mut rand::rngs::StdRng) -> PdeModel {
    PdeModel {
        interval: random_interval(r),
        a0: PolyMatrix::zeros(n, n),
        a1: PolyMatrix::zeros(n, n),
        a2: PolyMatrix::identity(n),
        b1: PolyMatrix::zeros(n, 0),
        c1: PolyMatrix::zeros(0, 4 * n),
        ca: PolyMatrix::zeros(0, n),
        cb: PolyMatrix::zeros(0, n),
        bc: preset.matrix(n),
    }
}

fn fundamental_pair(r: &mut rand::rngs::StdRng, m: usize, z: &PolyMatrix) -> (StateFunction, StateFunction) {
    let x: Vec<Scalar> = (0..m).map(|_| random_scalar(r)).collect();
    let zss = z.derivative(Var::S).derivative(Var::S);
    (StateFunction::new(x.clone(), z.clone()), StateFunction::new(x, zss))
}

fn reconstruction() -> Outcome {
    let mut r = rng(0xa2);
    for preset in BoundaryPreset::ALL {
        for _ in 0..50 {
            let (n, m) = (r.gen_range(1..=2), r.gen_range(0..=2));
            let pde = preset_pde(preset, n, &mut r);
            let maps = build_fundamental_maps(&pde).unwrap();
            let deg = r.gen_range(2..=6);
            let z = admissible_sample(&pde, deg, &mut r).unwrap();
            let (v, f) = fundamental_pair(&mut r, m, &z);
            ensure(maps.g12_operator(m).apply(&f).unwrap() == v, format!("{} z", preset.name()))?;
            let vs = StateFunction::new(v.x.clone(), z.derivative(Var::S));
            ensure(maps.g34_operator(m).apply(&f).unwrap() == vs, format!("{} z_s", preset.name()))?;
        }
    }
    Ok("50 samples per boundary preset, exact".into())
}

fn lifted_dynamics() -> Outcome {
    let mut r = rng(0xa3);
    for name in FIXTURES {
        let sys = system(name);
        let maps = build_fundamental_maps(&sys.pde).unwrap();
        let lifted = lift_dynamics(&sys, &maps).unwrap();
        for _ in 0..20 {
            let deg = r.gen_range(2..=6);
            let z = admissible_sample(&sys.pde, deg, &mut r).unwrap();
            let (v, f) = fundamental_pair(&mut r, sys.n_o(), &z);
            ensure(lifted.apply(&f).unwrap() == direct_dynamics(&sys, &v).unwrap(), name)?;
        }
    }
    Ok(format!("20 samples on each of {} fixtures, exact", FIXTURES.len()))
}

fn positivity() -> Outcome {
    let mut r = rng(0xa4);
    let mut worst = f64::INFINITY;
    for d in 0..=2u32 {
        for _ in 0..100 {
            let (n, n_o) = (r.gen_range(1..=2), r.gen_range(0..=1));
            let iv = random_interval(&mut r);
            let basis = MonomialBasis::new(n, Some(d), d);
            let size = n_o + n * (basis.q1() + 2 * basis.q2());
            let u: Vec<Vec<Scalar>> = (0..size).map(|_| (0..size).map(|_| random_scalar(&mut r)).collect()).collect();
            let t: Vec<Vec<Scalar>> = (0..size)
                .map(|i| {
                    (0..size).map(|j| (0..size).fold(Scalar::zero(), |acc, k| acc + &u[k][i] * &u[k][j])).collect()
                })
                .collect();
            let phi = phi_parametrize(&GramCandidate::from_dense(basis, n_o, &t), &iv).unwrap();
            let deg = r.gen_range(1..=4);
            let v = random_state(&mut r, (n_o, n), deg);
            let q = inner_product(&v, &phi, &v).unwrap();
            worst = worst.min(piestab_core::polyalg::to_f64(&q));
            ensure(q >= Scalar::zero(), format!("negative form at degree {d}"))?;
        }
    }
    Ok(format!("100 samples at each degree 0, 1, 2; smallest form {worst:.3e}"))
}

fn norm_equivalence() -> Outcome {
    let mut r = rng(0xa5);
    let mut count = 0;
    for preset in BoundaryPreset::ALL {
        for _ in 0..20 {
            let (n, n_o) = (r.gen_range(1..=2), r.gen_range(0..=2));
            let pde = preset_pde(preset, n, &mut r);
            let maps = build_fundamental_maps(&pde).unwrap();
            let op = norm_equivalence_operator(&maps, n_o).unwrap();
            let deg = r.gen_range(2..=6);
            let z = admissible_sample(&pde, deg, &mut r).unwrap();
            let (v, f) = fundamental_pair(&mut r, n_o, &z);
            ensure(inner_product(&f, &op, &f).unwrap() == v.norm_sq(&pde.interval).unwrap(), preset.name())?;
            count += 1;
        }
    }
    Ok(format!("{count} samples, exact"))
}

fn simulator() -> Outcome {
    let stable = simulate(&system_at("reaction_diffusion_dirichlet", 5.0), &SimConfig::default()).unwrap();
    let unstable = simulate(&system_at("reaction_diffusion_dirichlet", 11.0), &SimConfig::default()).unwrap();
    let heat = semidiscretize(&from_json(PURE_HEAT), 64).unwrap().leading_eigenvalue();
    let (rs, ru) = (stable.summary.energy_ratio, unstable.summary.energy_ratio);
    ensure(rs < 1e-2, format!("lambda=5 ratio {rs:.3e}"))?;
    ensure(ru > 1e2, format!("lambda=11 ratio {ru:.3e}"))?;
    let rel = (heat + PI * PI).abs() / (PI * PI);
    ensure(rel < 0.02, format!("heat eigenvalue {heat:.4} off by {:.2}%", 100.0 * rel))?;
    Ok(format!("ratios {rs:.2e} and {ru:.2e}; heat eigenvalue {heat:.4} ({:.3}% from -pi^2)", 100.0 * rel))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("piestab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for name in FIXTURES {
        let dumps: Vec<Vec<u8>> = (0..2)
            .map(|k| {
                let path = dir.join(format!("{name}-{k}.sdpa"));
                let outputs = Outputs { dump_sdp: Some(path.clone()), ..Default::default() };
                analyze(&fixture(name), &AnalysisConfig::default(), &outputs).unwrap();
                std::fs::read(&path).unwrap()
            })
            .collect();
        ensure(!dumps[0].is_empty() && dumps[0] == dumps[1], format!("{name}: dumps differ"))?;
        sizes.push(dumps[0].len());
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("byte-identical dumps on {} fixtures ({sizes:?} bytes)", FIXTURES.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("heat-equation actuator certified", heat_actuator),
        ("Dirichlet reaction-diffusion threshold", dirichlet_threshold),
        ("Neumann reaction-diffusion threshold", neumann_threshold),
        ("operator algebra identities", operator_algebra),
        ("reconstruction from second derivative", reconstruction),
        ("lifted dynamics match direct evaluation", lifted_dynamics),
        ("Gram parametrization positivity", positivity),
        ("norm equivalence", norm_equivalence),
        ("simulator cross-check", simulator),
        ("SDP dump determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS  {title}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {title}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
