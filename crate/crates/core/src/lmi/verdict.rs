use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::basis::{GramCandidate, MonomialBasis};
use super::lyapunov::{derivative_operator, lyapunov_candidate};
use super::phi::phi_parametrize;
use super::sdp::SdpProblem;
use super::solver::{ConicInput, ConicSolver, ConicStatus};
use super::LmiError;
use crate::pi_operator::{inner_product, PiOperator, StateFunction};
use crate::polyalg::{to_f64, PolyMatrix, Scalar, Var};
use crate::system_model::{admissible_sample, random_scalar, FundamentalMaps, PdeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    StableCertified,
    UnknownInfeasible,
    SolverError,
}

impl VerdictStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictStatus::StableCertified => "stable-certified",
            VerdictStatus::UnknownInfeasible => "unknown-infeasible",
            VerdictStatus::SolverError => "solver-error",
        }
    }
}

/// Numeric Lyapunov operator `Phi(T_lyap) + eps I` and the data that built it.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub operator: PiOperator<f64>,
    pub t_lyap: Vec<Vec<f64>>,
    pub basis: MonomialBasis,
    pub n_o: usize,
    pub eps: f64,
}

impl Certificate {
    pub fn gram(&self) -> GramCandidate<f64> {
        GramCandidate::from_dense(self.basis.clone(), self.n_o, &self.t_lyap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostCheck {
    pub samples: usize,
    /// Smallest `<v, Phi(T) v> / |v|^2` seen.
    pub min_positivity: f64,
    /// Largest `<w, D w> / |(x, z)|^2` seen.
    pub max_derivative: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub solver: String,
    pub raw_status: String,
    pub iterations: u32,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub equality_residual: f64,
    pub solve_time: f64,
    pub degrees: (u32, u32),
    pub neg_degrees: (Option<u32>, u32),
    pub eps_pos: f64,
    pub eps_neg: f64,
    pub rows: usize,
    pub vars: usize,
    pub post_check: Option<PostCheck>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub status: VerdictStatus,
    pub certificate: Option<Certificate>,
    pub diagnostics: Diagnostics,
}

pub const POST_CHECK_SAMPLES: usize = 200;
const POSITIVITY_SLACK: f64 = 1e-6;

/// Sample `(x, z)` admissible states and check the certificate's two inequalities.
pub fn post_check(
    cert: &Certificate,
    dynamics: &PiOperator,
    maps: &FundamentalMaps,
    pde: &PdeModel,
    samples: usize,
    seed: u64,
) -> Result<PostCheck, LmiError> {
    let iv = dynamics.interval().clone();
    let phi = phi_parametrize(&cert.gram(), &iv)?;
    let eps = crate::polyalg::from_f64(cert.eps).unwrap_or_else(|| Scalar::from_integer(0.into()));
    let cand = lyapunov_candidate(&cert.gram(), &eps, &iv)?;
    let deriv = derivative_operator(&cand, dynamics, maps)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let n = pde.n();
    let mut min_pos = f64::INFINITY;
    let mut max_der = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x: Vec<Scalar> = (0..cert.n_o).map(|_| random_scalar(&mut rng)).collect();
        let z = if n == 0 {
            PolyMatrix::zeros(0, 1)
        } else {
            let degree = rng.gen_range(2..=6);
            admissible_sample(pde, degree, &mut rng)?
        };
        let v = StateFunction::new(x.clone(), z.clone()).to_f64();
        let w = StateFunction::new(x, z.derivative(Var::S).derivative(Var::S)).to_f64();
        let norm = v.norm_sq(&iv)?;
        if norm <= 0.0 {
            continue;
        }
        min_pos = min_pos.min(inner_product(&v, &phi, &v)? / norm);
        max_der = max_der.max(inner_product(&w, &deriv, &w)? / norm);
    }
    let passed = min_pos >= -POSITIVITY_SLACK && max_der <= cert.eps / 2.0;
    Ok(PostCheck { samples, min_positivity: min_pos, max_derivative: max_der, passed })
}

/// Run the conic solver and turn its answer into a verdict.
pub fn solve(problem: &SdpProblem, solver: &dyn ConicSolver) -> Result<StabilityVerdict, LmiError> {
    let input = ConicInput::from_problem(problem);
    let out = solver.solve(&input);
    let mut diagnostics = Diagnostics {
        solver: solver.name().to_string(),
        raw_status: out.raw_status.clone(),
        iterations: out.iterations,
        primal_residual: out.primal_residual,
        dual_residual: out.dual_residual,
        equality_residual: if out.x.len() == problem.num_vars() { problem.equality_residual(&out.x) } else { f64::NAN },
        solve_time: out.solve_time,
        degrees: (problem.lyap_basis.d1().unwrap_or(0), problem.lyap_basis.d2()),
        neg_degrees: (problem.neg_basis.d1(), problem.neg_basis.d2()),
        eps_pos: to_f64(&problem.eps_pos),
        eps_neg: to_f64(&problem.eps_neg),
        rows: problem.rows.len(),
        vars: problem.num_vars(),
        post_check: None,
        message: None,
    };
    let status = match out.status {
        ConicStatus::Infeasible => VerdictStatus::UnknownInfeasible,
        ConicStatus::Failed => VerdictStatus::SolverError,
        ConicStatus::Feasible => VerdictStatus::StableCertified,
    };
    if status != VerdictStatus::StableCertified {
        return Ok(StabilityVerdict { status, certificate: None, diagnostics });
    }

    let t_lyap = problem.unpack(0, &out.x);
    let eps = to_f64(&problem.eps_pos);
    let gram = GramCandidate::from_dense(problem.lyap_basis.clone(), problem.n_o, &t_lyap);
    let operator = lyapunov_candidate(&gram, &problem.eps_pos, problem.dynamics.interval())?;
    let cert = Certificate { operator, t_lyap, basis: problem.lyap_basis.clone(), n_o: problem.n_o, eps };
    let check = post_check(&cert, &problem.dynamics, &problem.maps, &problem.pde, POST_CHECK_SAMPLES, 0x5eed)?;
    let passed = check.passed;
    diagnostics.post_check = Some(check);
    if !passed {
        diagnostics.message = Some("solver reported feasible but the certificate failed the sampled post-check".into());
        return Ok(StabilityVerdict { status: VerdictStatus::SolverError, certificate: None, diagnostics });
    }
    Ok(StabilityVerdict { status, certificate: Some(cert), diagnostics })
}
