use std::collections::BTreeMap;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};

use super::basis::svec_len;
use super::sdp::SdpProblem;

/// Input to a conic feasibility solver.
///
/// Decision vector `x` stacks the upper triangles (column-major, unscaled) of
/// symmetric blocks of the listed sizes. Constraints are `A x = b` with `A`
/// given as `(row, col, value)` triplets, plus every block PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicInput {
    pub psd_sizes: Vec<usize>,
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl ConicInput {
    pub fn from_problem(p: &SdpProblem) -> Self {
        let mut triplets = Vec::new();
        for (r, row) in p.rows.iter().enumerate() {
            for &(k, a) in &row.coeffs {
                triplets.push((r, k, a));
            }
        }
        ConicInput {
            psd_sizes: p.vars.iter().map(|v| v.size).collect(),
            triplets,
            rhs: p.rows.iter().map(|r| r.rhs).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.psd_sizes.iter().map(|&n| svec_len(n)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConicStatus {
    Feasible,
    Infeasible,
    Failed,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConicOutput {
    pub status: ConicStatus,
    /// Solver's own status name.
    pub raw_status: String,
    pub x: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: u32,
    pub solve_time: f64,
}

pub trait ConicSolver {
    fn name(&self) -> &str;
    fn solve(&self, input: &ConicInput) -> ConicOutput;
}

/// Interior-point adapter over Clarabel.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarabelSolver {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iter: u32,
    /// Seconds; `f64::INFINITY` for none.
    pub time_limit: f64,
    pub verbose: bool,
}

impl Default for ClarabelSolver {
    fn default() -> Self {
        ClarabelSolver { tol_feas: 1e-8, tol_gap: 1e-8, max_iter: 200, time_limit: f64::INFINITY, verbose: false }
    }
}

fn csc(m: usize, n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> CscMatrix<f64> {
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, j, v) in triplets {
        *merged.entry((j, i)).or_insert(0.0) += v;
    }
    merged.retain(|_, v| *v != 0.0);
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    for ((j, i), v) in merged {
        rows.push(i);
        cols.push(j);
        vals.push(v);
    }
    CscMatrix::new_from_triplets(m, n, rows, cols, vals)
}

fn failed(raw: String) -> ConicOutput {
    ConicOutput {
        status: ConicStatus::Failed,
        raw_status: raw,
        x: Vec::new(),
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        iterations: 0,
        solve_time: 0.0,
    }
}

impl ConicSolver for ClarabelSolver {
    fn name(&self) -> &str {
        "clarabel"
    }

    fn solve(&self, input: &ConicInput) -> ConicOutput {
        let n = input.num_vars();
        let m_eq = input.rhs.len();
        let mut triplets: Vec<(usize, usize, f64)> = input.triplets.clone();
        // PSD rows: -D x + s = 0 with s in the scaled triangle cone.
        let mut row = m_eq;
        let mut col = 0;
        let mut cones = Vec::new();
        if m_eq > 0 {
            cones.push(SupportedConeT::ZeroConeT(m_eq));
        }
        for &size in &input.psd_sizes {
            if size == 0 {
                continue;
            }
            for j in 0..size {
                for i in 0..=j {
                    let scale = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
                    triplets.push((row, col, -scale));
                    row += 1;
                    col += 1;
                }
            }
            cones.push(SupportedConeT::PSDTriangleConeT(size));
        }
        let mut b = input.rhs.clone();
        b.resize(row, 0.0);
        let a = csc(row, n, triplets);
        let p = CscMatrix::<f64>::zeros((n, n));
        let q = vec![0.0; n];

        let settings = match DefaultSettingsBuilder::default()
            .direct_solve_method("faer".into())
            .verbose(self.verbose)
            .tol_feas(self.tol_feas)
            .tol_gap_abs(self.tol_gap)
            .tol_gap_rel(self.tol_gap)
            .max_iter(self.max_iter)
            .time_limit(self.time_limit)
            .build()
        {
            Ok(s) => s,
            Err(e) => return failed(format!("settings: {e}")),
        };
        let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &cones, settings) {
            Ok(s) => s,
            Err(e) => return failed(format!("setup: {e}")),
        };
        solver.solve();

        let status = match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => ConicStatus::Feasible,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => ConicStatus::Infeasible,
            _ => ConicStatus::Failed,
        };
        ConicOutput {
            status,
            raw_status: format!("{:?}", solver.solution.status),
            x: solver.solution.x.clone(),
            primal_residual: solver.info.res_primal,
            dual_residual: solver.info.res_dual,
            iterations: solver.info.iterations,
            solve_time: solver.info.solve_time,
        }
    }
}
