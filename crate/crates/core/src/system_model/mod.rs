//! Coupled ODE/PDE systems: data model, validation, boundary elimination and
//! the lifted dynamics operator.

mod admissible;
mod lift;
mod maps;
mod problem;

pub use admissible::{admissible_sample, boundary_vector, random_poly, random_scalar};
pub use lift::{direct_dynamics, lift_dynamics};
pub use maps::{build_fundamental_maps, FundamentalMaps};
pub use problem::{BoundaryPreset, ProblemDoc};

use std::fmt;

use thiserror::Error;

use crate::pi_operator::{Interval, PiError};
use crate::polyalg::{linalg, PolyError, PolyMatrix, Var};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("problem file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Entry { path: String, source: PolyError },
    #[error("{path}: expected a {expected} matrix, found {found}")]
    Shape { path: String, expected: String, found: String },
    #[error("{0}")]
    Input(String),
    #[error("system failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("boundary conditions are ill-posed: Bc*Bd is singular")]
    IllPosed,
    #[error(transparent)]
    Operator(#[from] PiError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeModel {
    pub a: PolyMatrix,
    pub b: PolyMatrix,
    pub c: PolyMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeModel {
    pub interval: Interval,
    pub a0: PolyMatrix,
    pub a1: PolyMatrix,
    pub a2: PolyMatrix,
    pub b1: PolyMatrix,
    pub c1: PolyMatrix,
    pub ca: PolyMatrix,
    pub cb: PolyMatrix,
    pub bc: PolyMatrix,
}

impl PdeModel {
    pub fn n(&self) -> usize {
        self.a0.rows()
    }
}

/// Port sizes of the interconnection `[v; u] = L [w; y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct PortDims {
    pub m_o: usize,
    pub m_p: usize,
    pub p_o: usize,
    pub p_p: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interconnection {
    pub l: PolyMatrix,
    pub ports: PortDims,
}

impl Interconnection {
    pub fn l1(&self) -> PolyMatrix {
        self.l.block(0, 0, self.ports.m_o, self.ports.p_o)
    }
    pub fn l2(&self) -> PolyMatrix {
        self.l.block(0, self.ports.p_o, self.ports.m_o, self.ports.p_p)
    }
    pub fn l3(&self) -> PolyMatrix {
        self.l.block(self.ports.m_o, 0, self.ports.m_p, self.ports.p_o)
    }
    pub fn l4(&self) -> PolyMatrix {
        self.l.block(self.ports.m_o, self.ports.p_o, self.ports.m_p, self.ports.p_p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSystem {
    pub ode: OdeModel,
    pub pde: PdeModel,
    pub link: Interconnection,
}

impl CoupledSystem {
    pub fn n_o(&self) -> usize {
        self.ode.a.rows()
    }

    pub fn n_p(&self) -> usize {
        self.pde.n()
    }

    pub fn interval(&self) -> &Interval {
        &self.pde.interval
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, code: &'static str, message: impl Into<String>) {
        self.issues.push(ValidationIssue { code, message: message.into() });
    }

    pub fn into_result(self) -> Result<(), ModelError> {
        if self.passed() {
            Ok(())
        } else {
            Err(ModelError::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return writeln!(f, "ok");
        }
        for i in &self.issues {
            writeln!(f, "  [{}] {}", i.code, i.message)?;
        }
        Ok(())
    }
}

/// Check shapes, variable content, ranks and boundary well-posedness.
pub fn validate(sys: &CoupledSystem) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let n_o = sys.n_o();
    let n_p = sys.n_p();
    let PortDims { m_o, m_p, p_o, p_p } = sys.link.ports;

    let shapes: [(&str, &PolyMatrix, (usize, usize), bool); 12] = [
        ("A", &sys.ode.a, (n_o, n_o), true),
        ("B", &sys.ode.b, (n_o, m_o), true),
        ("C", &sys.ode.c, (p_o, n_o), true),
        ("A0", &sys.pde.a0, (n_p, n_p), false),
        ("A1", &sys.pde.a1, (n_p, n_p), false),
        ("A2", &sys.pde.a2, (n_p, n_p), false),
        ("B1", &sys.pde.b1, (n_p, m_p), false),
        ("C1", &sys.pde.c1, (p_p, 4 * n_p), true),
        ("Ca", &sys.pde.ca, (p_p, n_p), false),
        ("Cb", &sys.pde.cb, (p_p, n_p), false),
        ("Bc", &sys.pde.bc, (2 * n_p, 4 * n_p), true),
        ("L", &sys.link.l, (m_o + m_p, p_o + p_p), true),
    ];
    let mut shapes_ok = true;
    for (name, m, want, constant) in shapes {
        if m.dims() != want {
            shapes_ok = false;
            rep.push("shape", format!("{name} is {}x{}, expected {}x{}", m.rows(), m.cols(), want.0, want.1));
        }
        if constant && !m.is_constant() {
            rep.push("constant", format!("{name} must be a constant matrix"));
        } else if m.contains(Var::Eta) || m.contains(Var::Theta) {
            rep.push("variable", format!("{name} may depend on s only"));
        }
    }
    if !shapes_ok || !rep.passed() {
        return rep;
    }

    let bc = sys.pde.bc.constants().expect("checked constant");
    let rank_bc = linalg::rank(&bc);
    if rank_bc != 2 * n_p {
        rep.push("rank-bc", format!("Bc has rank {rank_bc}, needs full row rank {}", 2 * n_p));
    }
    let l = sys.link.l.constants().expect("checked constant");
    let rank_l = linalg::rank(&l);
    if rank_l != m_o + m_p {
        rep.push("rank-l", format!("L has rank {rank_l}, needs full row rank {}", m_o + m_p));
    }
    let bd = maps::bd_matrix(n_p, &sys.pde.interval);
    let bcbd = linalg::matmul(&bc, &bd, 4 * n_p, 2 * n_p);
    if linalg::inverse(&bcbd).is_none() {
        rep.push("ill-posed", "Bc*Bd is singular, boundary conditions do not determine z from z_ss");
    }
    rep
}
