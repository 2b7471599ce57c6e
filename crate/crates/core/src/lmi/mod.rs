//! Positivity cone, Lyapunov derivative and the semidefinite feasibility
//! problem certifying exponential stability.

mod basis;
mod ipm;
mod lyapunov;
mod phi;
mod sdp;
mod solver;
mod verdict;

pub use basis::{gram_blocks, svec_index, svec_len, GramCandidate, MonomialBasis};
pub use ipm::InteriorPointSolver;
pub use lyapunov::{derivative_operator, lyapunov_candidate, norm_equivalence_operator};
pub use phi::phi_parametrize;
pub use sdp::{assemble_sdp, EqualityRow, NegDegrees, PsdVar, SdpOptions, SdpProblem};
pub use solver::{ClarabelSolver, ConicInput, ConicOutput, ConicSolver, ConicStatus};
pub use verdict::{
    post_check, solve, Certificate, Diagnostics, PostCheck, StabilityVerdict, VerdictStatus, POST_CHECK_SAMPLES,
};

use thiserror::Error;

use crate::pi_operator::PiError;
use crate::polyalg::PolyError;
use crate::system_model::ModelError;

#[derive(Debug, Error)]
pub enum LmiError {
    #[error(
        "degree deficiency: block {block} entry {entry:?} needs monomial {monomial} which the negativity basis cannot produce; raise the negativity degree"
    )]
    DegreeDeficiency { block: &'static str, entry: (usize, usize), monomial: String },
    #[error("invalid option: {0}")]
    Options(String),
    #[error(transparent)]
    Operator(#[from] PiError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
