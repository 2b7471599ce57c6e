//! Exponential stability certificates for linear PDE-ODE systems on an
//! interval, built from partial-integral operators with polynomial kernels
//! and checked by semidefinite programming.

pub mod analysis;
pub mod lmi;
pub mod pi_operator;
pub mod polyalg;
pub mod simulate;
pub mod system_model;

pub use analysis::{AnalysisConfig, AnalysisError, Report};
pub use lmi::{StabilityVerdict, VerdictStatus};
pub use pi_operator::{Interval, PiOperator, StateFunction};
pub use polyalg::{Poly, PolyMatrix, Scalar};
pub use system_model::{CoupledSystem, ProblemDoc};
