//! End-to-end pipeline: read a problem file, assemble and solve the
//! feasibility problem, report, bisect on a parameter, export certificates.

mod certificate;
mod report;

pub use certificate::{check_certificate, export_certificate, load_certificate, CertificateFile, CERTIFICATE_FORMAT};
pub use report::{Attempt, Probe, Report, SweepOutcome, REPORT_FORMAT};

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::lmi::{
    assemble_sdp, solve, ClarabelSolver, ConicSolver, InteriorPointSolver, LmiError, NegDegrees, SdpOptions,
    StabilityVerdict, VerdictStatus,
};
use crate::polyalg::{from_f64, Params};
use crate::system_model::{validate, CoupledSystem, ModelError, ProblemDoc};

pub const DEFAULT_MAX_DEGREE: u32 = 6;
pub const DEFAULT_SWEEP_TOL: f64 = 0.05;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lmi(#[from] LmiError),
    #[error("{0}")]
    Io(String),
    #[error("certificate: {0}")]
    Certificate(String),
    #[error("feasibility is not monotone in '{param}': certified at {certified} but not at {rejected} (lower value)")]
    NonMonotone { param: String, certified: f64, rejected: f64 },
}

impl AnalysisError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            AnalysisError::Lmi(LmiError::DegreeDeficiency { .. } | LmiError::Options(_)) => 3,
            AnalysisError::Lmi(_) => 4,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    #[default]
    InteriorPoint,
    Clarabel,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepSpec {
    pub param: String,
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnalysisConfig {
    pub d1: u32,
    pub d2: u32,
    pub eps_pos: f64,
    pub eps_neg: f64,
    pub auto_degree: bool,
    pub max_degree: u32,
    pub solver: SolverChoice,
    /// Interior-point convergence tolerance.
    pub solver_tol: f64,
    /// Accepted equality residual relative to the largest right-hand side.
    pub feas_tol: f64,
    /// Extra bivariate degree on the negativity basis.
    pub neg_margin: u32,
    /// Fixed negativity-basis degrees, replacing the covering rule.
    pub neg_degrees: Option<(u32, u32)>,
    /// Seconds per solve; `None` for no limit.
    pub timeout: Option<f64>,
    /// Parameter values replacing those declared in the file.
    #[serde(skip)]
    pub overrides: Params,
    pub sweep: Option<SweepSpec>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            d1: 1,
            d2: 1,
            eps_pos: 1e-4,
            eps_neg: 1e-4,
            auto_degree: false,
            max_degree: DEFAULT_MAX_DEGREE,
            solver: SolverChoice::default(),
            solver_tol: 1e-8,
            feas_tol: 1e-3,
            neg_margin: 0,
            neg_degrees: None,
            timeout: None,
            overrides: Params::new(),
            sweep: None,
        }
    }
}

impl AnalysisConfig {
    pub fn with_degrees(mut self, d1: u32, d2: u32) -> Self {
        self.d1 = d1;
        self.d2 = d2;
        self
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let positive = |x: f64, what: &str| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(AnalysisError::Config(format!("{what} must be positive, got {x}")))
            }
        };
        positive(self.eps_pos, "eps_pos")?;
        positive(self.eps_neg, "eps_neg")?;
        positive(self.solver_tol, "solver tolerance")?;
        positive(self.feas_tol, "feasibility tolerance")?;
        if let Some(t) = self.timeout {
            positive(t, "timeout")?;
        }
        if self.auto_degree && self.max_degree < self.d1.max(self.d2) {
            return Err(AnalysisError::Config(format!(
                "max degree {} is below the starting degrees ({}, {})",
                self.max_degree, self.d1, self.d2
            )));
        }
        if let Some(s) = &self.sweep {
            positive(s.tol, "sweep tolerance")?;
            if !(s.lower.is_finite() && s.upper.is_finite() && s.lower < s.upper) {
                return Err(AnalysisError::Config(format!("sweep range {},{} is not ordered", s.lower, s.upper)));
            }
        }
        Ok(())
    }

    pub fn solver(&self) -> Box<dyn ConicSolver> {
        let limit = self.timeout.unwrap_or(f64::INFINITY);
        match self.solver {
            SolverChoice::InteriorPoint => Box::new(InteriorPointSolver {
                tol: self.solver_tol,
                time_limit: limit,
                feas_tol: self.feas_tol,
                ..Default::default()
            }),
            SolverChoice::Clarabel => Box::new(ClarabelSolver {
                tol_feas: self.solver_tol,
                tol_gap: self.solver_tol,
                time_limit: limit,
                ..Default::default()
            }),
        }
    }

    fn sdp_options(&self, d1: u32, d2: u32) -> SdpOptions {
        let neg = match self.neg_degrees {
            Some((e1, e2)) => NegDegrees::Fixed { d1: Some(e1), d2: e2 },
            None => NegDegrees::Covering { margin: self.neg_margin },
        };
        SdpOptions { d1, d2, eps_pos: self.eps_pos, eps_neg: self.eps_neg, neg }
    }
}

/// Extra outputs requested alongside an analysis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    /// SDPA dump of the last problem attempted.
    pub dump_sdp: Option<PathBuf>,
    /// Written only when the verdict is certified.
    pub certificate: Option<PathBuf>,
}

/// Result of `analyze`: the report plus the final verdict (with certificate when certified).
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: Report,
    pub verdict: StabilityVerdict,
    pub system: CoupledSystem,
}

pub fn load_system(path: &Path, overrides: &Params) -> Result<CoupledSystem, AnalysisError> {
    let doc = ProblemDoc::from_path(path)?;
    let sys = doc.build(overrides)?;
    validate(&sys).into_result()?;
    Ok(sys)
}

/// Analyze a problem file.
pub fn analyze(path: &Path, config: &AnalysisConfig, outputs: &Outputs) -> Result<Analysis, AnalysisError> {
    config.validate()?;
    let sys = load_system(path, &config.overrides)?;
    let mut analysis = analyze_system(sys, config, outputs.dump_sdp.as_deref())?;
    analysis.report.file = Some(path.display().to_string());
    if let Some(cert) = &outputs.certificate {
        if analysis.verdict.status == VerdictStatus::StableCertified {
            export_certificate(&analysis.verdict, config, cert)?;
            analysis.report.certificate = Some(cert.display().to_string());
        }
    }
    Ok(analysis)
}

/// Analyze an already-built system, escalating degrees when configured.
pub fn analyze_system(
    sys: CoupledSystem,
    config: &AnalysisConfig,
    dump_sdp: Option<&Path>,
) -> Result<Analysis, AnalysisError> {
    config.validate()?;
    let start = Instant::now();
    let solver = config.solver();
    let (mut d1, mut d2) = (config.d1, config.d2);
    let mut attempts = Vec::new();
    loop {
        let t0 = Instant::now();
        let problem = assemble_sdp(&sys, &config.sdp_options(d1, d2))?;
        let assembly_seconds = t0.elapsed().as_secs_f64();
        if let Some(path) = dump_sdp {
            std::fs::write(path, problem.to_sdpa())
                .map_err(|e| AnalysisError::Io(format!("cannot write {}: {e}", path.display())))?;
        }
        let t1 = Instant::now();
        let verdict = solve(&problem, solver.as_ref())?;
        attempts.push(Attempt {
            degrees: (d1, d2),
            status: verdict.status,
            assembly_seconds,
            solve_seconds: t1.elapsed().as_secs_f64(),
            diagnostics: verdict.diagnostics.clone(),
        });
        let escalate =
            verdict.status == VerdictStatus::UnknownInfeasible && config.auto_degree && d1.max(d2) < config.max_degree;
        if !escalate {
            let report = Report::analysis(verdict.status, attempts, start.elapsed().as_secs_f64());
            return Ok(Analysis { report, verdict, system: sys });
        }
        d1 += 1;
        d2 += 1;
    }
}

/// Bisection for the largest parameter value certified stable, assuming
/// certification is monotone (holds below a threshold).
pub fn sweep(path: &Path, config: &AnalysisConfig) -> Result<Report, AnalysisError> {
    config.validate()?;
    let sweep_spec =
        config.sweep.clone().ok_or_else(|| AnalysisError::Config("sweep needs a parameter and range".into()))?;
    let doc = ProblemDoc::from_path(path)?;
    if !doc.params()?.contains_key(&sweep_spec.param) {
        return Err(AnalysisError::Model(ModelError::Input(format!(
            "parameter '{}' is not declared in the problem file",
            sweep_spec.param
        ))));
    }
    let start = Instant::now();
    let mut history: Vec<Probe> = Vec::new();
    let mut probe = |value: f64| -> Result<bool, AnalysisError> {
        let mut overrides = config.overrides.clone();
        let exact = from_f64(value).ok_or_else(|| AnalysisError::Config(format!("bad parameter value {value}")))?;
        overrides.insert(sweep_spec.param.clone(), exact);
        let sys = doc.build(&overrides)?;
        validate(&sys).into_result()?;
        let a = analyze_system(sys, config, None)?;
        let degrees = a.report.attempts.last().map_or((config.d1, config.d2), |t| t.degrees);
        history.push(Probe { value, status: a.verdict.status, degrees });
        Ok(a.verdict.status == VerdictStatus::StableCertified)
    };

    let (mut lo, mut hi) = (sweep_spec.lower, sweep_spec.upper);
    let threshold = if !probe(lo)? {
        if probe(hi)? {
            return Err(AnalysisError::NonMonotone { param: sweep_spec.param, certified: hi, rejected: lo });
        }
        None
    } else if probe(hi)? {
        Some(hi)
    } else {
        while hi - lo > sweep_spec.tol {
            let mid = 0.5 * (lo + hi);
            if probe(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    };
    check_monotone(&sweep_spec.param, &history)?;
    let outcome = SweepOutcome {
        param: sweep_spec.param.clone(),
        lower: sweep_spec.lower,
        upper: sweep_spec.upper,
        tol: sweep_spec.tol,
        threshold,
        history,
    };
    Ok(Report::sweep(path, outcome, start.elapsed().as_secs_f64()))
}

fn check_monotone(param: &str, history: &[Probe]) -> Result<(), AnalysisError> {
    let certified = |p: &&Probe| p.status == VerdictStatus::StableCertified;
    for ok in history.iter().filter(certified) {
        if let Some(bad) = history.iter().find(|p| !certified(p) && p.value < ok.value) {
            return Err(AnalysisError::NonMonotone {
                param: param.to_string(),
                certified: ok.value,
                rejected: bad.value,
            });
        }
    }
    Ok(())
}

/// Exit code for a finished analysis.
pub fn exit_code(status: VerdictStatus) -> i32 {
    match status {
        VerdictStatus::StableCertified => 0,
        VerdictStatus::UnknownInfeasible => 2,
        VerdictStatus::SolverError => 4,
    }
}
