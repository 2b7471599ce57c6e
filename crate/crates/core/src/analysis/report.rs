use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::exit_code;
use crate::lmi::{Diagnostics, VerdictStatus};

pub const REPORT_FORMAT: &str = "piestab.report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub degrees: (u32, u32),
    pub status: VerdictStatus,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub value: f64,
    pub status: VerdictStatus,
    pub degrees: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub param: String,
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
    /// Largest value certified; `None` when even the lower end fails.
    pub threshold: Option<f64>,
    pub history: Vec<Probe>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub kind: String,
    pub file: Option<String>,
    pub verdict: VerdictStatus,
    pub exit_code: i32,
    pub total_seconds: f64,
    pub attempts: Vec<Attempt>,
    pub certificate: Option<String>,
    pub sweep: Option<SweepOutcome>,
}

impl Report {
    pub(super) fn analysis(verdict: VerdictStatus, attempts: Vec<Attempt>, total_seconds: f64) -> Self {
        Report {
            format: REPORT_FORMAT.to_string(),
            kind: "analyze".to_string(),
            file: None,
            verdict,
            exit_code: exit_code(verdict),
            total_seconds,
            attempts,
            certificate: None,
            sweep: None,
        }
    }

    pub(super) fn sweep(path: &Path, outcome: SweepOutcome, total_seconds: f64) -> Self {
        let verdict =
            if outcome.threshold.is_some() { VerdictStatus::StableCertified } else { VerdictStatus::UnknownInfeasible };
        Report {
            format: REPORT_FORMAT.to_string(),
            kind: "sweep".to_string(),
            file: Some(path.display().to_string()),
            verdict,
            exit_code: exit_code(verdict),
            total_seconds,
            attempts: Vec::new(),
            certificate: None,
            sweep: Some(outcome),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            writeln!(f, "file:     {file}")?;
        }
        for a in &self.attempts {
            let d = &a.diagnostics;
            writeln!(
                f,
                "attempt:  degrees ({}, {}) -> {} [{} rows, {} vars, assembly {:.2}s, solve {:.2}s]",
                a.degrees.0,
                a.degrees.1,
                a.status.as_str(),
                d.rows,
                d.vars,
                a.assembly_seconds,
                a.solve_seconds
            )?;
            writeln!(f, "          {}: {}", d.solver, d.raw_status)?;
            if let Some(pc) = &d.post_check {
                writeln!(
                    f,
                    "          post-check over {} samples: min positivity {:.3e}, max derivative {:.3e}",
                    pc.samples, pc.min_positivity, pc.max_derivative
                )?;
            }
            if let Some(msg) = &d.message {
                writeln!(f, "          {msg}")?;
            }
        }
        if let Some(s) = &self.sweep {
            for p in &s.history {
                writeln!(f, "probe:    {} = {} -> {}", s.param, p.value, p.status.as_str())?;
            }
            match s.threshold {
                Some(t) => writeln!(f, "threshold: {} certified up to {t} (tolerance {})", s.param, s.tol)?,
                None => writeln!(f, "threshold: none certified in [{}, {}]", s.lower, s.upper)?,
            }
        }
        if let Some(c) = &self.certificate {
            writeln!(f, "certificate: {c}")?;
        }
        write!(f, "verdict:  {} ({:.2}s)", self.verdict.as_str(), self.total_seconds)
    }
}
