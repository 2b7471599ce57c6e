use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnalysisConfig, AnalysisError};
use crate::lmi::{
    gram_blocks, post_check, Certificate, MonomialBasis, PostCheck, StabilityVerdict, VerdictStatus, POST_CHECK_SAMPLES,
};
use crate::pi_operator::{OperatorDoc, PiOperator};
use crate::system_model::{build_fundamental_maps, lift_dynamics, CoupledSystem};

pub const CERTIFICATE_FORMAT: &str = "piestab.certificate/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub n: usize,
    pub d1: Option<u32>,
    pub d2: u32,
}

/// On-disk form of a Lyapunov certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub format: String,
    /// `Phi(T_lyap) + eps I` with decimal coefficients.
    pub operator: OperatorDoc,
    pub t_lyap: Vec<Vec<f64>>,
    pub basis: BasisDoc,
    pub n_o: usize,
    pub eps: f64,
    pub config: AnalysisConfig,
}

impl CertificateFile {
    pub fn new(cert: &Certificate, config: &AnalysisConfig) -> Self {
        CertificateFile {
            format: CERTIFICATE_FORMAT.to_string(),
            operator: cert.operator.to_doc(),
            t_lyap: cert.t_lyap.clone(),
            basis: BasisDoc { n: cert.basis.n(), d1: cert.basis.d1(), d2: cert.basis.d2() },
            n_o: cert.n_o,
            eps: cert.eps,
            config: config.clone(),
        }
    }

    pub fn certificate(&self) -> Result<Certificate, AnalysisError> {
        if self.format != CERTIFICATE_FORMAT {
            return Err(AnalysisError::Certificate(format!("unsupported format '{}'", self.format)));
        }
        let operator =
            PiOperator::<f64>::from_doc(&self.operator).map_err(|e| AnalysisError::Certificate(e.to_string()))?;
        let basis = MonomialBasis::new(self.basis.n, self.basis.d1, self.basis.d2);
        let size: usize = gram_blocks(self.n_o, &basis).iter().sum();
        if self.t_lyap.len() != size || self.t_lyap.iter().any(|r| r.len() != size) {
            return Err(AnalysisError::Certificate(format!("t_lyap must be {size} x {size}")));
        }
        Ok(Certificate { operator, t_lyap: self.t_lyap.clone(), basis, n_o: self.n_o, eps: self.eps })
    }
}

/// Write the certificate of a certified verdict as JSON.
pub fn export_certificate(
    verdict: &StabilityVerdict,
    config: &AnalysisConfig,
    path: &Path,
) -> Result<(), AnalysisError> {
    let cert = match (&verdict.status, &verdict.certificate) {
        (VerdictStatus::StableCertified, Some(c)) => c,
        (status, _) => {
            return Err(AnalysisError::Certificate(format!("nothing to export: verdict is {}", status.as_str())))
        }
    };
    let text = serde_json::to_string_pretty(&CertificateFile::new(cert, config)).expect("certificate serializes");
    std::fs::write(path, text).map_err(|e| AnalysisError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn load_certificate(path: &Path) -> Result<(Certificate, AnalysisConfig), AnalysisError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| AnalysisError::Io(format!("cannot read {}: {e}", path.display())))?;
    let file: CertificateFile =
        serde_json::from_str(&text).map_err(|e| AnalysisError::Certificate(format!("{}: {e}", path.display())))?;
    Ok((file.certificate()?, file.config))
}

/// Re-run the sampled positivity and derivative checks against a system.
pub fn check_certificate(cert: &Certificate, sys: &CoupledSystem, seed: u64) -> Result<PostCheck, AnalysisError> {
    if cert.n_o != sys.n_o() || cert.basis.n() != sys.n_p() {
        return Err(AnalysisError::Certificate("certificate dimensions do not match the system".into()));
    }
    let maps = build_fundamental_maps(&sys.pde)?;
    let dynamics = lift_dynamics(sys, &maps)?;
    Ok(post_check(cert, &dynamics, &maps, &sys.pde, POST_CHECK_SAMPLES, seed)?)
}
