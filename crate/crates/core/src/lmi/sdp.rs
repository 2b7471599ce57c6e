use std::fmt::Write as _;
use std::io;

use super::basis::{svec_len, GramCandidate, MonomialBasis};
use super::lyapunov::{derivative_operator, lyapunov_candidate, norm_equivalence_operator};
use super::phi::phi_parametrize;
use super::LmiError;
use crate::pi_operator::PiOperator;
use crate::polyalg::{from_f64, parse_poly, to_f64, Affine, Coeff, Params, PolyMatrix, Scalar};
use crate::system_model::{build_fundamental_maps, lift_dynamics, CoupledSystem, FundamentalMaps, PdeModel};

/// How the basis of the negativity Gram matrix is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegDegrees {
    /// Smallest degrees whose cone reaches every monomial of the target,
    /// plus `margin` on the bivariate degree.
    Covering {
        margin: u32,
    },
    /// `d + (max degree of the dynamics kernels) + 1` for both degrees.
    DynamicsBound,
    Fixed {
        d1: Option<u32>,
        d2: u32,
    },
}

impl Default for NegDegrees {
    fn default() -> Self {
        NegDegrees::Covering { margin: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpOptions {
    pub d1: u32,
    pub d2: u32,
    pub eps_pos: f64,
    pub eps_neg: f64,
    pub neg: NegDegrees,
}

impl SdpOptions {
    pub fn new(d1: u32, d2: u32) -> Self {
        SdpOptions { d1, d2, eps_pos: 1e-4, eps_neg: 1e-4, neg: NegDegrees::default() }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_pos = eps;
        self.eps_neg = eps;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsdVar {
    pub name: &'static str,
    pub size: usize,
    /// First column of this block in the stacked variable vector.
    pub offset: usize,
}

impl PsdVar {
    pub fn len(&self) -> usize {
        svec_len(self.size)
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }
}

/// `sum_k coeffs[k].1 * x[coeffs[k].0] = rhs` over upper-triangular entries
/// of the stacked PSD variables (unscaled).
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Feasibility problem plus everything needed to rebuild and check a certificate.

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub vars: Vec<PsdVar>,
    pub rows: Vec<EqualityRow>,
    pub lyap_basis: MonomialBasis,
    pub neg_basis: MonomialBasis,
    pub n_o: usize,
    pub eps_pos: Scalar,
    pub eps_neg: Scalar,
    pub dynamics: PiOperator,
    pub maps: FundamentalMaps,
    pub pde: PdeModel,
    /// Largest bivariate degree among the kernels being matched.
    pub target_degree: u32,
}

fn positive_scalar(x: f64, what: &str) -> Result<Scalar, LmiError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(LmiError::Options(format!("{what} must be positive and finite, got {x}")));
    }
    let exact = parse_poly(&x.to_string(), &Params::new()).ok().map(|p| p.constant_term());
    Ok(exact.or_else(|| from_f64(x)).expect("finite"))
}

fn block_degree<C: Coeff>(m: &PolyMatrix<C>) -> u32 {
    m.total_degree()
}

fn choose_neg_basis(opts: &SdpOptions, n: usize, target: &PiOperator<Affine>, dynamics: &PiOperator) -> MonomialBasis {
    match opts.neg {
        NegDegrees::Fixed { d1, d2 } => MonomialBasis::new(n, d1, d2),
        NegDegrees::DynamicsBound => {
            let k = [&dynamics.q1, &dynamics.q2, &dynamics.s, &dynamics.r1, &dynamics.r2]
                .iter()
                .map(|m| block_degree(m))
                .max()
                .unwrap_or(0);
            let d1 = if target.s.is_zero() { None } else { Some(opts.d1 + k + 1) };
            MonomialBasis::new(n, d1, opts.d2 + k + 1)
        }
        NegDegrees::Covering { margin } => {
            let deg_r = block_degree(&target.r1).max(block_degree(&target.r2));
            let deg_q = block_degree(&target.q1);
            let deg_s = block_degree(&target.s);
            let d2 = deg_r.saturating_sub(1).div_ceil(2);
            let d2 = d2.max(deg_q.saturating_sub(1)) + margin;
            let d1 = if target.s.is_zero() { None } else { Some(deg_s.div_ceil(2).max(deg_q)) };
            MonomialBasis::new(n, d1, d2)
        }
    }
}

/// Build the coefficient-matching feasibility problem
/// `Phi(T_neg) = -D(T_lyap) - eps_neg * N`, `T_lyap, T_neg >= 0`.
pub fn assemble_sdp(sys: &CoupledSystem, opts: &SdpOptions) -> Result<SdpProblem, LmiError> {
    let eps_pos = positive_scalar(opts.eps_pos, "eps_pos")?;
    let eps_neg = positive_scalar(opts.eps_neg, "eps_neg")?;
    let n_o = sys.n_o();
    let n = sys.n_p();
    let iv = sys.interval().clone();
    let maps = build_fundamental_maps(&sys.pde)?;
    let dynamics = lift_dynamics(sys, &maps)?;

    let lyap_basis = MonomialBasis::new(n, Some(opts.d1), opts.d2);
    let t_lyap = GramCandidate::symbolic(lyap_basis.clone(), n_o, 0);
    let lyap_size = t_lyap.size();
    let cand = lyapunov_candidate(&t_lyap, &eps_pos, &iv)?;
    let deriv = derivative_operator(&cand, &dynamics, &maps)?;
    let norm = norm_equivalence_operator(&maps, n_o)?;
    let target = deriv.neg().sub(&norm.scale(&eps_neg).map_coeffs(Affine::from_scalar))?;

    let neg_basis = choose_neg_basis(opts, n, &target, &dynamics);
    let t_neg = GramCandidate::symbolic(neg_basis.clone(), n_o, svec_len(lyap_size));
    let neg_size = t_neg.size();
    let diff = phi_parametrize(&t_neg, &iv)?.sub(&target)?;

    let first_neg = svec_len(lyap_size);
    let mut rows = Vec::new();
    let blocks: [(&'static str, &PolyMatrix<Affine>, bool); 4] =
        [("P", &diff.p, true), ("Q1", &diff.q1, false), ("S", &diff.s, true), ("R1", &diff.r1, false)];
    for (name, m, symmetric) in blocks {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if symmetric && j < i {
                    continue;
                }
                for (mono, c) in m.get(i, j).terms() {
                    if c.is_zero_coeff() {
                        continue;
                    }
                    if !c.terms().iter().any(|(k, _)| *k >= first_neg) {
                        return Err(LmiError::DegreeDeficiency {
                            block: name,
                            entry: (i, j),
                            monomial: mono.to_string(),
                        });
                    }
                    let coeffs = c.terms().iter().map(|(k, a)| (*k, to_f64(a))).collect();
                    rows.push(EqualityRow { coeffs, rhs: -to_f64(&c.constant) });
                }
            }
        }
    }

    let target_degree = block_degree(&target.r1).max(block_degree(&target.q1));
    let vars = vec![
        PsdVar { name: "T_lyap", size: lyap_size, offset: 0 },
        PsdVar { name: "T_neg", size: neg_size, offset: first_neg },
    ];
    Ok(SdpProblem {
        vars,
        rows,
        lyap_basis,
        neg_basis,
        n_o,
        eps_pos,
        eps_neg,
        dynamics,
        maps,
        pde: sys.pde.clone(),
        target_degree,
    })
}

fn svec_position(mut local: usize) -> (usize, usize) {
    let mut j = 0;
    while local > j {
        local -= j + 1;
        j += 1;
    }
    (local, j)
}

impl SdpProblem {
    pub fn num_vars(&self) -> usize {
        self.vars.iter().map(PsdVar::len).sum()
    }

    /// Which PSD block a stacked index belongs to, and its `(i, j)`, `i <= j`.
    pub fn locate(&self, k: usize) -> (usize, usize, usize) {
        let blk = self.vars.iter().rposition(|v| v.offset <= k).expect("index in range");
        let (i, j) = svec_position(k - self.vars[blk].offset);
        (blk, i, j)
    }

    /// Sparse SDPA text. The problem is the SDPA dual form:
    /// find `Y >= 0` with `<F_k, Y> = c_k`.
    pub fn to_sdpa(&self) -> String {
        let mut out = String::new();
        let blocks: Vec<&PsdVar> = self.vars.iter().filter(|v| !v.is_empty()).collect();
        let _ = writeln!(out, "* feasibility: find Y >= 0 with <F_k, Y> = c_k");
        let _ = writeln!(out, "{}", self.rows.len());
        let _ = writeln!(out, "{}", blocks.len());
        let sizes: Vec<String> = blocks.iter().map(|v| v.size.to_string()).collect();
        let _ = writeln!(out, "{}", sizes.join(" "));
        let rhs: Vec<String> = self.rows.iter().map(|r| format!("{:e}", r.rhs)).collect();
        let _ = writeln!(out, "{}", rhs.join(" "));
        for (k, row) in self.rows.iter().enumerate() {
            for &(idx, a) in &row.coeffs {
                let (blk, i, j) = self.locate(idx);
                let blk_no = blocks.iter().position(|v| std::ptr::eq(*v, &self.vars[blk])).expect("nonempty block") + 1;
                let v = if i == j { a } else { a / 2.0 };
                let _ = writeln!(out, "{} {} {} {} {:e}", k + 1, blk_no, i + 1, j + 1, v);
            }
        }
        out
    }

    pub fn write_sdpa<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_sdpa().as_bytes())
    }

    /// Largest absolute residual of the equalities at `x`.
    pub fn equality_residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.coeffs.iter().map(|(k, a)| a * x[*k]).sum::<f64>() - r.rhs).abs())
            .fold(0.0, f64::max)
    }

    /// Dense symmetric matrix of PSD block `blk` from the stacked vector.
    pub fn unpack(&self, blk: usize, x: &[f64]) -> Vec<Vec<f64>> {
        let v = &self.vars[blk];
        let mut m = vec![vec![0.0; v.size]; v.size];
        for j in 0..v.size {
            for i in 0..=j {
                let val = x[v.offset + j * (j + 1) / 2 + i];
                m[i][j] = val;
                m[j][i] = val;
            }
        }
        m
    }
}
