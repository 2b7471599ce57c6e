//! Method-of-lines discretization and implicit time stepping of the coupled
//! system, used as an independent numerical oracle.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyalg::{to_f64, Point, PolyError, PolyMatrix};
use crate::system_model::{validate, CoupledSystem, ModelError};

pub const MIN_GRID: usize = 8;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("grid size {0} is below the minimum of {MIN_GRID}")]
    Grid(usize),
    #[error("invalid simulation setting: {0}")]
    Setting(String),
    #[error("boundary elimination is singular: the discrete boundary conditions do not determine the endpoint values")]
    SingularBoundary,
    #[error("implicit step matrix is singular")]
    SingularStep,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl SimError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::SingularStep => 4,
            _ => 3,
        }
    }
}

/// Semi-discrete generator on the state `(x, z(s_1), ..., z(s_N))`.
///
/// The grid has `N + 2` uniform points including both endpoints; endpoint
/// values are eliminated through the boundary conditions.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub n_o: usize,
    pub n_p: usize,
    pub grid: usize,
    pub h: f64,
    /// All `N + 2` grid points.
    pub points: Vec<f64>,
    pub matrix: DMatrix<f64>,
    /// Maps interior values to values on every grid point.
    pub extension: DMatrix<f64>,
    weights: Vec<f64>,
}

fn eval_at(m: &PolyMatrix, s: f64) -> Result<DMatrix<f64>, PolyError> {
    m.eval_f64(&Point::s(s))
}

pub fn semidiscretize(sys: &CoupledSystem, grid: usize) -> Result<Discretization, SimError> {
    if grid < MIN_GRID {
        return Err(SimError::Grid(grid));
    }
    validate(sys).into_result()?;
    let (ode, pde, link) = (&sys.ode, &sys.pde, &sys.link);
    let n = sys.n_p();
    let n_o = sys.n_o();
    let a = to_f64(&pde.interval.a);
    let b = to_f64(&pde.interval.b);
    let npts = grid + 2;
    let h = (b - a) / (grid + 1) as f64;
    let points: Vec<f64> = (0..npts).map(|k| a + k as f64 * h).collect();
    let full = npts * n;
    let nz = grid * n;

    // First derivative at every grid point: one-sided at the ends, central inside.
    let mut d1 = DMatrix::<f64>::zeros(full, full);
    let mut d2 = DMatrix::<f64>::zeros(full, full);
    for j in 0..n {
        let at = |k: usize| k * n + j;
        let last = npts - 1;
        d1[(at(0), at(0))] = -3.0 / (2.0 * h);
        d1[(at(0), at(1))] = 4.0 / (2.0 * h);
        d1[(at(0), at(2))] = -1.0 / (2.0 * h);
        d1[(at(last), at(last))] = 3.0 / (2.0 * h);
        d1[(at(last), at(last - 1))] = -4.0 / (2.0 * h);
        d1[(at(last), at(last - 2))] = 1.0 / (2.0 * h);
        for k in 1..last {
            d1[(at(k), at(k + 1))] = 1.0 / (2.0 * h);
            d1[(at(k), at(k - 1))] = -1.0 / (2.0 * h);
            d2[(at(k), at(k + 1))] = 1.0 / (h * h);
            d2[(at(k), at(k))] = -2.0 / (h * h);
            d2[(at(k), at(k - 1))] = 1.0 / (h * h);
        }
    }

    // Boundary vector col(z(a), z(b), z_s(a), z_s(b)) as a map on the full grid.
    let mut zb = DMatrix::<f64>::zeros(4 * n, full);
    for j in 0..n {
        zb[(j, j)] = 1.0;
        zb[(n + j, (npts - 1) * n + j)] = 1.0;
    }
    zb.view_mut((2 * n, 0), (n, full)).copy_from(&d1.view((0, 0), (n, full)));
    zb.view_mut((3 * n, 0), (n, full)).copy_from(&d1.view(((npts - 1) * n, 0), (n, full)));

    // Solve Bc zb = 0 for the endpoint values.
    let mut extension = DMatrix::<f64>::zeros(full, nz);
    extension.view_mut((n, 0), (nz, nz)).fill_with_identity();
    if n > 0 {
        let bc = eval_at(&pde.bc, a)?;
        let k = &bc * &zb;
        let mut kb = DMatrix::<f64>::zeros(2 * n, 2 * n);
        kb.view_mut((0, 0), (2 * n, n)).copy_from(&k.view((0, 0), (2 * n, n)));
        kb.view_mut((0, n), (2 * n, n)).copy_from(&k.view((0, (npts - 1) * n), (2 * n, n)));
        let ki = k.view((0, n), (2 * n, nz)).into_owned();
        let sv = kb.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if smin.is_nan() || smin <= 1e-12 * smax {
            return Err(SimError::SingularBoundary);
        }
        let ends = kb.lu().solve(&(-ki)).ok_or(SimError::SingularBoundary)?;
        extension.view_mut((0, 0), (n, nz)).copy_from(&ends.view((0, 0), (n, nz)));
        extension.view_mut(((npts - 1) * n, 0), (n, nz)).copy_from(&ends.view((n, 0), (n, nz)));
    }

    let mut weights = vec![h; npts];
    weights[0] = h / 2.0;
    weights[npts - 1] = h / 2.0;

    // Output y = C1 zb + int (Ca z + Cb z_s) ds.
    let p_p = pde.c1.rows();
    let mut y_full = eval_at(&pde.c1, a)? * &zb;
    for (k, &s) in points.iter().enumerate() {
        let ca = eval_at(&pde.ca, s)? * weights[k];
        let cb = eval_at(&pde.cb, s)? * weights[k];
        let mut rows = y_full.view_mut((0, k * n), (p_p, n));
        rows += &ca;
        y_full += &cb * d1.view((k * n, 0), (n, full));
    }
    let y = &y_full * &extension;

    let l1 = eval_at(&link.l1(), a)?;
    let l2 = eval_at(&link.l2(), a)?;
    let l3 = eval_at(&link.l3(), a)?;
    let l4 = eval_at(&link.l4(), a)?;
    let am = eval_at(&ode.a, a)?;
    let bm = eval_at(&ode.b, a)?;
    let cm = eval_at(&ode.c, a)?;

    let size = n_o + nz;
    let mut matrix = DMatrix::<f64>::zeros(size, size);
    matrix.view_mut((0, 0), (n_o, n_o)).copy_from(&(&am + &bm * &l1 * &cm));
    matrix.view_mut((0, n_o), (n_o, nz)).copy_from(&(&bm * &l2 * &y));
    let d1x = &d1 * &extension;
    let d2x = &d2 * &extension;
    for (i, &s) in points.iter().enumerate().take(grid + 1).skip(1) {
        let (a0, a1, a2, b1) = (eval_at(&pde.a0, s)?, eval_at(&pde.a1, s)?, eval_at(&pde.a2, s)?, eval_at(&pde.b1, s)?);
        let r = n_o + (i - 1) * n;
        let zz = &a0 * extension.view((i * n, 0), (n, nz))
            + &a1 * d1x.view((i * n, 0), (n, nz))
            + &a2 * d2x.view((i * n, 0), (n, nz))
            + &b1 * &l4 * &y;
        matrix.view_mut((r, n_o), (n, nz)).copy_from(&zz);
        matrix.view_mut((r, 0), (n, n_o)).copy_from(&(&b1 * &l3 * &cm));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(SimError::Setting("discrete generator has non-finite entries".into()));
    }
    Ok(Discretization { n_o, n_p: n, grid, h, points, matrix, extension, weights })
}

impl Discretization {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `|x|^2 + trapezoid(|z|^2)` with endpoint values restored.
    pub fn energy(&self, state: &DVector<f64>) -> f64 {
        let x = state.rows(0, self.n_o);
        let z = &self.extension * state.rows(self.n_o, self.grid * self.n_p);
        let zn: f64 =
            (0..self.points.len()).map(|k| self.weights[k] * z.rows(k * self.n_p, self.n_p).norm_squared()).sum();
        x.norm_squared() + zn
    }

    /// State vector from `x0` and a function giving `z0(s)`.
    pub fn initial_state(&self, x0: &[f64], z0: impl Fn(f64) -> Vec<f64>) -> Result<DVector<f64>, SimError> {
        if x0.len() != self.n_o {
            return Err(SimError::Setting(format!("x0 has {} entries, expected {}", x0.len(), self.n_o)));
        }
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(0, self.n_o).copy_from_slice(x0);
        for i in 1..=self.grid {
            let zi = z0(self.points[i]);
            if zi.len() != self.n_p {
                return Err(SimError::Setting(format!("z0 has {} components, expected {}", zi.len(), self.n_p)));
            }
            v.rows_mut(self.n_o + (i - 1) * self.n_p, self.n_p).copy_from_slice(&zi);
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(SimError::Setting("initial data must be finite".into()));
        }
        Ok(v)
    }

    /// Largest real part over the spectrum of the discrete generator.
    pub fn leading_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return f64::NEG_INFINITY;
        }
        self.matrix.complex_eigenvalues().iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
}

impl EnergyTrace {
    /// `E(t_final) / E(0)`; NaN when the initial energy is zero.
    pub fn ratio(&self) -> f64 {
        match (self.energy.first(), self.energy.last()) {
            (Some(&e0), Some(&e1)) if e0 > 0.0 => e1 / e0,
            _ => f64::NAN,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,E\n");
        for (t, e) in self.times.iter().zip(&self.energy) {
            writeln!(out, "{t},{e}").expect("writing to a string");
        }
        out
    }
}

/// Implicit trapezoidal stepping from `x0` to `t_final`.
pub fn integrate(d: &Discretization, x0: &DVector<f64>, t_final: f64, dt: f64) -> Result<EnergyTrace, SimError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::Setting(format!("time step must be positive, got {dt}")));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(SimError::Setting(format!("final time must be non-negative, got {t_final}")));
    }
    if x0.len() != d.dim() || x0.iter().any(|v| !v.is_finite()) {
        return Err(SimError::Setting("initial data must be finite and match the state size".into()));
    }
    let steps = (t_final / dt).ceil() as usize;
    let dt = if steps > 0 { t_final / steps as f64 } else { dt };
    let id = DMatrix::<f64>::identity(d.dim(), d.dim());
    let lu = (&id - &d.matrix * (dt / 2.0)).lu();
    if !lu.is_invertible() {
        return Err(SimError::SingularStep);
    }
    let forward = &id + &d.matrix * (dt / 2.0);
    let mut state = x0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps + 1);
    times.push(0.0);
    energy.push(d.energy(&state));
    for k in 1..=steps {
        state = lu.solve(&(&forward * &state)).ok_or(SimError::SingularStep)?;
        times.push(k as f64 * dt);
        energy.push(d.energy(&state));
    }
    Ok(EnergyTrace { times, energy })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: usize,
    pub t_final: f64,
    /// Defaults to `1e-3 (b - a)^2`.
    pub dt: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { grid: 64, t_final: 10.0, dt: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub leading_eig_real: f64,
    pub energy_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub discretization: Discretization,
    pub trace: EnergyTrace,
    pub summary: SimulationSummary,
}

/// Simulate from `x = 1`, `z = 1` on the interior grid.
pub fn simulate(sys: &CoupledSystem, config: &SimConfig) -> Result<Simulation, SimError> {
    let d = semidiscretize(sys, config.grid)?;
    let len = to_f64(&sys.interval().length());
    let dt = config.dt.unwrap_or(1e-3 * len * len);
    let x0 = d.initial_state(&vec![1.0; d.n_o], |_| vec![1.0; d.n_p])?;
    let trace = integrate(&d, &x0, config.t_final, dt)?;
    let summary = SimulationSummary { leading_eig_real: d.leading_eigenvalue(), energy_ratio: trace.ratio() };
    Ok(Simulation { discretization: d, trace, summary })
}
