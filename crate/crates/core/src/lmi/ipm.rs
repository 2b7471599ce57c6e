use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::solver::{ConicInput, ConicOutput, ConicSolver, ConicStatus};

/// Primal-dual path-following solver (HKM direction, Mehrotra corrector)
/// working on the `m x m` Schur complement.
///
/// Solves `min tr(X)  s.t.  A(X) = b,  X >= 0` from an infeasible start, so
/// feasible sets without interior are handled. The answer is feasible when the
/// best iterate meets the equalities to `feas_tol` relative to `max |b|`, and
/// infeasible once the dual iterate is a Farkas ray to within `farkas_tol` or
/// the residual stops improving above `feas_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorPointSolver {
    pub tol: f64,
    pub max_iter: u32,
    /// Seconds; `f64::INFINITY` for none.
    pub time_limit: f64,
    pub feas_tol: f64,
    pub farkas_tol: f64,
    /// Stop when the residual has not halved over this many iterations.
    pub stall_window: usize,
}

impl Default for InteriorPointSolver {
    fn default() -> Self {
        InteriorPointSolver {
            tol: 1e-8,
            max_iter: 150,
            time_limit: f64::INFINITY,
            feas_tol: 1e-3,
            farkas_tol: 1e-13,
            stall_window: 25,
        }
    }
}

/// Symmetric constraint matrix restricted to one block, both triangles listed.
#[derive(Debug, Clone, Default)]
struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    fn dot(&self, p: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(i, j, v)| v * p[(i, j)]).sum()
    }

    fn add_to(&self, y: f64, out: &mut DMatrix<f64>) {
        for &(i, j, v) in &self.entries {
            out[(i, j)] += y * v;
        }
    }

    fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|e| e.2 * e.2).sum()
    }
}

struct Problem {
    sizes: Vec<usize>,
    /// `a[k][blk]`.
    a: Vec<Vec<SparseSym>>,
    b: DVector<f64>,
    c: Vec<DMatrix<f64>>,
}

impl Problem {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.a.iter().map(|ak| ak.iter().zip(x).map(|(s, xb)| s.dot(xb)).sum()))
    }

    fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (k, ak) in self.a.iter().enumerate() {
            for (blk, s) in ak.iter().enumerate() {
                s.add_to(y[k], &mut out[blk]);
            }
        }
        out
    }

    /// `M_kl = sum_blk tr(A_k X A_l Z^-1)`.
    fn schur(&self, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for (blk, &n) in self.sizes.iter().enumerate() {
            let mut g = DMatrix::zeros(n, n);
            let mut row = DVector::zeros(n);
            for k in 0..m {
                let ak = &self.a[k][blk];
                if ak.entries.is_empty() {
                    continue;
                }
                g.fill(0.0);
                // G = X (A_k Z^-1), built one nonzero row of A_k at a time.
                let mut start = 0;
                while start < ak.entries.len() {
                    let i = ak.entries[start].0;
                    let mut end = start;
                    row.fill(0.0);
                    while end < ak.entries.len() && ak.entries[end].0 == i {
                        let (_, j, v) = ak.entries[end];
                        row.axpy(v, &zinv[blk].column(j), 1.0);
                        end += 1;
                    }
                    start = end;
                    for c in 0..n {
                        let coef = row[c];
                        if coef != 0.0 {
                            g.column_mut(c).axpy(coef, &x[blk].column(i), 1.0);
                        }
                    }
                }
                for l in k..m {
                    let al = &self.a[l][blk];
                    if al.entries.is_empty() {
                        continue;
                    }
                    let v = al.dot(&g);
                    out[(k, l)] += v;
                }
            }
        }
        for k in 0..m {
            for l in 0..k {
                out[(k, l)] = out[(l, k)];
            }
        }
        out
    }
}

fn frob(ms: &[DMatrix<f64>]) -> f64 {
    ms.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `alpha <= 1` (scaled by `tau`) keeping `x + alpha dx` positive definite.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>, tau: f64) -> Option<f64> {
    let n = x.nrows();
    if n == 0 {
        return Some(1.0);
    }
    let l = x.clone().cholesky()?.l();
    let li = l.solve_lower_triangular(&DMatrix::identity(n, n))?;
    let w = sym(&(&li * dx * li.transpose()));
    let lmin = w.symmetric_eigenvalues().min();
    if lmin >= 0.0 {
        Some(1.0)
    } else {
        Some((-tau / lmin).min(1.0))
    }
}

fn inverse_spd(z: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if z.nrows() == 0 {
        return Some(z.clone());
    }
    Some(z.clone().cholesky()?.inverse())
}

fn sparse_dot(a: &SparseSym, b: &SparseSym) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.entries.len() && j < b.entries.len() {
        let (ka, kb) = ((a.entries[i].0, a.entries[i].1), (b.entries[j].0, b.entries[j].1));
        match ka.cmp(&kb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a.entries[i].2 * b.entries[j].2;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Indices of a maximal well-conditioned subset of rows, by pivoted Cholesky of `A A^T`.
fn independent_rows(a: &[Vec<SparseSym>]) -> Vec<usize> {
    let m = a.len();
    let mut gram = DMatrix::zeros(m, m);
    for k in 0..m {
        for l in k..m {
            let v: f64 = a[k].iter().zip(&a[l]).map(|(x, y)| sparse_dot(x, y)).sum();
            gram[(k, l)] = v;
            gram[(l, k)] = v;
        }
    }
    let scale = (0..m).map(|k| gram[(k, k)]).fold(0.0, f64::max);
    let mut work = gram;
    let mut keep = Vec::new();
    let mut remaining: Vec<usize> = (0..m).collect();
    while let Some((pos, &piv)) =
        remaining.iter().enumerate().max_by(|a, b| work[(*a.1, *a.1)].total_cmp(&work[(*b.1, *b.1)]))
    {
        let d = work[(piv, piv)];
        if d <= 1e-12 * scale {
            break;
        }
        let col = work.column(piv) / d.sqrt();
        for &r in &remaining {
            for &c in &remaining {
                work[(r, c)] -= col[r] * col[c];
            }
        }
        keep.push(piv);
        remaining.remove(pos);
    }
    keep.sort_unstable();
    keep
}

impl InteriorPointSolver {
    fn build(input: &ConicInput) -> (Problem, f64) {
        let nb = input.psd_sizes.len();
        let m = input.rhs.len();
        let mut offsets = Vec::with_capacity(nb);
        let mut acc = 0;
        for &n in &input.psd_sizes {
            offsets.push(acc);
            acc += n * (n + 1) / 2;
        }
        let locate = |col: usize| -> (usize, usize, usize) {
            let blk = offsets.iter().rposition(|&o| o <= col).expect("column in range");
            let mut local = col - offsets[blk];
            let mut j = 0;
            while local > j {
                local -= j + 1;
                j += 1;
            }
            (blk, local, j)
        };
        let mut a: Vec<Vec<SparseSym>> = (0..m).map(|_| vec![SparseSym::default(); nb]).collect();
        for &(r, col, v) in &input.triplets {
            let (blk, i, j) = locate(col);
            let e = &mut a[r][blk].entries;
            if i == j {
                e.push((i, i, v));
            } else {
                e.push((i, j, v / 2.0));
                e.push((j, i, v / 2.0));
            }
        }
        let mut b = DVector::from_column_slice(&input.rhs);
        for (k, ak) in a.iter_mut().enumerate() {
            for s in ak.iter_mut() {
                s.entries.sort_by_key(|x| (x.0, x.1));
                let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(s.entries.len());
                for &(i, j, v) in &s.entries {
                    match merged.last_mut() {
                        Some(last) if last.0 == i && last.1 == j => last.2 += v,
                        _ => merged.push((i, j, v)),
                    }
                }
                merged.retain(|e| e.2 != 0.0);
                s.entries = merged;
            }
            let scale = ak.iter().flat_map(|s| s.entries.iter().map(|e| e.2.abs())).fold(0.0, f64::max);
            if scale > 0.0 {
                for s in ak.iter_mut() {
                    for e in s.entries.iter_mut() {
                        e.2 /= scale;
                    }
                }
                b[k] /= scale;
            }
        }
        // The feasible set scales with b; solve for X / beta.
        let beta = b.amax();
        let beta = if beta > 0.0 { beta } else { 1.0 };
        b /= beta;
        let sizes = input.psd_sizes.clone();
        let c: Vec<DMatrix<f64>> = sizes.iter().map(|&n| DMatrix::identity(n, n)).collect();
        (Problem { sizes, a, b, c }, beta)
    }
}

impl ConicSolver for InteriorPointSolver {
    fn name(&self) -> &str {
        "interior-point"
    }

    fn solve(&self, input: &ConicInput) -> ConicOutput {
        let start = Instant::now();
        let (full, beta) = Self::build(input);
        let keep = independent_rows(&full.a);
        let dropped = full.m() - keep.len();
        let p = Problem {
            sizes: full.sizes.clone(),
            a: keep.iter().map(|&k| full.a[k].clone()).collect(),
            b: DVector::from_iterator(keep.len(), keep.iter().map(|&k| full.b[k])),
            c: full.c.clone(),
        };
        let n_total: usize = p.sizes.iter().sum();
        let norm_b = p.b.norm();
        let norm_c = frob(&p.c);

        let max_a = |blk: usize| p.a.iter().map(|ak| ak[blk].norm_sq().sqrt()).fold(0.0, f64::max);
        let mut x: Vec<DMatrix<f64>> = Vec::new();
        let mut z: Vec<DMatrix<f64>> = Vec::new();
        for (blk, &n) in p.sizes.iter().enumerate() {
            let rn = (n as f64).sqrt();
            let na = max_a(blk);
            let xi =
                p.b.iter()
                    .enumerate()
                    .map(|(k, bk)| rn * (1.0 + bk.abs()) / (1.0 + p.a[k][blk].norm_sq().sqrt()))
                    .fold(10f64.max(rn), f64::max);
            let eta = 10f64.max(rn).max(na).max(p.c[blk].norm());
            x.push(DMatrix::identity(n, n) * xi);
            z.push(DMatrix::identity(n, n) * eta);
        }
        let mut y = DVector::zeros(p.m());

        let mut status = ConicStatus::Failed;
        let mut raw = String::from("max-iterations");
        let mut iterations = 0;
        let (mut pinf, mut dinf) = (f64::NAN, f64::NAN);
        let mut history: Vec<f64> = Vec::new();
        let mut best = (f64::INFINITY, x.clone());
        let tau = 0.95;
        for it in 0..self.max_iter {
            iterations = it;
            if start.elapsed().as_secs_f64() > self.time_limit {
                raw = "time-limit".into();
                break;
            }
            let rp = &p.b - p.apply(&x);
            let aty = p.adjoint(&y);
            let rd: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|b| &p.c[b] - &aty[b] - &z[b]).collect();
            let gap = inner(&x, &z);
            let mu = gap / n_total as f64;
            let pobj = inner(&p.c, &x);
            let dobj = p.b.dot(&y);
            pinf = rp.norm() / (1.0 + norm_b);
            dinf = frob(&rd) / (1.0 + norm_c);
            if pinf < best.0 {
                best = (pinf, x.clone());
            }
            history.push(pinf);
            let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            if pinf < self.tol && dinf < self.tol && relgap < self.tol {
                raw = "converged".into();
                status = ConicStatus::Feasible;
                break;
            }
            if dobj > 0.0 && farkas_gap(&p, &y) / dobj < self.farkas_tol {
                raw = "farkas ray".into();
                status = ConicStatus::Infeasible;
                break;
            }
            if history.len() > self.stall_window && best.0 > 0.5 * history[history.len() - 1 - self.stall_window] {
                raw = "residual stalled".into();
                break;
            }

            let zinv: Option<Vec<DMatrix<f64>>> = z.iter().map(inverse_spd).collect();
            let Some(zinv) = zinv else {
                raw = "lost positive definiteness".into();
                break;
            };
            let mut schur = p.schur(&x, &zinv);
            let diag_max = (0..p.m()).map(|k| schur[(k, k)]).fold(0.0, f64::max);
            let chol = match schur.clone().cholesky() {
                Some(c) => c,
                None => {
                    for k in 0..p.m() {
                        schur[(k, k)] += 1e-12 * diag_max.max(1.0);
                    }
                    match schur.cholesky() {
                        Some(c) => c,
                        None => {
                            raw = "schur complement not positive definite".into();
                            break;
                        }
                    }
                }
            };
            let xrdzi: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|b| &x[b] * &rd[b] * &zinv[b]).collect();
            let a_xrdzi = p.apply(&xrdzi);

            let direction = |h: &[DMatrix<f64>]| -> (Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>) {
                let rhs = &rp - p.apply(h) + &a_xrdzi;
                let dy = chol.solve(&rhs);
                let atdy = p.adjoint(&dy);
                let dz: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|b| &rd[b] - &atdy[b]).collect();
                let dx: Vec<DMatrix<f64>> =
                    (0..p.sizes.len()).map(|b| sym(&(&h[b] - &x[b] * &dz[b] * &zinv[b]))).collect();
                (dx, dy, dz)
            };
            let steps = |dx: &[DMatrix<f64>], dz: &[DMatrix<f64>]| -> Option<(f64, f64)> {
                let mut ap: f64 = 1.0;
                let mut ad: f64 = 1.0;
                for b in 0..p.sizes.len() {
                    ap = ap.min(max_step(&x[b], &dx[b], tau)?);
                    ad = ad.min(max_step(&z[b], &dz[b], tau)?);
                }
                Some((ap, ad))
            };

            let h_pred: Vec<DMatrix<f64>> = x.iter().map(|xb| -xb).collect();
            let (dxa, _, dza) = direction(&h_pred);
            let Some((apa, ada)) = steps(&dxa, &dza) else {
                raw = "lost positive definiteness".into();
                break;
            };
            let xa: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|b| &x[b] + &dxa[b] * apa).collect();
            let za: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|b| &z[b] + &dza[b] * ada).collect();
            let mu_aff = inner(&xa, &za) / n_total as f64;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            let h_corr: Vec<DMatrix<f64>> =
                (0..p.sizes.len()).map(|b| &zinv[b] * (sigma * mu) - &x[b] - &dxa[b] * &dza[b] * &zinv[b]).collect();
            let (dx, dy, dz) = direction(&h_corr);
            let Some((ap, ad)) = steps(&dx, &dz) else {
                raw = "lost positive definiteness".into();
                break;
            };
            // Back off if rounding pushed an iterate out of the cone.
            let (mut ap, mut ad) = (ap, ad);
            let mut accepted = false;
            for _ in 0..20 {
                let xn: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|b| &x[b] + &dx[b] * ap).collect();
                let zn: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|b| &z[b] + &dz[b] * ad).collect();
                if xn.iter().chain(&zn).all(|m| m.nrows() == 0 || m.clone().cholesky().is_some()) {
                    x = xn;
                    z = zn;
                    accepted = true;
                    break;
                }
                ap *= 0.8;
                ad *= 0.8;
            }
            if !accepted {
                raw = "lost positive definiteness".into();
                break;
            }
            y += dy * ad;
            if ap < 1e-10 && ad < 1e-10 {
                raw = "stalled".into();
                break;
            }
        }

        let x = best.1;
        let mut sol = Vec::with_capacity(input.num_vars());
        for (blk, &n) in input.psd_sizes.iter().enumerate() {
            for j in 0..n {
                for i in 0..=j {
                    sol.push(beta * x[blk][(i, j)]);
                }
            }
        }
        // Rows dropped as dependent are checked here too.
        let scale = input.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
        let rel = input_residual(input, &sol) / scale;
        let status = if !rel.is_finite() {
            ConicStatus::Failed
        } else if status == ConicStatus::Infeasible || rel > self.feas_tol {
            ConicStatus::Infeasible
        } else {
            ConicStatus::Feasible
        };
        raw = format!("{raw}; relative residual {rel:.2e}");
        ConicOutput {
            status,
            raw_status: format!("{raw}; dropped rows = {dropped}"),
            x: sol,
            primal_residual: pinf,
            dual_residual: dinf,
            iterations,
            solve_time: start.elapsed().as_secs_f64(),
        }
    }
}

/// `max(0, lambda_max(A^T y))`: zero for an exact Farkas ray.
fn farkas_gap(p: &Problem, y: &DVector<f64>) -> f64 {
    p.adjoint(y).iter().filter(|m| m.nrows() > 0).map(|m| m.clone().symmetric_eigenvalues().max()).fold(0.0, f64::max)
}

fn input_residual(input: &ConicInput, x: &[f64]) -> f64 {
    let mut r: Vec<f64> = input.rhs.iter().map(|b| -b).collect();
    for &(row, col, v) in &input.triplets {
        r[row] += v * x[col];
    }
    r.iter().fold(0.0, |a, b| a.max(b.abs()))
}
