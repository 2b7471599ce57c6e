use nalgebra::DMatrix;

use super::coeff::{Coeff, CoeffMul, Numeric, Scalar};
use super::poly::{Point, Poly, Var};
use super::PolyError;

/// Dense row-major matrix of polynomials. Either dimension may be zero.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyMatrix<C = Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Poly<C>>,
}

impl<C: Coeff> PolyMatrix<C> {
    pub fn new(rows: usize, cols: usize, data: Vec<Poly<C>>) -> Result<Self, PolyError> {
        if data.len() != rows * cols {
            return Err(PolyError::DimensionMismatch { op: "new", left: (rows, cols), right: (data.len(), 1) });
        }
        Ok(PolyMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, data: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Poly::one() } else { Poly::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly<C>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, data }
    }

    /// Constant matrix from rows of coefficients.
    pub fn from_constants(rows: usize, cols: usize, vals: &[C]) -> Result<Self, PolyError> {
        if vals.len() != rows * cols {
            return Err(PolyError::DimensionMismatch {
                op: "from_constants",
                left: (rows, cols),
                right: (vals.len(), 1),
            });
        }
        Ok(Self::from_fn(rows, cols, |i, j| Poly::constant(vals[i * cols + j].clone())))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<C> {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Poly<C> {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly<C>) {
        self.data[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly<C>] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.data.iter().any(|p| p.contains(v))
    }

    pub fn is_constant(&self) -> bool {
        self.data.iter().all(Poly::is_constant)
    }

    pub fn degree(&self, v: Var) -> u32 {
        self.data.iter().map(|p| p.degree(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.data.iter().map(Poly::total_degree).max().unwrap_or(0)
    }

    fn check_same(&self, rhs: &Self, op: &'static str) -> Result<(), PolyError> {
        if self.dims() != rhs.dims() {
            return Err(PolyError::DimensionMismatch { op, left: self.dims(), right: rhs.dims() });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_same(rhs, "add")?;
        Ok(self.zip(rhs, Poly::add))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_same(rhs, "sub")?;
        Ok(self.zip(rhs, Poly::sub))
    }

    pub fn add_assign(&mut self, rhs: &Self) -> Result<(), PolyError> {
        self.check_same(rhs, "add")?;
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            a.add_assign(b);
        }
        Ok(())
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&Poly<C>, &Poly<C>) -> Poly<C>) -> Self {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(Poly::neg)
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        self.map(|p| p.scale(k))
    }

    pub fn map(&self, f: impl Fn(&Poly<C>) -> Poly<C>) -> Self {
        PolyMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PolyMatrix<D> {
        PolyMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|p| p.map_coeffs(&f)).collect() }
    }

    pub fn mul<B: Coeff>(&self, rhs: &PolyMatrix<B>) -> Result<PolyMatrix<C::Output>, PolyError>
    where
        C: CoeffMul<B>,
    {
        if self.cols != rhs.rows {
            return Err(PolyError::DimensionMismatch { op: "mul", left: self.dims(), right: rhs.dims() });
        }
        let mut out = PolyMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b);
                    out.get_mut(i, j).add_assign(&prod);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn rename(&self, to: [Var; 3]) -> Self {
        self.map(|p| p.rename(to))
    }

    pub fn swap(&self, a: Var, b: Var) -> Self {
        self.map(|p| p.swap(a, b))
    }

    pub fn substitute(&self, bindings: &[(Var, Poly<Scalar>)]) -> Self {
        self.map(|p| p.substitute(bindings))
    }

    pub fn integrate(&self, v: Var, lower: &Poly<Scalar>, upper: &Poly<Scalar>) -> Result<Self, PolyError> {
        let data = self.data.iter().map(|p| p.integrate(v, lower, upper)).collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn derivative(&self, v: Var) -> Self {
        self.map(|p| p.derivative(v))
    }

    /// Sub-block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Place `m` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, m: &Self) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.set(r0 + i, c0 + j, m.get(i, j).clone());
            }
        }
    }

    pub fn hstack(parts: &[&Self]) -> Result<Self, PolyError> {
        let rows = parts.first().map_or(0, |p| p.rows);
        let mut cols = 0;
        for p in parts {
            if p.rows != rows {
                return Err(PolyError::DimensionMismatch { op: "hstack", left: (rows, cols), right: p.dims() });
            }
            cols += p.cols;
        }
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        Ok(out)
    }

    pub fn vstack(parts: &[&Self]) -> Result<Self, PolyError> {
        let cols = parts.first().map_or(0, |p| p.cols);
        let mut rows = 0;
        for p in parts {
            if p.cols != cols {
                return Err(PolyError::DimensionMismatch { op: "vstack", left: (rows, cols), right: p.dims() });
            }
            rows += p.rows;
        }
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        Ok(out)
    }

    pub fn eval_exact(&self, point: &Point<Scalar>) -> Result<Vec<Vec<C>>, PolyError> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).eval_exact(point)).collect()).collect()
    }

    pub fn eval_f64(&self, point: &Point<f64>) -> Result<DMatrix<f64>, PolyError>
    where
        C: Numeric,
    {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.get(i, j).eval_f64(point)?;
            }
        }
        Ok(out)
    }

    /// Coefficients of a variable-free matrix, row-major.
    pub fn constants(&self) -> Result<Vec<Vec<C>>, PolyError> {
        if !self.is_constant() {
            return Err(PolyError::NotConstant);
        }
        Ok((0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).constant_term()).collect()).collect())
    }
}
