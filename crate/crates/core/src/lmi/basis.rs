use crate::polyalg::{Affine, Coeff, Monomial, Poly, PolyMatrix, Var};

/// Monomial vectors `Z(s)` (univariate, degree `d1`) and `Z(s, eta)`
/// (bivariate, total degree `d2`), each tensored with the `n x n` identity.
///
/// `d1 = None` drops `Z(s)` entirely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    d1: Option<u32>,
    d2: u32,
}

impl MonomialBasis {
    pub fn new(n: usize, d1: Option<u32>, d2: u32) -> Self {
        MonomialBasis { n, d1, d2 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d1(&self) -> Option<u32> {
        self.d1
    }

    pub fn d2(&self) -> u32 {
        self.d2
    }

    pub fn q1(&self) -> usize {
        self.d1.map_or(0, |d| d as usize + 1)
    }

    pub fn q2(&self) -> usize {
        let d = self.d2 as usize;
        (d + 1) * (d + 2) / 2
    }

    /// Bivariate exponents in graded order: `1, s, eta, s^2, s*eta, eta^2, ...`.
    pub fn bivariate(&self) -> Vec<Monomial> {
        let mut out = Vec::with_capacity(self.q2());
        for deg in 0..=self.d2 {
            for e_eta in 0..=deg {
                out.push(Monomial([deg - e_eta, e_eta, 0]));
            }
        }
        out
    }

    fn kron(&self, monos: &[Monomial]) -> PolyMatrix {
        let n = self.n;
        PolyMatrix::from_fn(monos.len() * n, n, |i, j| {
            if i % n == j {
                Poly::term(monos[i / n], crate::polyalg::int(1))
            } else {
                Poly::zero()
            }
        })
    }

    /// `Z(s)`, `(q1 n) x n`.
    pub fn zs(&self) -> PolyMatrix {
        let monos: Vec<Monomial> = (0..self.q1() as u32).map(|k| Monomial([k, 0, 0])).collect();
        self.kron(&monos)
    }

    /// `Z(s, eta)`, `(q2 n) x n`.
    pub fn zsh(&self) -> PolyMatrix {
        self.kron(&self.bivariate())
    }
}

/// Block sizes `(n_o, q1 n, q2 n, q2 n)` of the Gram matrix.
pub fn gram_blocks(n_o: usize, basis: &MonomialBasis) -> [usize; 4] {
    [n_o, basis.q1() * basis.n(), basis.q2() * basis.n(), basis.q2() * basis.n()]
}

/// Index of `(i, j)`, `i <= j`, in the column-major upper triangle.
pub fn svec_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Symmetric matrix `T` partitioned into 4 x 4 blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCandidate<C> {
    pub basis: MonomialBasis,
    pub n_o: usize,
    /// Dense row-major, symmetric.
    t: Vec<C>,
}

impl<C: Coeff> GramCandidate<C> {
    pub fn size(&self) -> usize {
        gram_blocks(self.n_o, &self.basis).iter().sum()
    }

    pub fn from_dense(basis: MonomialBasis, n_o: usize, rows: &[Vec<C>]) -> Self {
        let n: usize = gram_blocks(n_o, &basis).iter().sum();
        assert_eq!(rows.len(), n, "Gram matrix size");
        let t = rows.iter().flat_map(|r| r.iter().cloned()).collect::<Vec<_>>();
        assert_eq!(t.len(), n * n, "Gram matrix must be square");
        GramCandidate { basis, n_o, t }
    }

    pub fn zero(basis: MonomialBasis, n_o: usize) -> Self {
        let n: usize = gram_blocks(n_o, &basis).iter().sum();
        GramCandidate { basis, n_o, t: vec![C::zero_coeff(); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.t[i * self.size() + j]
    }

    /// Block `(bi, bj)` of the 4 x 4 partition as a constant matrix.
    pub fn block(&self, bi: usize, bj: usize) -> PolyMatrix<C> {
        let sizes = gram_blocks(self.n_o, &self.basis);
        let off = |k: usize| sizes[..k].iter().sum::<usize>();
        let (r0, c0) = (off(bi), off(bj));
        PolyMatrix::from_fn(sizes[bi], sizes[bj], |i, j| Poly::constant(self.get(r0 + i, c0 + j).clone()))
    }
}

impl GramCandidate<Affine> {
    /// Every upper-triangular entry is its own decision variable, numbered
    /// from `offset` in column-major order.
    pub fn symbolic(basis: MonomialBasis, n_o: usize, offset: usize) -> Self {
        let n: usize = gram_blocks(n_o, &basis).iter().sum();
        let t = (0..n * n).map(|k| Affine::var(offset + svec_index(k / n, k % n))).collect();
        GramCandidate { basis, n_o, t }
    }
}

/// `Var::ALL` relabelling helpers.
pub(crate) mod relabel {
    use super::Var;
    /// `(s, eta) -> (eta, s)`.
    pub const SWAP: [Var; 3] = [Var::Eta, Var::S, Var::Theta];
    /// `s -> eta`.
    pub const S_TO_ETA: [Var; 3] = [Var::Eta, Var::Eta, Var::Theta];
    /// `(s, eta) -> (theta, s)`.
    pub const TO_THETA_S: [Var; 3] = [Var::Theta, Var::S, Var::Eta];
    /// `(s, eta) -> (theta, eta)`.
    pub const TO_THETA_ETA: [Var; 3] = [Var::Theta, Var::Eta, Var::Eta];
}
