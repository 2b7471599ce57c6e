//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use super::coeff::Scalar;

/// Row-major dense rational matrix.
pub type RatMat = Vec<Vec<Scalar>>;

/// Row echelon form in place; returns the pivot columns.
fn echelon(m: &mut RatMat, cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Scalar::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..m[i].len() {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RatMat) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut w = m.clone();
    echelon(&mut w, cols).len()
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &RatMat) -> Option<RatMat> {
    let n = m.len();
    let mut w: RatMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    if echelon(&mut w, n).len() < n {
        return None;
    }
    Some(w.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn matmul(a: &RatMat, b: &RatMat, inner: usize, cols: usize) -> RatMat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for k in 0..inner {
                        acc += &row[k] * &b[k][j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
