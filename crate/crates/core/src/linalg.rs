//! Dense linear algebra on small square matrices.
//!
//! Exact routines work over [`Rational`] by plain Gaussian elimination, which
//! is all that 2×2 and 3×3 blocks need. Spectral quantities are computed in
//! `f64` with nalgebra and are only ever used to corroborate exact verdicts.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

pub type RatMatrix = Vec<Vec<Rational>>;

pub fn check_square(m: &[Vec<Rational>]) -> Result<usize> {
    let d = m.len();
    for row in m {
        if row.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: row.len() });
        }
    }
    Ok(d)
}

pub fn is_symmetric(m: &[Vec<Rational>]) -> bool {
    let d = m.len();
    (0..d).all(|i| (i + 1..d).all(|j| m[i][j] == m[j][i]))
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let d = m.len();
    let mut a: RatMatrix = m.to_vec();
    let mut det = Rational::one();
    for col in 0..d {
        let Some(pivot) = (col..d).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..d {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..d {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Submatrix on the given (sorted) row/column indices.
pub fn principal_submatrix(m: &[Vec<Rational>], idx: &[usize]) -> RatMatrix {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

/// All nonempty index subsets of `0..d`, ordered by size then
/// lexicographically.
pub fn index_subsets(d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << d))
        .map(|mask| (0..d).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Some solution of `m x = rhs`, or `None` when the system is inconsistent.
/// Free variables are set to zero.
pub fn solve_consistent(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: RatMatrix = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(p, r);
        let inv = aug[r][c].recip();
        for k in c..=cols {
            aug[r][k] *= &inv;
        }
        for i in 0..rows {
            if i == r || aug[i][c].is_zero() {
                continue;
            }
            let f = aug[i][c].clone();
            for k in c..=cols {
                let delta = &f * &aug[r][k];
                aug[i][k] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if aug[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[row][cols].clone();
    }
    Some(x)
}

pub fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `vᵀ M v`.
pub fn quadratic(m: &[Vec<Rational>], v: &[Rational]) -> Rational {
    dot(&mat_vec(m, v), v)
}

pub fn to_dmatrix(m: &[Vec<Rational>]) -> DMatrix<f64> {
    let d = m.len();
    DMatrix::from_fn(d, d, |i, j| to_f64(&m[i][j]))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn lambda_min_f64(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().symmetric_eigen().eigenvalues.min()
}

pub fn lambda_min(m: &[Vec<Rational>]) -> f64 {
    lambda_min_f64(&to_dmatrix(m))
}

/// Exact direction `v` with `vᵀ M v < 0`, or `None` when `M` is positive
/// semidefinite. Eliminates the first variable by a Schur complement when its
/// diagonal entry is positive and lifts the witness of the reduced matrix.
pub fn negative_direction(m: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let d = m.len();
    if d == 0 {
        return None;
    }
    if let Some(i) = (0..d).find(|&i| m[i][i].is_negative()) {
        let mut v = vec![Rational::zero(); d];
        v[i] = Rational::one();
        return Some(v);
    }
    let a00 = &m[0][0];
    if a00.is_zero() {
        // PSD forces the whole first row to vanish.
        if let Some(j) = (1..d).find(|&j| !m[0][j].is_zero()) {
            // v = (q + 1) e0 − r ej gives −r²(q + 2) < 0 for q = m[j][j] ≥ 0.
            let r = &m[0][j];
            let q = &m[j][j];
            let mut v = vec![Rational::zero(); d];
            v[0] = q + Rational::one();
            v[j] = -r.clone();
            return Some(v);
        }
        let rest: RatMatrix = m[1..].iter().map(|row| row[1..].to_vec()).collect();
        return negative_direction(&rest).map(|w| {
            let mut v = vec![Rational::zero()];
            v.extend(w);
            v
        });
    }
    let schur: RatMatrix = (1..d)
        .map(|i| (1..d).map(|j| &m[i][j] - &m[i][0] * &m[0][j] / a00).collect())
        .collect();
    negative_direction(&schur).map(|w| {
        let coupling: Rational = (1..d).map(|j| &m[0][j] * &w[j - 1]).sum();
        let mut v = vec![-coupling / a00];
        v.extend(w);
        v
    })
}
