//! Dense linear algebra over a prime field `F_p`, for subspace bases,
//! annihilators and the random quotient maps of the modelling lemma.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// A `rows × cols` matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matrix {
    pub p: u64,
    pub rows: Vec<Vec<u64>>,
    pub cols: usize,
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) is the inverse.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

impl Matrix {
    pub fn new(p: u64, rows: Vec<Vec<u64>>, cols: usize) -> Result<Matrix> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged matrix".into()));
        }
        Ok(Matrix {
            p,
            rows: rows.into_iter().map(|r| r.into_iter().map(|v| v % p).collect()).collect(),
            cols,
        })
    }

    pub fn random<R: Rng + ?Sized>(p: u64, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let rows = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..p)).collect()).collect();
        Matrix { p, rows, cols }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(0u64, |acc, (&a, &b)| (acc + a * b) % self.p))
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let p = self.p;
        let mut m = self.rows.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(row, pr);
            let inv = inverse_mod(m[row][col], p);
            for v in m[row].iter_mut() {
                *v = *v * inv % p;
            }
            for r in 0..m.len() {
                if r != row && m[r][col] != 0 {
                    let f = m[r][col];
                    for c in 0..self.cols {
                        m[r][c] = (m[r][c] + p * p - f * m[row][c] % p) % p;
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.len() {
                break;
            }
        }
        (
            Matrix {
                p,
                rows: m,
                cols: self.cols,
            },
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : Mx = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - r.rows[i][f]) % p;
                }
                v
            })
            .collect()
    }
}

/// Coordinates of the listed elements of a vector space, as matrix rows.
pub fn element_rows(group: &Group, elements: &[Element]) -> Result<Matrix> {
    let (p, n) = group.require_vector_space()?;
    let rows = elements
        .iter()
        .map(|&x| Ok(group.coords(x)?.into_iter().map(|c| c as u64).collect()))
        .collect::<Result<Vec<Vec<u64>>>>()?;
    Matrix::new(p as u64, rows, n as usize)
}

/// A basis (as group elements, in echelon form) of the span of `elements`.
pub fn span_basis(group: &Group, elements: &[Element]) -> Result<Vec<Element>> {
    let m = element_rows(group, elements)?;
    let (r, pivots) = m.rref();
    r.rows[..pivots.len()]
        .iter()
        .map(|row| group.from_coords(&row.iter().map(|&v| v as usize).collect::<Vec<_>>()))
        .collect()
}

/// A basis of the annihilator `{x : Σ_i γ_i x_i = 0 for all γ}` of a set of
/// dual vectors.
pub fn annihilator_basis(group: &Group, duals: &[Element]) -> Result<Vec<Element>> {
    let (p, n) = group.require_vector_space()?;
    let m = if duals.is_empty() {
        Matrix::new(p as u64, Vec::new(), n as usize)?
    } else {
        element_rows(group, duals)?
    };
    m.nullspace()
        .into_iter()
        .map(|v| group.from_coords(&v.into_iter().map(|c| c as usize).collect::<Vec<_>>()))
        .collect()
}
