//! Exact dense matrices and a sparse linear solver.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = S::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Matrix product.
    ///
    /// # Panics
    /// Panics on incompatible shapes.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] = out[(r, c)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(S::zero(), |acc, c| {
                    acc + self[(r, c)].clone() * v[c].clone()
                })
            })
            .collect()
    }

    /// Inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Argument("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or_else(|| Error::Argument("singular matrix".into()))?;
            for c in 0..n {
                a.data.swap(col * n + c, pivot * n + c);
                inv.data.swap(col * n + c, pivot * n + c);
            }
            let scale = S::one() / a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() * scale.clone();
                inv[(col, c)] = inv[(col, c)].clone() * scale.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in 0..n {
                    a[(r, c)] = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    inv[(r, c)] = inv[(r, c)].clone() - factor.clone() * inv[(col, c)].clone();
                }
            }
        }
        Ok(inv)
    }
}

/// A sparse linear equation `Σ_j row[j]·u_j = rhs`.
#[derive(Debug, Clone)]
pub struct SparseRow<S> {
    pub coeffs: BTreeMap<usize, S>,
    pub rhs: S,
}

/// Solves a sparse linear system exactly.
///
/// Returns one solution with all free unknowns set to zero, or `None` if the
/// system is inconsistent.
pub fn solve_sparse<S: Scalar>(unknowns: usize, equations: Vec<SparseRow<S>>) -> Option<Vec<S>> {
    // reduced rows keyed by pivot column
    let mut pivots: BTreeMap<usize, SparseRow<S>> = BTreeMap::new();
    for mut row in equations {
        row.coeffs.retain(|_, c| !c.is_zero());
        while let Some(lead) = row.coeffs.keys().find(|k| pivots.contains_key(k)).copied() {
            let factor = row.coeffs[&lead].clone();
            let pivot_row = &pivots[&lead];
            for (k, c) in &pivot_row.coeffs {
                let entry = row.coeffs.entry(*k).or_insert_with(S::zero);
                *entry = entry.clone() - factor.clone() * c.clone();
            }
            row.rhs = row.rhs.clone() - factor * pivot_row.rhs.clone();
            row.coeffs.retain(|_, c| !c.is_zero());
        }
        let Some((&lead, lead_coeff)) = row.coeffs.iter().next() else {
            if row.rhs.is_zero() {
                continue;
            }
            return None;
        };
        let inv = S::one() / lead_coeff.clone();
        for c in row.coeffs.values_mut() {
            *c = c.clone() * inv.clone();
        }
        row.rhs = row.rhs * inv;
        // keep existing pivot rows reduced with respect to the new pivot
        for other in pivots.values_mut() {
            if let Some(f) = other.coeffs.get(&lead).cloned() {
                for (k, c) in &row.coeffs {
                    let entry = other.coeffs.entry(*k).or_insert_with(S::zero);
                    *entry = entry.clone() - f.clone() * c.clone();
                }
                other.rhs = other.rhs.clone() - f * row.rhs.clone();
                other.coeffs.retain(|_, c| !c.is_zero());
            }
        }
        pivots.insert(lead, row);
    }
    let mut solution = vec![S::zero(); unknowns];
    for (&lead, row) in &pivots {
        solution[lead] = row.rhs.clone();
    }
    Some(solution)
}
