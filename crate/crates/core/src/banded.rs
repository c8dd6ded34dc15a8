//! Tridiagonal matrices and direct elimination.
//!
//! Every discretized operator in this crate couples a node only to its two
//! neighbours in `t = log x`, so the linear algebra reduces to the Thomas
//! algorithm.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square tridiagonal matrix stored by diagonals.
///
/// `lower[i]` is the entry `(i, i-1)` and `upper[i]` the entry `(i, i+1)`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Turn row `i` into the identity row (Dirichlet condition).
    pub fn pin_row(&mut self, i: usize) {
        self.lower[i] = 0.0;
        self.upper[i] = 0.0;
        self.diag[i] = 1.0;
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.lower[i] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.len();
        let mut t = Self::zeros(n);
        t.diag.clone_from(&self.diag);
        for i in 0..n.saturating_sub(1) {
            t.upper[i] = self.lower[i + 1];
            t.lower[i + 1] = self.upper[i];
        }
        t
    }

    /// Sub-matrix on rows/columns `lo..hi`.
    pub fn block(&self, lo: usize, hi: usize) -> Self {
        let mut b = Self {
            lower: self.lower[lo..hi].to_vec(),
            diag: self.diag[lo..hi].to_vec(),
            upper: self.upper[lo..hi].to_vec(),
        };
        if let Some(first) = b.lower.first_mut() {
            *first = 0.0;
        }
        if let Some(last) = b.upper.last_mut() {
            *last = 0.0;
        }
        b
    }

    /// Thomas algorithm. Fails on an exactly (or numerically) vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        if n == 0 {
            return Ok(Vec::new());
        }
        let scale = self
            .diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let tiny = f64::EPSILON * f64::EPSILON * scale.max(f64::MIN_POSITIVE);

        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot.abs() <= tiny || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: 0 });
        }
        c[0] = self.upper[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if pivot.abs() <= tiny || !pivot.is_finite() {
                return Err(Error::SingularSystem { row: i });
            }
            c[i] = if i + 1 < n { self.upper[i] / pivot } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / pivot;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }

    /// Solve with one extra entry `corner` at `(0, 2)`, eliminated against row 1 first.
    pub fn solve_with_corner(&self, corner: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        if corner == 0.0 {
            return self.solve(rhs);
        }
        if self.len() < 3 || self.upper[1] == 0.0 {
            return Err(Error::SingularSystem { row: 0 });
        }
        let c = corner / self.upper[1];
        let mut m = self.clone();
        m.diag[0] -= c * self.lower[1];
        m.upper[0] -= c * self.diag[1];
        let mut b = rhs.to_vec();
        b[0] -= c * rhs[1];
        m.solve(&b)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if j + 1 == i {
                self.lower[i]
            } else if i + 1 == j {
                self.upper[i]
            } else {
                0.0
            }
        })
    }
}
