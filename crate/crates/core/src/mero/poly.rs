//! Matrix polynomials `h(z) = sum_j A_j z^j`.

use super::linalg::{binomial, cpow, eye, is_zero, norm, zeros, CMatrix, ONE, ZERO};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Matrix polynomial with coefficient `coeffs[j]` multiplying `z^j`.
/// Trailing zero coefficients are trimmed; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPolynomial {
    rows: usize,
    cols: usize,
    coeffs: Vec<CMatrix>,
}

impl MatPolynomial {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidInput("empty coefficient list".into()))?;
        let (rows, cols) = first.shape();
        Self::with_shape(rows, cols, coeffs)
    }

    pub fn with_shape(rows: usize, cols: usize, coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.iter().any(|c| c.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch("coefficients of unequal size".into()));
        }
        if coeffs.iter().flat_map(|c| c.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let mut p = Self { rows, cols, coeffs };
        p.trim_exact();
        Ok(p)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, coeffs: Vec<CMatrix>) -> Self {
        let mut p = Self { rows, cols, coeffs };
        p.trim_exact();
        p
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, coeffs: Vec::new() }
    }

    pub fn constant(m: CMatrix) -> Self {
        let (rows, cols) = m.shape();
        Self::from_raw(rows, cols, vec![m])
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(eye(n))
    }

    /// `p(z) I` for a scalar polynomial with coefficients `c[j]` of `z^j`.
    pub fn scalar(n: usize, c: &[Complex64]) -> Self {
        Self::from_raw(n, n, c.iter().map(|&a| CMatrix::from_diagonal_element(n, n, a)).collect())
    }

    /// Scalar polynomial `prod_i (z - r_i)` times the identity.
    pub fn from_roots(n: usize, roots: &[Complex64]) -> Self {
        let mut c = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (j, &a) in c.iter().enumerate() {
                next[j + 1] += a;
                next[j] -= a * r;
            }
            c = next;
        }
        Self::scalar(n, &c)
    }

    /// Diagonal polynomial with entry `i` equal to `diag[i](z)`.
    pub fn diagonal(diag: &[Vec<Complex64>]) -> Self {
        let n = diag.len();
        let deg = diag.iter().map(|d| d.len()).max().unwrap_or(0);
        let coeffs = (0..deg)
            .map(|j| {
                let mut m = zeros(n, n);
                for (i, d) in diag.iter().enumerate() {
                    if let Some(&a) = d.get(j) {
                        m[(i, i)] = a;
                    }
                }
                m
            })
            .collect();
        Self::from_raw(n, n, coeffs)
    }

    fn trim_exact(&mut self) {
        while self.coeffs.last().map(is_zero).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    /// Drops trailing coefficients whose norm is below `rel` times the largest.
    pub fn trim_relative(mut self, rel: f64) -> Self {
        let scale = self.coeffs.iter().map(norm).fold(0.0, f64::max);
        while let Some(last) = self.coeffs.last() {
            if norm(last) <= rel * scale {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> CMatrix {
        self.coeffs.get(j).cloned().unwrap_or_else(|| zeros(self.rows, self.cols))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> CMatrix {
        self.coeffs.last().cloned().unwrap_or_else(|| zeros(self.rows, self.cols))
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        let mut acc = zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c * Complex64::from(j as f64))
            .collect();
        Self::from_raw(self.rows, self.cols, coeffs)
    }

    /// Coefficients of `(z - p)^s` for `s < count`.
    pub fn taylor_at(&self, p: Complex64, count: usize) -> Vec<CMatrix> {
        (0..count)
            .map(|s| {
                let mut acc = zeros(self.rows, self.cols);
                for j in (s..self.coeffs.len()).rev() {
                    acc += &self.coeffs[j] * (cpow(p, j - s) * binomial(j, s));
                }
                acc
            })
            .collect()
    }

    /// `z -> h(z + beta)`.
    pub fn translate(&self, beta: Complex64) -> Self {
        if beta == ZERO {
            return self.clone();
        }
        let t = self.taylor_at(beta, self.coeffs.len());
        Self::from_raw(self.rows, self.cols, t)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_raw(self.rows, self.cols, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in polynomial sum");
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j) + other.coeff(j)).collect();
        Self::from_raw(self.rows, self.cols, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in polynomial product");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.rows, other.cols);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![zeros(self.rows, other.cols); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_raw(self.rows, other.cols, coeffs)
    }

    pub fn left_mul(&self, m: &CMatrix) -> Self {
        Self::from_raw(m.nrows(), self.cols, self.coeffs.iter().map(|c| m * c).collect())
    }

    pub fn right_mul(&self, m: &CMatrix) -> Self {
        Self::from_raw(self.rows, m.ncols(), self.coeffs.iter().map(|c| c * m).collect())
    }

    /// `z^shift h(z)`.
    pub fn shift_up(&self, shift: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![zeros(self.rows, self.cols); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_raw(self.rows, self.cols, coeffs)
    }

    /// Restriction to the index set `idx` (rows and columns).
    pub fn block(&self, idx: &[usize]) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| CMatrix::from_fn(idx.len(), idx.len(), |i, j| c[(idx[i], idx[j])]))
            .collect();
        Self::from_raw(idx.len(), idx.len(), coeffs)
    }

    pub fn is_diagonal(&self) -> bool {
        self.coeffs.iter().all(|c| {
            (0..c.nrows()).all(|i| (0..c.ncols()).all(|j| i == j || c[(i, j)] == ZERO))
        })
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(norm).fold(0.0, f64::max)
    }
}
