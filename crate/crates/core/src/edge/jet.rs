//! Truncated multivariate Taylor jets with matrix coefficients.

use crate::error::{Error, Result};
use crate::mero::linalg::{inverse, zeros, CMatrix};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

/// Monomials `d^m` of total degree at most `order` in `vars` variables.
#[derive(Debug)]
pub struct JetSpace {
    pub vars: usize,
    pub order: usize,
    monos: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl JetSpace {
    pub fn new(vars: usize, order: usize) -> Arc<Self> {
        let mut monos: Vec<Vec<u8>> = vec![vec![0; vars]];
        for deg in 1..=order {
            let mut cur = Vec::new();
            enumerate(vars, deg, &mut Vec::new(), &mut cur);
            monos.extend(cur);
        }
        let index = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Arc::new(Self { vars, order, monos, index })
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monos[i]
    }

    pub fn position(&self, m: &[u8]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

fn enumerate(vars: usize, deg: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() + 1 == vars {
        let mut m = prefix.clone();
        m.push(deg as u8);
        out.push(m);
        return;
    }
    if vars == 0 {
        return;
    }
    for d in (0..=deg).rev() {
        prefix.push(d as u8);
        enumerate(vars, deg - d, prefix, out);
        prefix.pop();
    }
}

fn degree(m: &[u8]) -> usize {
    m.iter().map(|&x| x as usize).sum()
}

/// `sum_m c_m d^m`, exact through total degree `valid`.
#[derive(Clone, Debug)]
pub struct Jet {
    space: Arc<JetSpace>,
    pub size: usize,
    pub valid: usize,
    coeffs: Vec<CMatrix>,
}

impl Jet {
    pub fn zero(space: &Arc<JetSpace>, size: usize) -> Self {
        Self { space: space.clone(), size, valid: space.order, coeffs: vec![zeros(size, size); space.len()] }
    }

    pub fn constant(space: &Arc<JetSpace>, c: CMatrix) -> Self {
        let mut j = Self::zero(space, c.nrows());
        j.coeffs[0] = c;
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn value(&self) -> &CMatrix {
        &self.coeffs[0]
    }

    pub fn coeff(&self, m: &[u8]) -> Option<&CMatrix> {
        self.space.position(m).map(|i| &self.coeffs[i])
    }

    /// Adds `c d^m`; ignored beyond the space order.
    pub fn add_monomial(&mut self, m: &[u8], c: &CMatrix) {
        if let Some(i) = self.space.position(m) {
            self.coeffs[i] += c;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        out.valid = self.valid.min(other.valid);
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= s;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let valid = self.valid.min(other.valid);
        let mut out = Self::zero(&self.space, self.size);
        out.valid = valid;
        let sp = &self.space;
        let mut m = vec![0u8; sp.vars];
        for (i, a) in self.coeffs.iter().enumerate() {
            let ma = sp.monomial(i);
            let da = degree(ma);
            if da > valid || a.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let mb = sp.monomial(j);
                if da + degree(mb) > valid {
                    continue;
                }
                for v in 0..sp.vars {
                    m[v] = ma[v] + mb[v];
                }
                let k = sp.position(&m).expect("degree within order");
                out.coeffs[k] += a * b;
            }
        }
        out
    }

    /// Partial derivative in variable `v`.
    pub fn deriv(&self, v: usize) -> Self {
        let sp = &self.space;
        let mut out = Self::zero(sp, self.size);
        out.valid = self.valid.saturating_sub(1);
        let mut m = vec![0u8; sp.vars];
        for (i, c) in self.coeffs.iter().enumerate() {
            let mi = sp.monomial(i);
            if mi[v] == 0 || degree(mi) > self.valid {
                continue;
            }
            m.copy_from_slice(mi);
            m[v] -= 1;
            let k = sp.position(&m).expect("lower monomial");
            out.coeffs[k] += c * Complex64::from(mi[v] as f64);
        }
        out
    }

    /// Product with the scalar `c0 + d_v`.
    pub fn times_linear(&self, v: usize, c0: f64) -> Self {
        let sp = &self.space;
        let mut out = self.scale(Complex64::from(c0));
        let mut m = vec![0u8; sp.vars];
        for (i, c) in self.coeffs.iter().enumerate() {
            let mi = sp.monomial(i);
            m.copy_from_slice(mi);
            m[v] += 1;
            if let Some(k) = sp.position(&m) {
                out.coeffs[k] += c;
            }
        }
        out
    }

    /// Inverse by the Neumann series around the constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = inverse(&self.coeffs[0]).ok_or_else(|| Error::Numerical("jet with singular value".into()))?;
        let mut n = self.clone();
        n.coeffs[0] = zeros(self.size, self.size);
        let step = Self::constant(&self.space, -c0.clone()).mul(&n);
        let mut term = Self::constant(&self.space, c0.clone());
        term.valid = self.valid;
        let mut acc = term.clone();
        for _ in 0..self.valid {
            term = step.mul(&term);
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}
