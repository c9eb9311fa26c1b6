//! Matrix-valued polynomials in the edge variable `y`.

use crate::error::{Error, Result};
use crate::mero::linalg::{binomial, zeros, CMatrix};
use num_complex::Complex64;

/// `sum_e c_e y^e` over multi-indices `e` of length `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct YPoly {
    pub q: usize,
    pub size: usize,
    terms: Vec<(Vec<u32>, CMatrix)>,
}

impl YPoly {
    pub fn new(q: usize, size: usize, terms: Vec<(Vec<u32>, CMatrix)>) -> Result<Self> {
        let mut out = Self { q, size, terms: Vec::new() };
        for (e, c) in terms {
            if e.len() != q {
                return Err(Error::DimensionMismatch(format!("y-exponent of length {} for q = {q}", e.len())));
            }
            if c.shape() != (size, size) {
                return Err(Error::DimensionMismatch(format!("y-coefficient of shape {:?}", c.shape())));
            }
            out.push(e, c);
        }
        Ok(out)
    }

    /// Constant polynomial.
    pub fn constant(q: usize, c: CMatrix) -> Self {
        let size = c.nrows();
        Self { q, size, terms: vec![(vec![0; q], c)] }
    }

    fn push(&mut self, e: Vec<u32>, c: CMatrix) {
        match self.terms.iter_mut().find(|(f, _)| *f == e) {
            Some((_, d)) => *d += c,
            None => self.terms.push((e, c)),
        }
    }

    pub fn terms(&self) -> &[(Vec<u32>, CMatrix)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(e, c)| e.iter().all(|&x| x == 0) || c.iter().all(|z| z.norm() == 0.0))
    }

    pub fn eval(&self, y: &[f64]) -> CMatrix {
        let mut out = zeros(self.size, self.size);
        for (e, c) in &self.terms {
            let w: f64 = e.iter().zip(y).map(|(&k, v)| v.powi(k as i32)).product();
            out += c * Complex64::from(w);
        }
        out
    }

    /// Taylor coefficients at `y0`: pairs `(beta, c)` with `p(y0 + d) = sum c d^beta`.
    pub fn expand_at(&self, y0: &[f64]) -> Vec<(Vec<u32>, CMatrix)> {
        let mut out: Vec<(Vec<u32>, CMatrix)> = Vec::new();
        for (e, c) in &self.terms {
            let mut parts: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
            for (v, &k) in e.iter().enumerate() {
                let mut next = Vec::new();
                for (b, w) in &parts {
                    for t in 0..=k {
                        let mut b2 = b.clone();
                        b2.push(t);
                        next.push((b2, w * binomial(k as usize, t as usize) * y0[v].powi((k - t) as i32)));
                    }
                }
                parts = next;
            }
            for (b, w) in parts {
                let add = c * Complex64::from(w);
                match out.iter_mut().find(|(f, _)| *f == b) {
                    Some((_, d)) => *d += add,
                    None => out.push((b, add)),
                }
            }
        }
        out
    }

    /// Product with a scalar polynomial `sum s_e y^e`.
    pub fn scale_by(&self, s: &[(Vec<u32>, f64)]) -> Self {
        let mut out = Self { q: self.q, size: self.size, terms: Vec::new() };
        for (e, c) in &self.terms {
            for (f, w) in s {
                let g: Vec<u32> = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.push(g, c * Complex64::from(*w));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::c64;

    #[test]
    fn expansion_reproduces_values() {
        let c = |x: f64| CMatrix::from_element(1, 1, c64(x, 0.0));
        let p = YPoly::new(2, 1, vec![(vec![2, 1], c(1.5)), (vec![0, 3], c(-2.0)), (vec![0, 0], c(0.5))]).unwrap();
        let y0 = [0.3, -0.7];
        let d: [f64; 2] = [0.11, 0.05];
        let ex = p.expand_at(&y0);
        let v: Complex64 = ex
            .iter()
            .map(|(b, c)| c[(0, 0)] * d[0].powi(b[0] as i32) * d[1].powi(b[1] as i32))
            .sum();
        let direct = p.eval(&[y0[0] + d[0], y0[1] + d[1]])[(0, 0)];
        assert!((v - direct).norm() < 1e-14);
    }
}
