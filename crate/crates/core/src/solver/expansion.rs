//! Finite singular expansions `sum c r^{-p} log^k r` with a flatness bound.

use crate::asymp::POINT_TOL;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Term `c r^{-p} log^k r` with a coefficient vector in the model basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    pub p: Complex64,
    pub k: usize,
    pub c: Vec<Complex64>,
}

impl ExpansionTerm {
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Terms of a singular expansion plus the exponent `flat_order`: every
/// omitted contribution is `O(r^{-q})` for all `q > flat_order`.
/// `flat_order = -inf` marks an exact expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularExpansion {
    pub size: usize,
    terms: Vec<ExpansionTerm>,
    pub flat_order: f64,
}

impl SingularExpansion {
    pub fn new(size: usize) -> Self {
        Self { size, terms: Vec::new(), flat_order: f64::NEG_INFINITY }
    }

    pub fn with_flat_order(size: usize, flat_order: f64) -> Self {
        Self { size, terms: Vec::new(), flat_order }
    }

    pub fn from_terms(size: usize, terms: Vec<ExpansionTerm>, flat_order: f64) -> Result<Self> {
        let mut out = Self::with_flat_order(size, flat_order);
        for t in terms {
            if t.c.len() != size {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient of length {} in an expansion of size {size}",
                    t.c.len()
                )));
            }
            out.add_term(t.p, t.k, &t.c);
        }
        Ok(out)
    }

    /// Single scalar term `c r^{-p} log^k r`.
    pub fn scalar_term(p: Complex64, k: usize, c: Complex64) -> Self {
        let mut s = Self::new(1);
        s.add_term(p, k, &[c]);
        s
    }

    pub fn terms(&self) -> &[ExpansionTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c r^{-p} log^k r`, merging with an existing term at the same point.
    pub fn add_term(&mut self, p: Complex64, k: usize, c: &[Complex64]) {
        assert_eq!(c.len(), self.size, "coefficient length");
        if let Some(t) = self.terms.iter_mut().find(|t| t.k == k && (t.p - p).norm() <= POINT_TOL) {
            for (a, b) in t.c.iter_mut().zip(c) {
                *a += b;
            }
        } else {
            self.terms.push(ExpansionTerm { p, k, c: c.to_vec() });
        }
    }

    /// Sorts by decreasing `Re p`, then increasing `Im p`, then decreasing `k`.
    pub fn normalize(&mut self) {
        self.terms.sort_by(|a, b| {
            b.p.re
                .partial_cmp(&a.p.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.p.im.partial_cmp(&b.p.im).unwrap_or(std::cmp::Ordering::Equal))
                .then(b.k.cmp(&a.k))
        });
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.norm()).fold(0.0, f64::max)
    }

    /// Drops terms with norm at most `abs_tol`.
    pub fn prune(mut self, abs_tol: f64) -> Self {
        self.terms.retain(|t| t.norm() > abs_tol);
        self
    }

    /// Drops terms with `Re p <= cutoff` and raises the flat order to `cutoff`.
    pub fn truncate_at(mut self, cutoff: f64) -> Self {
        self.terms.retain(|t| t.p.re > cutoff + POINT_TOL);
        self.flat_order = self.flat_order.max(cutoff);
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.size, other.size, "expansion sizes");
        let mut out = self.clone();
        for t in &other.terms {
            out.add_term(t.p, t.k, &t.c);
        }
        out.flat_order = self.flat_order.max(other.flat_order);
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for t in out.terms.iter_mut() {
            for c in t.c.iter_mut() {
                *c *= s;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Component `m` as a scalar expansion.
    pub fn component(&self, m: usize) -> Self {
        let mut out = Self::with_flat_order(1, self.flat_order);
        for t in &self.terms {
            if t.c[m] != Complex64::new(0.0, 0.0) {
                out.add_term(t.p, t.k, &[t.c[m]]);
            }
        }
        out
    }

    /// Embeds a scalar expansion as component `m` of a size-`size` expansion.
    pub fn embed(&self, size: usize, m: usize) -> Self {
        let mut out = Self::with_flat_order(size, self.flat_order);
        for t in &self.terms {
            let mut c = vec![Complex64::new(0.0, 0.0); size];
            c[m] = t.c[0];
            out.add_term(t.p, t.k, &c);
        }
        out
    }

    pub fn coefficient(&self, p: Complex64, k: usize) -> Option<&[Complex64]> {
        self.terms.iter().find(|t| t.k == k && (t.p - p).norm() <= POINT_TOL).map(|t| t.c.as_slice())
    }

    /// Largest exponent real part among the terms.
    pub fn leading_exponent(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.p.re).fold(None, |a, x| Some(a.map_or(x, |y: f64| y.max(x))))
    }

    /// Value at `r > 0`.
    pub fn eval(&self, r: f64) -> Vec<Complex64> {
        let l = r.ln();
        let mut out = vec![Complex64::new(0.0, 0.0); self.size];
        for t in &self.terms {
            let w = (-t.p * l).exp() * l.powi(t.k as i32);
            for (o, c) in out.iter_mut().zip(&t.c) {
                *o += c * w;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::c64;
    use proptest::prelude::*;

    #[test]
    fn merging_and_sorting() {
        let mut s = SingularExpansion::new(1);
        s.add_term(c64(0.5, 0.0), 0, &[c64(1.0, 0.0)]);
        s.add_term(c64(1.5, 0.0), 1, &[c64(2.0, 0.0)]);
        s.add_term(c64(0.5 + 1e-12, 0.0), 0, &[c64(1.0, 0.0)]);
        let s = s.normalized();
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.terms()[0].p, c64(1.5, 0.0));
        assert_eq!(s.terms()[1].c[0], c64(2.0, 0.0));
    }

    #[test]
    fn truncation_raises_flat_order() {
        let mut s = SingularExpansion::new(1);
        s.add_term(c64(0.5, 0.0), 0, &[c64(1.0, 0.0)]);
        s.add_term(c64(-2.5, 0.0), 0, &[c64(1.0, 0.0)]);
        let t = s.truncate_at(-1.0);
        assert_eq!(t.terms().len(), 1);
        assert_eq!(t.flat_order, -1.0);
    }

    #[test]
    fn eval_of_log_term() {
        let s = SingularExpansion::scalar_term(c64(-1.0, 0.0), 1, c64(2.0, 0.0));
        let r: f64 = 0.3;
        assert!((s.eval(r)[0] - c64(2.0 * r * r.ln(), 0.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn add_then_sub_is_zero(ps in proptest::collection::vec((-3.0f64..1.0, 0usize..3, -2.0f64..2.0), 1..6)) {
            let mut s = SingularExpansion::new(1);
            for &(p, k, c) in &ps {
                s.add_term(c64(p, 0.0), k, &[c64(c, 0.0)]);
            }
            let d = s.sub(&s);
            prop_assert!(d.max_abs() == 0.0);
        }
    }
}
