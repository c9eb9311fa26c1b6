//! Discrete asymptotic types.

use crate::cone::model::weight_line;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Tolerance for identifying exponents.
pub const POINT_TOL: f64 = 1e-8;

/// Exponent `p` (term `r^{-p} log^k r`, `k <= m`) of an asymptotic type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticPoint {
    pub p: Complex64,
    pub m: usize,
}

/// Finite set of `(p_j, m_j)` in the strip
/// `(n+1)/2 - gamma + theta < Re z < (n+1)/2 - gamma`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticType {
    points: Vec<AsymptoticPoint>,
    pub gamma: f64,
    pub theta: f64,
    pub n: usize,
}

impl AsymptoticType {
    pub fn new(points: Vec<AsymptoticPoint>, gamma: f64, theta: f64, n: usize) -> Result<Self> {
        if !(theta <= 0.0) {
            return Err(Error::InvalidInput(format!("theta = {theta} must be non-positive")));
        }
        let mut t = Self { points: Vec::new(), gamma, theta, n };
        for pt in points {
            if !t.in_strip(pt.p) {
                return Err(Error::InvalidInput(format!(
                    "exponent {} outside the strip ({}, {})",
                    pt.p,
                    t.lower_line(),
                    t.upper_line()
                )));
            }
            t.insert(pt);
        }
        t.sort();
        Ok(t)
    }

    pub fn empty(gamma: f64, theta: f64, n: usize) -> Self {
        Self { points: Vec::new(), gamma, theta, n }
    }

    pub fn points(&self) -> &[AsymptoticPoint] {
        &self.points
    }

    pub fn upper_line(&self) -> f64 {
        weight_line(self.n, self.gamma)
    }

    pub fn lower_line(&self) -> f64 {
        self.upper_line() + self.theta
    }

    pub fn in_strip(&self, p: Complex64) -> bool {
        p.re < self.upper_line() + POINT_TOL && p.re > self.lower_line() - POINT_TOL
    }

    fn insert(&mut self, pt: AsymptoticPoint) {
        match self.points.iter_mut().find(|q| (q.p - pt.p).norm() <= POINT_TOL) {
            Some(q) => q.m = q.m.max(pt.m),
            None => self.points.push(pt),
        }
    }

    fn sort(&mut self) {
        self.points.sort_by(|a, b| {
            b.p.re
                .partial_cmp(&a.p.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.p.im.partial_cmp(&b.p.im).unwrap_or(std::cmp::Ordering::Equal))
        });
    }

    /// Whether `r^{-p} log^k r` is admitted.
    pub fn contains(&self, p: Complex64, k: usize) -> bool {
        self.points.iter().any(|q| (q.p - p).norm() <= POINT_TOL && k <= q.m)
    }

    /// Closure under `p -> p - j`, `j >= 1`, within the strip.
    pub fn shadow_closure(&self) -> Result<Self> {
        if !self.theta.is_finite() {
            return Err(Error::InfiniteStrip("shadow closure of an infinite strip is infinite".into()));
        }
        let lower = self.lower_line();
        let mut out = Self::empty(self.gamma, self.theta, self.n);
        for pt in &self.points {
            let mut q = pt.p;
            while q.re > lower - POINT_TOL {
                out.insert(AsymptoticPoint { p: q, m: pt.m });
                q -= 1.0;
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || (self.gamma - other.gamma).abs() > 1e-12 || self.theta != other.theta {
            return Err(Error::Incompatible("asymptotic types with different ambient data".into()));
        }
        let mut out = self.clone();
        for pt in &other.points {
            out.insert(*pt);
        }
        out.sort();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::c64;
    use proptest::prelude::*;

    #[test]
    fn shadow_closure_of_two_points() {
        let t = AsymptoticType::new(
            vec![AsymptoticPoint { p: c64(0.2, 0.0), m: 0 }, AsymptoticPoint { p: c64(-0.5, 0.0), m: 1 }],
            0.0,
            -3.0,
            0,
        )
        .unwrap();
        let s = t.shadow_closure().unwrap();
        let got: Vec<(f64, usize)> = s.points().iter().map(|q| (q.p.re, q.m)).collect();
        let expect = [(0.2, 0), (-0.5, 1), (-0.8, 0), (-1.5, 1), (-1.8, 0), (-2.5, 1)];
        assert_eq!(got.len(), expect.len());
        for (a, b) in got.iter().zip(expect) {
            assert!((a.0 - b.0).abs() < 1e-12 && a.1 == b.1);
        }
    }

    #[test]
    fn infinite_strip_has_no_closure() {
        let t = AsymptoticType::empty(0.0, f64::NEG_INFINITY, 0);
        assert!(matches!(t.shadow_closure(), Err(Error::InfiniteStrip(_))));
    }

    #[test]
    fn points_outside_strip_are_rejected() {
        assert!(AsymptoticType::new(vec![AsymptoticPoint { p: c64(1.0, 0.0), m: 0 }], 0.0, -3.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn closure_is_idempotent(ps in proptest::collection::vec((-2.49f64..0.49, -1.0f64..1.0, 0usize..3), 0..5)) {
            let pts = ps.iter().map(|&(re, im, m)| AsymptoticPoint { p: c64(re, im), m }).collect();
            let t = AsymptoticType::new(pts, 0.0, -3.0, 0).unwrap();
            let a = t.shadow_closure().unwrap();
            let b = a.shadow_closure().unwrap();
            prop_assert_eq!(a.points().len(), b.points().len());
            for pt in b.points() {
                prop_assert!(a.contains(pt.p, pt.m));
            }
        }
    }
}
