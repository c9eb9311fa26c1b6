//! Meromorphic matrix functions in partial-fraction form:
//! a matrix polynomial plus finitely many principal parts.

use super::linalg::{binomial, cpow, eye, norm, rank, zeros, CMatrix, ONE};
use super::poly::MatPolynomial;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Principal part `sum_k principal[k] (z - location)^{-(k+1)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleDatum {
    pub location: Complex64,
    pub principal: Vec<CMatrix>,
}

impl PoleDatum {
    pub fn order(&self) -> usize {
        self.principal.len()
    }

    /// Numerical ranks of the principal coefficients, highest power last.
    pub fn ranks(&self) -> Vec<usize> {
        self.principal.iter().map(|c| rank(c, 1e-10)).collect()
    }

    fn eval(&self, z: Complex64) -> CMatrix {
        let w = ONE / (z - self.location);
        let mut acc = zeros(self.principal[0].nrows(), self.principal[0].ncols());
        let mut wp = w;
        for c in &self.principal {
            acc += c * wp;
            wp *= w;
        }
        acc
    }
}

/// Laurent coefficients `coeffs[i]` of `(z - p)^{min_power + i}`.
#[derive(Clone, Debug)]
pub struct Laurent {
    pub min_power: i64,
    pub coeffs: Vec<CMatrix>,
    rows: usize,
    cols: usize,
}

impl Laurent {
    pub fn coeff(&self, power: i64) -> CMatrix {
        let i = power - self.min_power;
        if i < 0 || i as usize >= self.coeffs.len() {
            zeros(self.rows, self.cols)
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    pub fn max_power(&self) -> i64 {
        self.min_power + self.coeffs.len() as i64 - 1
    }
}

/// Tolerances for pole identification and cancellation.
#[derive(Clone, Copy, Debug)]
pub struct MeroTol {
    /// Poles within `merge_rel * (1 + |p|)` are the same point.
    pub merge_rel: f64,
    /// Principal coefficients below `cancel_rel` times the magnitude of their
    /// contributions are treated as cancelled.
    pub cancel_rel: f64,
}

impl Default for MeroTol {
    fn default() -> Self {
        Self { merge_rel: 1e-8, cancel_rel: 1e-11 }
    }
}

/// Meromorphic matrix function `poly(z) + sum over poles of principal parts`.
#[derive(Clone, Debug)]
pub struct MeroMatrix {
    rows: usize,
    cols: usize,
    poly: MatPolynomial,
    poles: Vec<PoleDatum>,
    /// Strip `(lo, hi)` in `Re z` where the realization is valid; `None` for entire data.
    pub valid_strip: Option<(f64, f64)>,
}

pub(crate) fn same_point(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + a.norm().max(b.norm()))
}

impl MeroMatrix {
    pub fn new(poly: MatPolynomial, poles: Vec<PoleDatum>) -> Result<Self> {
        let (rows, cols) = poly.shape();
        for p in &poles {
            if p.principal.is_empty() || p.principal.iter().any(|c| c.shape() != (rows, cols)) {
                return Err(Error::DimensionMismatch("principal part shape".into()));
            }
        }
        let mut out = Self { rows, cols, poly, poles: Vec::new(), valid_strip: None };
        for p in poles {
            out.accumulate_pole(p, MeroTol::default().merge_rel);
        }
        out.drop_vanishing(0.0);
        Ok(out)
    }

    pub fn from_poly(poly: MatPolynomial) -> Self {
        let (rows, cols) = poly.shape();
        Self { rows, cols, poly, poles: Vec::new(), valid_strip: None }
    }

    pub fn constant(m: CMatrix) -> Self {
        Self::from_poly(MatPolynomial::constant(m))
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(eye(n))
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::from_poly(MatPolynomial::zero(rows, cols))
    }

    /// `c / (z - p)^order` for a constant matrix `c`.
    pub fn simple_pole(p: Complex64, order: usize, c: CMatrix) -> Self {
        let (rows, cols) = c.shape();
        let mut principal = vec![zeros(rows, cols); order];
        principal[order - 1] = c;
        Self {
            rows,
            cols,
            poly: MatPolynomial::zero(rows, cols),
            poles: vec![PoleDatum { location: p, principal }],
            valid_strip: None,
        }
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

    pub fn poly(&self) -> &MatPolynomial {
        &self.poly
    }

    pub fn poles(&self) -> &[PoleDatum] {
        &self.poles
    }

    pub fn pole_locations(&self) -> Vec<Complex64> {
        self.poles.iter().map(|p| p.location).collect()
    }

    pub fn is_polynomial(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.poles.is_empty() && self.poly.is_zero()
    }

    pub fn max_pole_order(&self) -> usize {
        self.poles.iter().map(|p| p.order()).max().unwrap_or(0)
    }

    fn accumulate_pole(&mut self, p: PoleDatum, rel: f64) {
        if let Some(q) = self.poles.iter_mut().find(|q| same_point(q.location, p.location, rel)) {
            if q.principal.len() < p.principal.len() {
                q.principal.resize(p.principal.len(), zeros(self.rows, self.cols));
            }
            for (a, b) in q.principal.iter_mut().zip(p.principal) {
                *a += b;
            }
        } else {
            self.poles.push(p);
        }
    }

    /// Trims leading principal coefficients with norm at most `abs_tol` and
    /// drops poles whose principal part vanishes entirely.
    fn drop_vanishing(&mut self, abs_tol: f64) {
        for p in self.poles.iter_mut() {
            while p.principal.last().map(|c| norm(c) <= abs_tol).unwrap_or(false) {
                p.principal.pop();
            }
        }
        self.poles.retain(|p| !p.principal.is_empty());
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        let mut acc = self.poly.eval(z);
        if acc.shape() != (self.rows, self.cols) {
            acc = zeros(self.rows, self.cols);
        }
        for p in &self.poles {
            acc += p.eval(z);
        }
        acc
    }

    /// Sum of the norms of the terms added up by `eval` at `z`; bounds `|eval(z)|`
    /// and sets the scale of its rounding error.
    pub fn eval_bound(&self, z: Complex64) -> f64 {
        let mut acc = 0.0;
        let mut zj = 1.0;
        for c in self.poly.coeffs() {
            acc += norm(c) * zj;
            zj *= z.norm();
        }
        for p in &self.poles {
            let d = (z - p.location).norm();
            for (k, c) in p.principal.iter().enumerate() {
                acc += norm(c) / d.powi(k as i32 + 1);
            }
        }
        acc
    }

    /// Laurent expansion at `p` with powers from `-order` up to `max_power`.
    pub fn laurent_at(&self, p: Complex64, max_power: i64) -> Result<Laurent> {
        self.laurent_at_tol(p, max_power, MeroTol::default().merge_rel)
    }

    pub fn laurent_at_tol(&self, p: Complex64, max_power: i64, merge_rel: f64) -> Result<Laurent> {
        let hits: Vec<usize> = (0..self.poles.len())
            .filter(|&i| same_point(self.poles[i].location, p, merge_rel))
            .collect();
        if hits.len() > 1 {
            return Err(Error::AmbiguousPole(p));
        }
        let order = hits.first().map(|&i| self.poles[i].order()).unwrap_or(0) as i64;
        let len = (max_power + order + 1).max(0) as usize;
        let mut coeffs = vec![zeros(self.rows, self.cols); len];
        if let Some(&i) = hits.first() {
            for (k, c) in self.poles[i].principal.iter().enumerate() {
                let idx = order - (k as i64 + 1);
                if (idx as usize) < len {
                    coeffs[idx as usize] += c;
                }
            }
        }
        if max_power >= 0 {
            let taylor_len = max_power as usize + 1;
            let t = self.poly.taylor_at(p, taylor_len);
            for (s, ts) in t.into_iter().enumerate() {
                if ts.shape() == (self.rows, self.cols) {
                    coeffs[order as usize + s] += ts;
                }
            }
            for (i, q) in self.poles.iter().enumerate() {
                if hits.contains(&i) {
                    continue;
                }
                let d = p - q.location;
                for (k, c) in q.principal.iter().enumerate() {
                    let n = k + 1;
                    for s in 0..taylor_len {
                        // binom(-n, s) (p - q)^{-n-s}
                        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                        let f = binomial(n + s - 1, s) * sign / cpow(d, n + s);
                        coeffs[order as usize + s] += c * f;
                    }
                }
            }
        }
        Ok(Laurent { min_power: -order, coeffs, rows: self.rows, cols: self.cols })
    }

    /// `z -> f(z + beta)`.
    pub fn translate(&self, beta: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            poly: self.poly.translate(beta),
            poles: self
                .poles
                .iter()
                .map(|p| PoleDatum { location: p.location - beta, principal: p.principal.clone() })
                .collect(),
            valid_strip: self.valid_strip.map(|(a, b)| (a - beta.re, b - beta.re)),
        }
    }

    pub fn translate_real(&self, beta: f64) -> Self {
        self.translate(Complex64::new(beta, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.poly = out.poly.scale(s);
        for p in out.poles.iter_mut() {
            for c in p.principal.iter_mut() {
                *c *= s;
            }
        }
        out.drop_vanishing(0.0);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-ONE)
    }

    pub fn left_mul_matrix(&self, m: &CMatrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: self.cols,
            poly: self.poly.left_mul(m),
            poles: self
                .poles
                .iter()
                .map(|p| PoleDatum {
                    location: p.location,
                    principal: p.principal.iter().map(|c| m * c).collect(),
                })
                .collect(),
            valid_strip: self.valid_strip,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_tol(other, MeroTol::default())
    }

    pub fn add_tol(&self, other: &Self, tol: MeroTol) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in meromorphic sum");
        let mut out = Self {
            rows: self.rows,
            cols: self.cols,
            poly: self.poly.add(&other.poly),
            poles: self.poles.clone(),
            valid_strip: intersect(self.valid_strip, other.valid_strip),
        };
        let mut scale: Vec<f64> = out.poles.iter().map(|p| p.principal.iter().map(norm).fold(0.0, f64::max)).collect();
        for p in &other.poles {
            let m = p.principal.iter().map(norm).fold(0.0, f64::max);
            match out.poles.iter().position(|q| same_point(q.location, p.location, tol.merge_rel)) {
                Some(i) => scale[i] = scale[i].max(m),
                None => scale.push(m),
            }
            out.accumulate_pole(p.clone(), tol.merge_rel);
        }
        for (p, s) in out.poles.iter_mut().zip(scale) {
            while p.principal.last().map(|c| norm(c) <= tol.cancel_rel * s).unwrap_or(false) {
                p.principal.pop();
            }
        }
        out.poles.retain(|p| !p.principal.is_empty());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_tol(other, MeroTol::default())
    }

    pub fn mul_tol(&self, other: &Self, tol: MeroTol) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in meromorphic product");
        let (rows, cols) = (self.rows, other.cols);
        let mut points: Vec<(Complex64, usize, usize)> = Vec::new();
        for p in &self.poles {
            points.push((p.location, p.order(), 0));
        }
        for q in &other.poles {
            match points.iter_mut().find(|x| same_point(x.0, q.location, tol.merge_rel)) {
                Some(x) => x.2 = q.order(),
                None => points.push((q.location, 0, q.order())),
            }
        }
        let mut poles = Vec::new();
        for &(p, mf, mg) in &points {
            let lf = self.laurent_at_tol(p, mg as i64 - 1, tol.merge_rel).expect("pole set is separated");
            let lg = other.laurent_at_tol(p, mf as i64 - 1, tol.merge_rel).expect("pole set is separated");
            let total = mf + mg;
            let mut principal = Vec::with_capacity(total);
            let mut magnitude = Vec::with_capacity(total);
            for k in 1..=total as i64 {
                let mut acc = zeros(rows, cols);
                let mut mag = 0.0;
                for a in -(mf as i64)..=(mg as i64 - 1) {
                    let b = -k - a;
                    if b < -(mg as i64) || b > mf as i64 - 1 {
                        continue;
                    }
                    let fa = lf.coeff(a);
                    let gb = lg.coeff(b);
                    mag += norm(&fa) * norm(&gb);
                    acc += fa * gb;
                }
                principal.push(acc);
                magnitude.push(mag);
            }
            while let (Some(c), Some(&m)) = (principal.last(), magnitude.last()) {
                if norm(c) <= tol.cancel_rel * m {
                    principal.pop();
                    magnitude.pop();
                } else {
                    break;
                }
            }
            if !principal.is_empty() {
                poles.push(PoleDatum { location: p, principal });
            }
        }
        let mut poly = self.poly.mul(&other.poly);
        if poly.shape() != (rows, cols) {
            poly = MatPolynomial::zero(rows, cols);
        }
        for q in &other.poles {
            poly = poly.add(&polypart_left(&self.poly, q, rows, cols));
        }
        for p in &self.poles {
            poly = poly.add(&polypart_right(p, &other.poly, rows, cols));
        }
        Self { rows, cols, poly, poles, valid_strip: intersect(self.valid_strip, other.valid_strip) }
    }

    /// Largest coefficient norm over the realization, used as a scale.
    pub fn magnitude(&self) -> f64 {
        let a = self.poly.max_coeff_norm();
        self.poles
            .iter()
            .flat_map(|p| p.principal.iter().map(norm))
            .fold(a, f64::max)
    }

    /// Restriction of rows and columns to `idx`.
    pub fn block(&self, idx: &[usize]) -> Self {
        let pick = |c: &CMatrix| CMatrix::from_fn(idx.len(), idx.len(), |i, j| c[(idx[i], idx[j])]);
        let mut out = Self {
            rows: idx.len(),
            cols: idx.len(),
            poly: self.poly.block(idx),
            poles: self
                .poles
                .iter()
                .map(|p| PoleDatum { location: p.location, principal: p.principal.iter().map(pick).collect() })
                .collect(),
            valid_strip: self.valid_strip,
        };
        out.drop_vanishing(0.0);
        out
    }
}

fn intersect(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.max(b0), a1.min(b1))),
    }
}

/// Polynomial part of `P(z) * principal(z)` for a principal part on the right.
fn polypart_left(p: &MatPolynomial, q: &PoleDatum, rows: usize, cols: usize) -> MatPolynomial {
    if p.is_zero() {
        return MatPolynomial::zero(rows, cols);
    }
    let taylor = p.taylor_at(q.location, p.degree() + 1);
    let mut out = vec![zeros(rows, cols); p.degree() + 1];
    for (k, c) in q.principal.iter().enumerate() {
        for s in (k + 1)..taylor.len() {
            out[s - k - 1] += &taylor[s] * c;
        }
    }
    MatPolynomial::from_raw(rows, cols, out).translate(-q.location)
}

/// Polynomial part of `principal(z) * P(z)`.
fn polypart_right(q: &PoleDatum, p: &MatPolynomial, rows: usize, cols: usize) -> MatPolynomial {
    if p.is_zero() {
        return MatPolynomial::zero(rows, cols);
    }
    let taylor = p.taylor_at(q.location, p.degree() + 1);
    let mut out = vec![zeros(rows, cols); p.degree() + 1];
    for (k, c) in q.principal.iter().enumerate() {
        for s in (k + 1)..taylor.len() {
            out[s - k - 1] += c * &taylor[s];
        }
    }
    MatPolynomial::from_raw(rows, cols, out).translate(-q.location)
}

/// Relative distance `||a - b|| / max(||a||, ||b||, floor)`.
pub fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = norm(&(a - b));
    let s = norm(a).max(norm(b));
    if s == 0.0 {
        d
    } else {
        d / s
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::{c64, ZERO};
    use proptest::prelude::*;

    fn sc(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c64(x, 0.0))
    }

    fn one_over_z_z_minus_1() -> MeroMatrix {
        MeroMatrix::simple_pole(c64(0.0, 0.0), 1, sc(-1.0)).add(&MeroMatrix::simple_pole(c64(1.0, 0.0), 1, sc(1.0)))
    }

    #[test]
    fn laurent_of_partial_fractions() {
        let f = one_over_z_z_minus_1();
        let l = f.laurent_at(c64(0.0, 0.0), 2).unwrap();
        assert_eq!(l.min_power, -1);
        assert_eq!(l.coeff(-1)[(0, 0)], c64(-1.0, 0.0));
        // 1/(z(z-1)) = -1/z - 1 - z - ...
        assert!((l.coeff(0)[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-15);
        assert!((l.coeff(1)[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ambiguous_point_is_rejected() {
        let f = MeroMatrix::simple_pole(c64(0.0, 0.0), 1, sc(1.0))
            .add(&MeroMatrix::simple_pole(c64(1.5e-8, 0.0), 1, sc(1.0)));
        assert_eq!(f.poles().len(), 2);
        assert!(f.laurent_at(c64(7.5e-9, 0.0), 0).is_err());
    }

    #[test]
    fn product_cancels_pole() {
        // z * (1/z) = 1
        let z = MeroMatrix::from_poly(MatPolynomial::scalar(1, &[ZERO, ONE]));
        let inv = MeroMatrix::simple_pole(ZERO, 1, sc(1.0));
        let p = z.mul(&inv);
        assert!(p.is_polynomial());
        assert!((p.eval(c64(3.0, 1.0))[(0, 0)] - ONE).norm() < 1e-14);
    }

    #[test]
    fn product_matches_pointwise() {
        let f = one_over_z_z_minus_1().add(&MeroMatrix::from_poly(MatPolynomial::scalar(1, &[ONE, c64(2.0, 0.0)])));
        let g = MeroMatrix::simple_pole(c64(0.0, 0.0), 2, sc(3.0))
            .add(&MeroMatrix::from_poly(MatPolynomial::scalar(1, &[ZERO, ZERO, ONE])));
        let h = f.mul(&g);
        for z in [c64(0.3, 0.7), c64(-2.0, 0.1), c64(4.0, -3.0)] {
            let direct = f.eval(z) * g.eval(z);
            assert!(rel_err(&h.eval(z), &direct) < 1e-13);
        }
    }

    #[test]
    fn translate_moves_poles() {
        let f = one_over_z_z_minus_1().translate(c64(1.0, 0.0));
        let mut locs: Vec<f64> = f.pole_locations().iter().map(|p| p.re).collect();
        locs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(locs, vec![-1.0, 0.0]);
    }
    proptest! {
        #[test]
        fn eval_bound_dominates_value(
            locs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, 1usize..4, -2.0f64..2.0), 1..5),
            poly in prop::collection::vec(-2.0f64..2.0, 1..4),
            zr in -4.0f64..4.0,
            zi in -4.0f64..4.0,
        ) {
            let coeffs: Vec<Complex64> = poly.iter().map(|&x| c64(x, 0.5 * x)).collect();
            let mut f = MeroMatrix::from_poly(MatPolynomial::scalar(1, &coeffs));
            for &(re, im, k, c) in &locs {
                f = f.add(&MeroMatrix::simple_pole(c64(re, im), k, sc(c)));
            }
            let z = c64(zr, zi);
            prop_assume!(f.pole_locations().iter().all(|p| (z - p).norm() > 1e-3));
            let v = norm(&f.eval(z));
            prop_assert!(f.eval_bound(z) >= v * (1.0 - 1e-12), "{} < {}", f.eval_bound(z), v);
        }
    }
}
