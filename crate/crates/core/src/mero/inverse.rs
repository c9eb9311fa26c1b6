//! Inversion of matrix polynomials and meromorphic matrix functions.

use super::function::{MeroMatrix, PoleDatum};
use super::linalg::{circle_points, cpow, determinant, inverse, norm, rcond, zeros, CMatrix, ONE, ZERO};
use super::poly::MatPolynomial;
use super::polyeig::{polyeig_with, PolyeigOptions, Root};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct InverseOptions {
    /// Largest size handled through the adjugate/determinant pair.
    pub adjugate_max: usize,
    /// Quadrature nodes for contour Laurent coefficients.
    pub contour_points: usize,
    /// Principal coefficients below this fraction of the largest are dropped.
    pub order_threshold: f64,
    pub polyeig: PolyeigOptions,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self {
            adjugate_max: 8,
            contour_points: 64,
            order_threshold: 1e-10,
            polyeig: PolyeigOptions { allow_infinite: true, ..PolyeigOptions::default() },
        }
    }
}

/// `h(z)^{-1}` as a meromorphic matrix function.
pub fn mero_inverse(h: &MatPolynomial) -> Result<MeroMatrix> {
    mero_inverse_with(h, &InverseOptions::default())
}

pub fn mero_inverse_with(h: &MatPolynomial, opts: &InverseOptions) -> Result<MeroMatrix> {
    if h.rows() != h.cols() {
        return Err(Error::DimensionMismatch("inverse of a non-square polynomial".into()));
    }
    let k = h.rows();
    let roots = polyeig_with(h, &opts.polyeig)?.roots;
    let use_adjugate = k <= opts.adjugate_max;
    let mut poles = Vec::with_capacity(roots.len());
    for (i, r) in roots.iter().enumerate() {
        let gap = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| (o.value - r.value).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = (0.5 * gap).min(1.0);
        let principal = if use_adjugate {
            adjugate_principal(h, r, radius)?
        } else {
            contour_principal(h, r, radius, opts.contour_points)?
        };
        let principal = trim_order(principal, radius, opts.order_threshold);
        if !principal.is_empty() {
            poles.push(PoleDatum { location: r.value, principal });
        }
    }
    let proper = h.degree() >= 1 && rcond(&h.leading()) > 1e-12;
    let poly = if proper {
        MatPolynomial::zero(k, k)
    } else {
        polynomial_remainder(h, &poles, &roots)?
    };
    MeroMatrix::new(poly, poles)
}

/// Drops the highest-order coefficients that are negligible at the sampling radius.
fn trim_order(mut principal: Vec<CMatrix>, radius: f64, threshold: f64) -> Vec<CMatrix> {
    let size: Vec<f64> = principal
        .iter()
        .enumerate()
        .map(|(j, c)| norm(c) / radius.powi(j as i32 + 1))
        .collect();
    let top = size.iter().cloned().fold(0.0, f64::max);
    while let Some(c) = principal.last() {
        let j = principal.len();
        if norm(c) / radius.powi(j as i32) <= threshold * top {
            principal.pop();
        } else {
            break;
        }
    }
    principal
}

/// Taylor coefficients at `center` of a polynomial matrix function from samples on a circle.
fn taylor_from_circle(
    samples: &[CMatrix],
    pts: &[Complex64],
    center: Complex64,
    radius: f64,
    count: usize,
) -> Vec<CMatrix> {
    let n = samples.len();
    (0..count)
        .map(|s| {
            let mut acc = zeros(samples[0].nrows(), samples[0].ncols());
            for (m, z) in samples.iter().zip(pts) {
                let u = (z - center) / radius;
                acc += m * (ONE / cpow(u, s));
            }
            acc / Complex64::from(n as f64 * radius.powi(s as i32))
        })
        .collect()
}

/// Principal part at a root from the adjugate/determinant pair.
fn adjugate_principal(h: &MatPolynomial, r: &Root, radius: f64) -> Result<Vec<CMatrix>> {
    let k = h.rows();
    let nu = r.multiplicity;
    let n = (k * h.degree() + 1).max(2 * nu + 2).max(8);
    let pts = circle_points(r.value, radius, n);
    let mut adj = Vec::with_capacity(n);
    let mut det = Vec::with_capacity(n);
    for &z in &pts {
        let hz = h.eval(z);
        let d = determinant(&hz);
        let inv = inverse(&hz).ok_or_else(|| Error::Numerical("singular on sampling circle".into()))?;
        adj.push(inv * d);
        det.push(CMatrix::from_element(1, 1, d));
    }
    let a = taylor_from_circle(&adj, &pts, r.value, radius, nu);
    let d: Vec<Complex64> = taylor_from_circle(&det, &pts, r.value, radius, 2 * nu)
        .into_iter()
        .map(|m| m[(0, 0)])
        .collect();
    // 1/det = w^{-nu} sum_t e_t w^t with e the series inverse of d[nu..].
    let tail = &d[nu..];
    if tail[0] == ZERO {
        return Err(Error::Numerical("determinant vanishes to higher order than expected".into()));
    }
    let mut e = vec![ZERO; nu];
    e[0] = ONE / tail[0];
    for t in 1..nu {
        let mut acc = ZERO;
        for s in 1..=t {
            acc += tail[s] * e[t - s];
        }
        e[t] = -acc / tail[0];
    }
    Ok((1..=nu)
        .map(|j| {
            let mut acc = zeros(k, k);
            for s in 0..=(nu - j) {
                acc += &a[s] * e[nu - j - s];
            }
            acc
        })
        .collect())
}

/// Principal part at a root by trapezoidal contour integration of `h^{-1}`.
fn contour_principal(h: &MatPolynomial, r: &Root, radius: f64, nodes: usize) -> Result<Vec<CMatrix>> {
    let k = h.rows();
    let nu = r.multiplicity;
    let pts = circle_points(r.value, radius, nodes);
    let mut out = vec![zeros(k, k); nu];
    for &z in &pts {
        let inv = inverse(&h.eval(z)).ok_or_else(|| Error::Numerical("singular on contour".into()))?;
        let w = z - r.value;
        let mut wp = w;
        for c in out.iter_mut() {
            *c += &inv * wp;
            wp *= w;
        }
    }
    for c in out.iter_mut() {
        *c /= Complex64::from(nodes as f64);
    }
    Ok(out)
}

/// Polynomial part of `h^{-1}` by interpolation of `h^{-1} - principal parts`.
fn polynomial_remainder(h: &MatPolynomial, poles: &[PoleDatum], roots: &[Root]) -> Result<MatPolynomial> {
    let k = h.rows();
    let bound = (k.saturating_sub(1)) * h.degree();
    let n = (bound + 1).max(8);
    let reach = roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    let radius = 2.0 * (1.0 + reach);
    let pts = circle_points(ZERO, radius, n);
    let partial = MeroMatrix::new(MatPolynomial::zero(k, k), poles.to_vec())?;
    let mut samples = Vec::with_capacity(n);
    for &z in &pts {
        let inv = inverse(&h.eval(z)).ok_or_else(|| Error::Numerical("singular on contour".into()))?;
        samples.push(inv - partial.eval(z));
    }
    let coeffs = taylor_from_circle(&samples, &pts, ZERO, radius, bound + 1);
    let size: Vec<f64> = coeffs.iter().enumerate().map(|(s, c)| norm(c) * radius.powi(s as i32)).collect();
    let top = size.iter().cloned().fold(0.0, f64::max);
    let coeffs = coeffs
        .into_iter()
        .zip(size)
        .map(|(c, s)| if s <= 1e-11 * top { zeros(k, k) } else { c })
        .collect();
    MatPolynomial::with_shape(k, k, coeffs)
}

impl MeroMatrix {
    /// Pointwise inverse `f(z)^{-1}` of a square meromorphic matrix function.
    pub fn inverse(&self) -> Result<MeroMatrix> {
        if self.rows() != self.cols() {
            return Err(Error::DimensionMismatch("inverse of a non-square function".into()));
        }
        if self.is_polynomial() {
            return mero_inverse(self.poly());
        }
        let n = self.rows();
        let mut roots = Vec::new();
        for p in self.poles() {
            roots.extend(std::iter::repeat_n(p.location, p.order()));
        }
        let d = MeroMatrix::from_poly(MatPolynomial::from_roots(n, &roots));
        let cleared = d.mul(self);
        let residual = cleared.poles().iter().flat_map(|p| p.principal.iter().map(norm)).fold(0.0, f64::max);
        if residual > 1e-8 * cleared.magnitude().max(1.0) {
            return Err(Error::Numerical("pole clearing left residual principal parts".into()));
        }
        let inv = mero_inverse(cleared.poly())?;
        Ok(d.mul(&inv))
    }
}

/// `l = (1 + m)^{-1} - 1`.
pub fn invert_one_plus(m: &MeroMatrix) -> Result<MeroMatrix> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch("invert_one_plus needs a square function".into()));
    }
    let id = MeroMatrix::identity(m.rows());
    let inv = id.add(m).inverse()?;
    Ok(inv.sub(&id))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::function::rel_err;
    use crate::mero::linalg::{c64, eye};

    fn sc(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c64(x, 0.0))
    }

    #[test]
    fn inverse_of_z_squared_minus_one() {
        let h = MatPolynomial::scalar(1, &[c64(-1.0, 0.0), ZERO, ONE]);
        let f = mero_inverse(&h).unwrap();
        assert!(f.poly().is_zero());
        let p = f.poles().iter().find(|p| (p.location - ONE).norm() < 1e-12).unwrap();
        assert!((p.principal[0][(0, 0)] - c64(0.5, 0.0)).norm() < 1e-12);
        assert_eq!(p.order(), 1);
    }

    #[test]
    fn invert_one_plus_simple_pole() {
        let m = MeroMatrix::simple_pole(ZERO, 1, sc(1.0));
        let l = invert_one_plus(&m).unwrap();
        assert_eq!(l.poles().len(), 1);
        let p = &l.poles()[0];
        assert!((p.location + ONE).norm() < 1e-12);
        assert!((p.principal[0][(0, 0)] + ONE).norm() < 1e-12);
        assert!(l.poly().max_coeff_norm() < 1e-12);
    }

    #[test]
    fn invert_one_plus_nilpotent() {
        let mut c = zeros(2, 2);
        c[(0, 1)] = ONE;
        let m = MeroMatrix::simple_pole(ZERO, 1, c);
        let l = invert_one_plus(&m).unwrap();
        for z in [c64(0.4, 0.2), c64(-1.5, 2.0)] {
            assert!(rel_err(&l.eval(z), &(-m.eval(z))) < 1e-12);
        }
    }

    #[test]
    fn invert_one_plus_zero() {
        let l = invert_one_plus(&MeroMatrix::zero(2, 2)).unwrap();
        assert!(l.is_zero() || l.magnitude() < 1e-14);
    }

    #[test]
    fn unimodular_inverse_is_polynomial() {
        // [[1, z],[0, 1]]^{-1} = [[1, -z],[0, 1]]
        let mut a1 = zeros(2, 2);
        a1[(0, 1)] = ONE;
        let h = MatPolynomial::new(vec![eye(2), a1]).unwrap();
        let f = mero_inverse(&h).unwrap();
        assert!(f.is_polynomial());
        let z = c64(0.7, -1.1);
        let mut expect = eye(2);
        expect[(0, 1)] = -z;
        assert!(rel_err(&f.eval(z), &expect) < 1e-12);
    }

    #[test]
    fn adjugate_and_contour_routes_agree() {
        let mut a0 = zeros(2, 2);
        a0[(0, 0)] = c64(2.0, 0.0);
        a0[(0, 1)] = c64(0.5, 0.3);
        a0[(1, 0)] = c64(-0.2, 0.0);
        a0[(1, 1)] = c64(-1.0, 0.5);
        let mut a1 = zeros(2, 2);
        a1[(0, 0)] = c64(-3.0, 0.0);
        a1[(1, 1)] = c64(0.5, 0.0);
        let h = MatPolynomial::new(vec![a0, a1, eye(2)]).unwrap();
        let a = mero_inverse_with(&h, &InverseOptions::default()).unwrap();
        let b = mero_inverse_with(&h, &InverseOptions { adjugate_max: 0, ..Default::default() }).unwrap();
        for z in [c64(0.3, 0.3), c64(5.0, -1.0), c64(-2.0, 0.0)] {
            let direct = inverse(&h.eval(z)).unwrap();
            assert!(rel_err(&a.eval(z), &direct) < 1e-11);
            assert!(rel_err(&b.eval(z), &direct) < 1e-11);
        }
    }

    #[test]
    fn double_pole_from_double_root() {
        let h = MatPolynomial::scalar(1, &[c64(0.25, 0.0), c64(-1.0, 0.0), ONE]);
        let f = mero_inverse(&h).unwrap();
        assert_eq!(f.poles().len(), 1);
        assert_eq!(f.poles()[0].order(), 2);
        assert!((f.poles()[0].principal[1][(0, 0)] - ONE).norm() < 1e-8);
    }

    #[test]
    fn inverse_of_meromorphic_function() {
        // f = 1 + 1/z  =>  f^{-1} = z/(z+1) = 1 - 1/(z+1)
        let f = MeroMatrix::identity(1).add(&MeroMatrix::simple_pole(ZERO, 1, sc(1.0)));
        let g = f.inverse().unwrap();
        let z = c64(2.0, 0.5);
        let expect = z / (z + ONE);
        assert!((g.eval(z)[(0, 0)] - expect).norm() < 1e-12);
    }
}
