//! Polynomial eigenvalue problem `det h(z) = 0`.

use super::linalg::{
    block_components, circle_points, determinant, inverse, norm, rcond, singular_values, zeros,
    CMatrix, ONE, ZERO,
};
use super::poly::MatPolynomial;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// A zero of `det h` with its algebraic multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct PolyeigOptions {
    /// Accept a singular leading coefficient and drop the infinite eigenvalues.
    pub allow_infinite: bool,
    /// Zeros within `merge_rel * (1 + |z|)` are identified.
    pub merge_rel: f64,
    /// Raw eigenvalues within `group_rel * (1 + |z|)` are refined together.
    pub group_rel: f64,
    /// Residual above which a conditioning warning is attached.
    pub residual_warn: f64,
    /// Quadrature nodes on refinement contours.
    pub contour_points: usize,
}

impl Default for PolyeigOptions {
    fn default() -> Self {
        Self {
            allow_infinite: false,
            merge_rel: 1e-8,
            group_rel: 1e-4,
            residual_warn: 1e-8,
            contour_points: 64,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PolyeigReport {
    pub roots: Vec<Root>,
    /// Number of infinite eigenvalues dropped.
    pub infinite: usize,
    /// Largest normalised residual `s_min(h(z)) / ||h(z)||` over the roots.
    pub max_residual: f64,
    pub warnings: Vec<String>,
}

/// Zeros of `det h(z)` with multiplicities, using the default options.
pub fn polyeig(h: &MatPolynomial) -> Result<Vec<Root>> {
    polyeig_with(h, &PolyeigOptions::default()).map(|r| r.roots)
}

pub fn polyeig_with(h: &MatPolynomial, opts: &PolyeigOptions) -> Result<PolyeigReport> {
    if h.rows() != h.cols() {
        return Err(Error::DimensionMismatch("polyeig needs a square polynomial".into()));
    }
    if h.rows() == 0 {
        return Ok(PolyeigReport::default());
    }
    if h.is_zero() {
        return Err(Error::IdenticallySingular);
    }
    if !opts.allow_infinite && h.degree() >= 1 && rcond(&h.leading()) <= 1e-12 {
        return Err(Error::SingularLeading);
    }
    let mut report = PolyeigReport::default();
    let mut refined: Vec<Complex64> = Vec::new();
    for idx in block_components(h.coeffs()) {
        let block = h.block(&idx);
        let (raw, _) = raw_eigenvalues(&block, opts)?;
        refined.extend(refine_groups(&block, &raw, opts)?);
    }
    report.infinite = h.rows() * h.degree() - refined.len();
    report.roots = merge(&refined, opts.merge_rel);
    for r in &report.roots {
        let m = h.eval(r.value);
        let s = singular_values(&m);
        let scale = s.first().copied().unwrap_or(0.0).max(h.max_coeff_norm()).max(f64::MIN_POSITIVE);
        let res = s.last().copied().unwrap_or(0.0) / scale;
        report.max_residual = report.max_residual.max(res);
        if res > opts.residual_warn {
            report.warnings.push(format!(
                "ill-conditioned linearization near {}: residual {:.3e}",
                r.value, res
            ));
        }
    }
    Ok(report)
}

/// Eigenvalues of the companion linearization of a single block.
fn raw_eigenvalues(h: &MatPolynomial, opts: &PolyeigOptions) -> Result<(Vec<Complex64>, usize)> {
    let k = h.rows();
    let d = h.degree();
    if d == 0 {
        if rcond(&h.leading()) < 1e-14 {
            return Err(Error::IdenticallySingular);
        }
        return Ok((Vec::new(), 0));
    }
    if rcond(&h.leading()) > 1e-12 {
        return Ok((companion_eigenvalues(h.coeffs())?, 0));
    }
    if !opts.allow_infinite {
        return Err(Error::SingularLeading);
    }
    // Shift-and-invert: z = sigma + 1/w turns infinite eigenvalues into w = 0.
    let candidates = [
        Complex64::new(0.3127, 0.1913),
        Complex64::new(-0.7071, 0.4142),
        Complex64::new(1.6180, -0.5772),
        Complex64::new(-2.2360, -1.7320),
    ];
    let (sigma, rc) = candidates
        .iter()
        .map(|&s| (s, rcond(&h.eval(s))))
        .fold((candidates[0], -1.0), |a, b| if b.1 > a.1 { b } else { a });
    if rc < 1e-13 {
        return Err(Error::IdenticallySingular);
    }
    let b = h.taylor_at(sigma, d + 1);
    let g: Vec<CMatrix> = (0..=d).map(|j| b[d - j].clone()).collect();
    let w = companion_eigenvalues(&g)?;
    let finite = det_degree(h, sigma, k * d);
    let mut w_sorted = w.clone();
    w_sorted.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    let roots = w_sorted.iter().take(finite).map(|&wi| sigma + ONE / wi).collect();
    Ok((roots, k * d - finite))
}

/// Degree of `det h(sigma + x)` in `x`, by interpolation on the unit circle.
fn det_degree(h: &MatPolynomial, sigma: Complex64, bound: usize) -> usize {
    let n = bound + 1;
    let pts = circle_points(ZERO, 1.0, n);
    let vals: Vec<Complex64> = pts.iter().map(|&x| determinant(&h.eval(sigma + x))).collect();
    let coeffs: Vec<f64> = (0..n)
        .map(|t| {
            let s: Complex64 = pts
                .iter()
                .zip(&vals)
                .map(|(&x, &v)| v * x.powi(-(t as i32)))
                .sum();
            (s / n as f64).norm()
        })
        .collect();
    let scale = coeffs.iter().cloned().fold(0.0, f64::max);
    (0..n).rev().find(|&t| coeffs[t] > 1e-10 * scale).unwrap_or(0)
}

/// Eigenvalues of the block companion matrix of `sum_j A_j z^j` with invertible `A_d`.
fn companion_eigenvalues(coeffs: &[CMatrix]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let k = coeffs[0].nrows();
    let lead_inv = super::linalg::inverse(&coeffs[d])
        .ok_or_else(|| Error::Numerical("leading coefficient not invertible".into()))?;
    let n = k * d;
    let mut c = zeros(n, n);
    for b in 0..d.saturating_sub(1) {
        for i in 0..k {
            c[(b * k + i, (b + 1) * k + i)] = ONE;
        }
    }
    for j in 0..d {
        let blk = -(&lead_inv * &coeffs[j]);
        for r in 0..k {
            for s in 0..k {
                c[((d - 1) * k + r, j * k + s)] = blk[(r, s)];
            }
        }
    }
    eigenvalues(c)
}

pub(crate) fn eigenvalues(m: CMatrix) -> Result<Vec<Complex64>> {
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur form not triangular".into()))?;
    Ok(ev.iter().copied().collect())
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + a.norm().max(b.norm()))
}

/// Union-find grouping of values under the relative distance `rel`.
fn group(values: &[Complex64], rel: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if close(values[i], values[j], rel) {
                let a = find(&mut label, i);
                let b = find(&mut label, j);
                if a != b {
                    label[a] = b;
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(i);
    }
    out
}

fn refine_groups(h: &MatPolynomial, raw: &[Complex64], opts: &PolyeigOptions) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(raw.len());
    for g in group(raw, opts.group_rel) {
        if g.len() == 1 {
            out.push(raw[g[0]]);
            continue;
        }
        let members: Vec<Complex64> = g.iter().map(|&i| raw[i]).collect();
        let others: Vec<Complex64> = (0..raw.len()).filter(|i| !g.contains(i)).map(|i| raw[i]).collect();
        out.extend(moment_refine(h, &members, &others, opts.contour_points)?);
    }
    Ok(out)
}

/// Replaces a cluster of eigenvalues by the roots of the local polynomial whose
/// power sums are the argument-principle moments of `tr(h^{-1} h')`.
fn moment_refine(
    h: &MatPolynomial,
    members: &[Complex64],
    others: &[Complex64],
    nodes: usize,
) -> Result<Vec<Complex64>> {
    let m = members.len();
    let center = members.iter().sum::<Complex64>() / m as f64;
    let spread = members.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    let gap = others.iter().map(|z| (z - center).norm()).fold(f64::INFINITY, f64::min);
    let radius = (0.5 * gap).min(0.1 * (1.0 + center.norm()));
    if radius <= 2.0 * spread {
        return Err(Error::ClusteringAmbiguity {
            center,
            detail: format!("cluster spread {spread:.3e} too close to neighbouring roots"),
        });
    }
    let dh = h.derivative();
    let coeff_norms: Vec<f64> = h.coeffs().iter().map(norm).collect();
    let mut sums = vec![ZERO; m + 1];
    let mut noise: f64 = 0.0;
    for z in circle_points(center, radius, nodes) {
        let hz = h.eval(z);
        let inv = inverse(&hz)
            .ok_or_else(|| Error::ClusteringAmbiguity { center, detail: "singular on contour".into() })?;
        let f = (&inv * dh.eval(z)).trace();
        let size: f64 = coeff_norms.iter().enumerate().map(|(j, a)| a * z.norm().powi(j as i32)).sum();
        noise = noise.max(f64::EPSILON * size * norm(&inv));
        let u = (z - center) / radius;
        let mut up = u;
        for s in sums.iter_mut() {
            *s += f * up;
            up *= u;
        }
    }
    // Moments of u = (z - c)/radius; the factor radius from dz cancels the 1/radius in u.
    for s in sums.iter_mut() {
        *s *= radius / nodes as f64;
    }
    let count = sums[0];
    if (count - Complex64::from(m as f64)).norm() > 0.25 {
        return Err(Error::ClusteringAmbiguity {
            center,
            detail: format!("contour count {count} does not match cluster size {m}"),
        });
    }
    // Newton identities for the elementary symmetric functions.
    let mut e = vec![ZERO; m + 1];
    e[0] = ONE;
    for k in 1..=m {
        let mut acc = ZERO;
        for i in 1..=k {
            let sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
            acc += e[k - i] * sums[i] * sign;
        }
        e[k] = acc / k as f64;
    }
    let mut c = zeros(m, m);
    for i in 0..m.saturating_sub(1) {
        c[(i, i + 1)] = ONE;
    }
    for j in 0..m {
        // monic polynomial u^m + sum_j a_j u^j with a_j = (-1)^{m-j} e_{m-j}
        let sign = if (m - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        c[(m - 1, j)] = -(e[m - j] * sign);
    }
    let u = eigenvalues(c)?;
    // Roots indistinguishable from an m-fold root at the evaluation noise level
    // are returned as that root.
    let mean = sums[1] / m as f64;
    let u_spread = u.iter().map(|ui| (ui - mean).norm()).fold(0.0, f64::max);
    let noise_radius = 10.0 * (m as f64 * noise).powf(1.0 / m as f64);
    if u_spread <= noise_radius {
        return Ok(vec![center + mean * radius; m]);
    }
    Ok(u.into_iter().map(|ui| center + ui * radius).collect())
}

/// Identifies values within `rel (1 + |z|)` and counts multiplicities.
pub(crate) fn merge(values: &[Complex64], rel: f64) -> Vec<Root> {
    let mut roots: Vec<Root> = group(values, rel)
        .into_iter()
        .map(|g| Root {
            value: g.iter().map(|&i| values[i]).sum::<Complex64>() / g.len() as f64,
            multiplicity: g.len(),
        })
        .collect();
    roots.sort_by(|a, b| {
        a.value
            .re
            .partial_cmp(&b.value.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.value.im.partial_cmp(&b.value.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::{c64, eye};

    fn scalar(c: &[f64]) -> MatPolynomial {
        MatPolynomial::scalar(1, &c.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn simple_quadratic() {
        let r = polyeig(&scalar(&[2.0, -3.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value - c64(1.0, 0.0)).norm() < 1e-12 && r[0].multiplicity == 1);
        assert!((r[1].value - c64(2.0, 0.0)).norm() < 1e-12 && r[1].multiplicity == 1);
    }

    #[test]
    fn double_root_is_merged() {
        let r = polyeig(&scalar(&[0.25, -1.0, 1.0])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value - c64(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn triple_root_in_coupled_block() {
        // (z-1)^3 through a 2x2 coupled polynomial: [[(z-1)^2, 1],[0, z-1]]
        let mut a0 = zeros(2, 2);
        a0[(0, 0)] = c64(1.0, 0.0);
        a0[(0, 1)] = c64(1.0, 0.0);
        a0[(1, 1)] = c64(-1.0, 0.0);
        let mut a1 = zeros(2, 2);
        a1[(0, 0)] = c64(-2.0, 0.0);
        a1[(1, 1)] = c64(1.0, 0.0);
        let mut a2 = zeros(2, 2);
        a2[(0, 0)] = c64(1.0, 0.0);
        let h = MatPolynomial::new(vec![a0, a1, a2]).unwrap();
        let rep = polyeig_with(&h, &PolyeigOptions { allow_infinite: true, ..Default::default() }).unwrap();
        assert_eq!(rep.roots.len(), 1);
        assert_eq!(rep.roots[0].multiplicity, 3);
        assert_eq!(rep.infinite, 1);
    }

    #[test]
    fn singular_leading_rejected_by_default() {
        let mut a1 = eye(2);
        a1[(1, 1)] = ZERO;
        let h = MatPolynomial::new(vec![eye(2), a1]).unwrap();
        assert!(matches!(polyeig(&h), Err(Error::SingularLeading)));
    }

    #[test]
    fn singular_constant_is_identically_singular() {
        let mut a = eye(2);
        a[(0, 0)] = ZERO;
        let h = MatPolynomial::constant(a);
        assert!(matches!(polyeig(&h), Err(Error::IdenticallySingular)));
        assert!(polyeig(&MatPolynomial::identity(2)).unwrap().is_empty());
    }

    #[test]
    fn diagonal_blocks_merge_across_blocks() {
        let d = vec![
            vec![c64(-1.0, 0.0), ZERO, c64(1.0, 0.0)],
            vec![c64(-1.0, 0.0), ZERO, c64(1.0, 0.0)],
            vec![ZERO, ZERO, c64(1.0, 0.0)],
        ];
        let r = polyeig(&MatPolynomial::diagonal(&d)).unwrap();
        let mults: Vec<usize> = r.iter().map(|x| x.multiplicity).collect();
        assert_eq!(mults, vec![2, 2, 2]);
    }
}
