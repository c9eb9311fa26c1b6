//! Ellipticity checks for Fuchs-type operators.

use super::fuchs::{FuchsOperator, SymbolPoint};
use super::hierarchy::ConormalHierarchy;
use super::mellin::LINE_TOL;
use super::model::weight_line;
use crate::error::Result;
use crate::mero::linalg::{norm, smallest_singular_value, zeros, CMatrix};
use crate::mero::{polyeig_with, MeroMatrix, PolyeigOptions, Root};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sigma0Verdict {
    Elliptic,
    NotElliptic,
    Undeterminable,
}

#[derive(Clone, Debug)]
pub struct Sigma0Report {
    pub verdict: Sigma0Verdict,
    /// Smallest sampled modulus relative to the largest, when sampled.
    pub min_modulus: Option<f64>,
    pub reason: String,
}

/// Grid of `r` values in `[0, 1]` used for symbol sampling.
fn r_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn leading_at(a: &FuchsOperator, r: f64) -> CMatrix {
    let k = a.size();
    let mut acc = zeros(k, k);
    for i in (0..=a.r_order()).rev() {
        acc = acc * Complex64::from(r) + a.coeff(a.mu, i);
    }
    acc
}

/// Bijectivity of the rescaled principal symbol on the sampled cosphere bundle.
pub fn check_sigma0_ellipticity(a: &FuchsOperator) -> Sigma0Report {
    let n = a.model.n;
    if let Some(p) = &a.principal {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let steps = if n == 0 { 2 } else { 33 };
        for r in r_grid() {
            for s in 0..steps {
                let t = std::f64::consts::PI * s as f64 / (steps - 1).max(1) as f64;
                let mut xi = vec![0.0; n];
                if n > 0 {
                    xi[0] = t.sin();
                }
                let pt = SymbolPoint { r, rho: t.cos(), xi, y: Vec::new(), eta: Vec::new() };
                let m = p.modulus(&pt);
                lo = lo.min(m);
                hi = hi.max(m);
            }
        }
        let rel = if hi > 0.0 { lo / hi } else { 0.0 };
        let verdict = if rel > 1e-10 { Sigma0Verdict::Elliptic } else { Sigma0Verdict::NotElliptic };
        return Sigma0Report {
            verdict,
            min_modulus: Some(rel),
            reason: "sampled closed-form principal symbol".into(),
        };
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for r in r_grid() {
        let m = leading_at(a, r);
        lo = lo.min(smallest_singular_value(&m));
        hi = hi.max(norm(&m));
    }
    let rel = if hi > 0.0 { lo / hi } else { 0.0 };
    if rel <= 1e-12 {
        return Sigma0Report {
            verdict: Sigma0Verdict::NotElliptic,
            min_modulus: Some(rel),
            reason: "leading coefficient a_mu(r) is singular".into(),
        };
    }
    if n == 0 {
        Sigma0Report {
            verdict: Sigma0Verdict::Elliptic,
            min_modulus: Some(rel),
            reason: "invertible leading coefficient of an ordinary differential operator".into(),
        }
    } else {
        Sigma0Report {
            verdict: Sigma0Verdict::Undeterminable,
            min_modulus: None,
            reason: "no closed-form principal symbol for the cross-section".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroInfo {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Signed distance `Re z - line`.
    pub offset: f64,
}

#[derive(Clone, Debug)]
pub struct ConormalReport {
    pub elliptic: bool,
    pub line: f64,
    pub zeros: Vec<ZeroInfo>,
    pub offending: Vec<ZeroInfo>,
    pub min_distance: f64,
    pub infinite: usize,
    pub warnings: Vec<String>,
}

/// Points where `h0(z)` fails to be invertible, with multiplicities.
pub fn conormal_zeros(h0: &MeroMatrix) -> Result<(Vec<Root>, usize, Vec<String>)> {
    if h0.is_polynomial() {
        let opts = PolyeigOptions { allow_infinite: true, ..PolyeigOptions::default() };
        let rep = polyeig_with(h0.poly(), &opts)?;
        return Ok((rep.roots, rep.infinite, rep.warnings));
    }
    let inv = h0.inverse()?;
    let roots = inv
        .poles()
        .iter()
        .map(|p| Root { value: p.location, multiplicity: p.order() })
        .collect();
    Ok((roots, 0, Vec::new()))
}

/// Invertibility of `h_0` on `Re z = (n+1)/2 - gamma`.
pub fn check_conormal_ellipticity(h: &ConormalHierarchy, gamma: f64, n: usize) -> Result<ConormalReport> {
    let line = weight_line(n, gamma);
    let (roots, infinite, warnings) = conormal_zeros(&h.levels[0])?;
    let zeros: Vec<ZeroInfo> = roots
        .iter()
        .map(|r| ZeroInfo { value: r.value, multiplicity: r.multiplicity, offset: r.value.re - line })
        .collect();
    let offending: Vec<ZeroInfo> = zeros.iter().filter(|z| z.offset.abs() <= LINE_TOL).cloned().collect();
    let min_distance = zeros.iter().map(|z| z.offset.abs()).fold(f64::INFINITY, f64::min);
    Ok(ConormalReport { elliptic: offending.is_empty(), line, zeros, offending, min_distance, infinite, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::fuchs::{PrincipalSymbol, QuadraticSymbol};
    use crate::cone::hierarchy::conormal_hierarchy;
    use crate::cone::model::SpectralModel;
    use crate::mero::linalg::c64;

    fn euler(c: &[f64]) -> FuchsOperator {
        let taylor = c.iter().map(|&x| vec![CMatrix::from_element(1, 1, c64(x, 0.0))]).collect();
        FuchsOperator::new(c.len() - 1, SpectralModel::point("euler"), taylor).unwrap()
    }

    #[test]
    fn euler_operator_zeros_and_lines() {
        let a = euler(&[-0.25, 0.0, 1.0]);
        assert_eq!(check_sigma0_ellipticity(&a).verdict, Sigma0Verdict::Elliptic);
        let h = conormal_hierarchy(&a, None, 0);
        let rep = check_conormal_ellipticity(&h, 0.0, 0).unwrap();
        assert!(!rep.elliptic);
        assert_eq!(rep.offending.len(), 1);
        assert!(check_conormal_ellipticity(&h, 0.25, 0).unwrap().elliptic);
    }

    #[test]
    fn vanishing_leading_coefficient_is_not_elliptic() {
        let a = euler(&[1.0, 1.0, 0.0]);
        assert_eq!(check_sigma0_ellipticity(&a).verdict, Sigma0Verdict::NotElliptic);
    }

    #[test]
    fn cross_section_without_symbol_is_undeterminable() {
        let taylor = vec![vec![CMatrix::identity(2, 2)], vec![CMatrix::zeros(2, 2)], vec![CMatrix::identity(2, 2)]];
        let a = FuchsOperator::new(2, SpectralModel::new("x", 1, 2).unwrap(), taylor).unwrap();
        assert_eq!(check_sigma0_ellipticity(&a).verdict, Sigma0Verdict::Undeterminable);
        let a = a.with_principal(PrincipalSymbol::Quadratic(QuadraticSymbol::laplace_like(0.0)));
        assert_eq!(check_sigma0_ellipticity(&a).verdict, Sigma0Verdict::Elliptic);
    }

    #[test]
    fn scaling_preserves_zeros() {
        let a = euler(&[-0.25, 0.0, 1.0]);
        let b = euler(&[-0.75, 0.0, 3.0]);
        let za = conormal_zeros(&conormal_hierarchy(&a, None, 0).levels[0]).unwrap().0;
        let zb = conormal_zeros(&conormal_hierarchy(&b, None, 0).levels[0]).unwrap().0;
        for (x, y) in za.iter().zip(&zb) {
            assert!((x.value - y.value).norm() < 1e-12);
        }
    }
}
