//! Per-`y` conormal inverses, pole drift and edge ellipticity.

use super::operator::EdgeDegenerateOperator;
use crate::cone::{
    check_conormal_ellipticity, conormal_hierarchy, ConormalReport, PrincipalSymbol, Sigma0Report, Sigma0Verdict,
    SymbolPoint,
};
use crate::error::{Error, Result};
use crate::mero::linalg::{norm, smallest_singular_value, zeros};
use crate::mero::{mero_inverse, MeroMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Drift tolerance for the y-independence of the pole set.
pub const DRIFT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ConormalField {
    pub y_grid: Vec<Vec<f64>>,
    pub inverses: Vec<MeroMatrix>,
    /// Pole locations with orders at each grid point.
    pub poles: Vec<Vec<(Complex64, usize)>>,
    /// Largest Hausdorff distance between the pole set at a grid point and at the first one.
    pub drift: f64,
    pub constant: bool,
    pub warnings: Vec<String>,
}

fn hausdorff(a: &[(Complex64, usize)], b: &[(Complex64, usize)]) -> f64 {
    let one = |x: &[(Complex64, usize)], y: &[(Complex64, usize)]| {
        x.iter()
            .map(|(p, _)| y.iter().map(|(q, _)| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one(a, b).max(one(b, a))
}

/// Inverts `sigma_c(A)(y, .)` on a grid of `y` and measures how far its poles move.
pub fn conormal_inverse_field(a: &EdgeDegenerateOperator, y_grid: &[Vec<f64>]) -> Result<ConormalField> {
    let mut inverses = Vec::with_capacity(y_grid.len());
    let mut poles = Vec::with_capacity(y_grid.len());
    for y in y_grid {
        let inv = mero_inverse(&a.subordinate_conormal(y))
            .map_err(|e| Error::Numerical(format!("conormal inverse failed at y = {y:?}: {e}")))?;
        poles.push(inv.poles().iter().map(|p| (p.location, p.order())).collect::<Vec<_>>());
        inverses.push(inv);
    }
    let drift = poles.iter().map(|p| hausdorff(p, &poles[0])).fold(0.0, f64::max);
    let constant = drift < DRIFT_TOL;
    let mut warnings = Vec::new();
    if !constant {
        warnings.push(format!(
            "pole set of the conormal symbol moves with y (drift {drift:.3e}); results hold per y only"
        ));
    }
    Ok(ConormalField { y_grid: y_grid.to_vec(), inverses, poles, drift, constant, warnings })
}

#[derive(Clone, Debug)]
pub struct EdgeEllipticityReport {
    pub sigma0: Sigma0Report,
    pub conormal: Vec<(Vec<f64>, ConormalReport)>,
    /// Labels of modes with a conormal zero on the weight line.
    pub offending_modes: Vec<String>,
    pub elliptic: bool,
    pub note: String,
}

fn sphere_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for v in 0..dim {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; dim];
            p[v] = s;
            pts.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    while pts.len() < count {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            pts.push(p.iter().map(|x| x / n).collect());
        }
    }
    pts
}

fn sigma0(a: &EdgeDegenerateOperator, y_grid: &[Vec<f64>]) -> Sigma0Report {
    let n = a.model.n;
    let q = a.q;
    if let Some(p) = &a.principal {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for r in (0..=10).map(|i| i as f64 / 10.0) {
            for y in y_grid {
                for v in sphere_points(1 + n + q, 64) {
                    let pt = SymbolPoint { r, rho: v[0], xi: v[1..1 + n].to_vec(), y: y.clone(), eta: v[1 + n..].to_vec() };
                    let m = p.modulus(&pt);
                    lo = lo.min(m);
                    hi = hi.max(m);
                }
            }
        }
        let rel = if hi > 0.0 { lo / hi } else { 0.0 };
        let kind = match p {
            PrincipalSymbol::Quadratic(_) => "sampled closed-form principal symbol",
            PrincipalSymbol::Custom(_) => "sampled principal symbol callback",
        };
        return Sigma0Report {
            verdict: if rel > 1e-10 { Sigma0Verdict::Elliptic } else { Sigma0Verdict::NotElliptic },
            min_modulus: Some(rel),
            reason: kind.into(),
        };
    }
    let k = a.size();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for y in y_grid {
        let mut lead = zeros(k, k);
        for t in a.coeffs().iter().filter(|t| t.j == a.mu) {
            lead += t.poly.eval(y);
        }
        lo = lo.min(smallest_singular_value(&lead));
        hi = hi.max(norm(&lead));
    }
    let rel = if hi > 0.0 { lo / hi } else { 0.0 };
    if rel <= 1e-12 {
        return Sigma0Report {
            verdict: Sigma0Verdict::NotElliptic,
            min_modulus: Some(rel),
            reason: "radial leading coefficient is singular".into(),
        };
    }
    Sigma0Report {
        verdict: Sigma0Verdict::Undeterminable,
        min_modulus: None,
        reason: "undeterminable: no principal symbol for the cross-section".into(),
    }
}

/// Samples the rescaled principal symbol and checks the conormal symbol on the
/// weight line at every grid point. Bijectivity of the full edge symbol is not checked.
pub fn check_edge_ellipticity(
    a: &EdgeDegenerateOperator,
    gamma: f64,
    y_grid: &[Vec<f64>],
) -> Result<EdgeEllipticityReport> {
    let s0 = sigma0(a, y_grid);
    let mut conormal = Vec::new();
    let mut offending_modes: Vec<String> = Vec::new();
    let diagonal = a.is_diagonal();
    for y in y_grid {
        let cone = a.reduce_to_cone(y)?;
        let rep = check_conormal_ellipticity(&conormal_hierarchy(&cone, None, 0), gamma, a.model.n)?;
        for z in &rep.offending {
            let h0 = a.subordinate_conormal(y).eval(z.value);
            let scale = h0.iter().map(|c| c.norm()).fold(1.0, f64::max);
            for m in 0..a.size() {
                let hit = if diagonal { h0[(m, m)].norm() <= 1e-8 * scale } else { true };
                let label = format!("{} (zero {})", a.model.mode_labels[m], z.value);
                if hit && !offending_modes.contains(&label) {
                    offending_modes.push(label);
                }
            }
        }
        conormal.push((y.clone(), rep));
    }
    let lines_ok = conormal.iter().all(|(_, r)| r.elliptic);
    Ok(EdgeEllipticityReport {
        elliptic: s0.verdict != Sigma0Verdict::NotElliptic && lines_ok,
        sigma0: s0,
        conormal,
        offending_modes,
        note: "edge-symbol bijectivity on weighted cone spaces is not checked".into(),
    })
}

/// Whether two fields have the same pole sets at every grid point.
pub fn pole_sets_agree(a: &ConormalField, b: &ConormalField, tol: f64) -> bool {
    a.poles.len() == b.poles.len() && a.poles.iter().zip(&b.poles).all(|(x, y)| hausdorff(x, y) <= tol)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{QuadraticSymbol, SpectralModel};
    use crate::edge::operator::EdgeCoeff;
    use crate::edge::ypoly::YPoly;
    use crate::mero::linalg::{c64, CMatrix};

    fn c(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c64(x, 0.0))
    }

    fn grid() -> Vec<Vec<f64>> {
        (0..11).map(|i| vec![-1.0 + 0.2 * i as f64]).collect()
    }

    fn euler_y() -> EdgeDegenerateOperator {
        let coeffs = vec![
            EdgeCoeff { j: 0, alpha: vec![0], i: 0, poly: YPoly::new(1, 1, vec![(vec![1], c(-1.0))]).unwrap() },
            EdgeCoeff { j: 1, alpha: vec![0], i: 0, poly: YPoly::constant(1, c(1.0)) },
        ];
        EdgeDegenerateOperator::new(1, 1, SpectralModel::point("z - y"), coeffs).unwrap()
    }

    #[test]
    fn moving_root_is_reported() {
        let f = conormal_inverse_field(&euler_y(), &grid()).unwrap();
        assert!((f.drift - 2.0).abs() < 1e-10);
        assert!(!f.constant);
        assert_eq!(f.warnings.len(), 1);
    }

    #[test]
    fn scalar_scaling_keeps_poles() {
        let a = euler_y();
        let b = a.scaled_by(&[(vec![0], 2.0), (vec![2], 1.0)]);
        let fa = conormal_inverse_field(&a, &grid()).unwrap();
        let fb = conormal_inverse_field(&b, &grid()).unwrap();
        assert!(pole_sets_agree(&fa, &fb, 1e-10));
    }

    #[test]
    fn zero_operator_fails_sigma0() {
        let coeffs = vec![EdgeCoeff { j: 1, alpha: vec![0], i: 0, poly: YPoly::constant(1, c(0.0)) }];
        let a = EdgeDegenerateOperator::new(1, 1, SpectralModel::point("0"), coeffs).unwrap();
        assert_eq!(sigma0(&a, &grid()).verdict, Sigma0Verdict::NotElliptic);
        let a = a.with_principal(PrincipalSymbol::Quadratic(QuadraticSymbol { radial: 0.0, cross: 0.0, edge: 0.0, r_scale: vec![], y_scale: vec![] }));
        assert_eq!(sigma0(&a, &grid()).verdict, Sigma0Verdict::NotElliptic);
    }
}
