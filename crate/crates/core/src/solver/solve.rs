//! Singular asymptotics of solutions of `A u = f` from a parametrix hierarchy.

use super::apply::{apply_fuchs, apply_mellin_term, apply_parametrix};
use super::expansion::SingularExpansion;
use crate::asymp::{AsymptoticPoint, AsymptoticType, POINT_TOL};
use crate::cone::{
    check_conormal_ellipticity, check_sigma0_ellipticity, conormal_hierarchy, weight_line, ConormalReport,
    FuchsOperator, Sigma0Report, Sigma0Verdict, SmoothingMellinPart, LINE_TOL,
};
use crate::error::{Error, Result};
use crate::mero::linalg::{norm, singular_values};
use crate::mero::{polyeig_with, MatPolynomial, PolyeigOptions};
use crate::parametrix::{parametrix_hierarchy, ParametrixHierarchy};
use num_complex::Complex64;

/// Homogeneous seed `e r^{-root} log^log r` (`e` a null vector of `h_0(root)`).
#[derive(Clone, Debug)]
pub struct Seed {
    pub root: Complex64,
    pub log: usize,
    pub vector: Vec<Complex64>,
    pub mode: Option<usize>,
}

/// Check that the residual `A u - f` has no term less flat than `threshold`.
#[derive(Clone, Debug)]
pub struct FlatLaw {
    pub threshold: f64,
    /// Largest residual coefficient (relative) with `Re p > threshold`.
    pub worst: f64,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: SingularExpansion,
    pub kernel: SingularExpansion,
    pub total: SingularExpansion,
    /// `A u - f` above its flat order.
    pub residual: SingularExpansion,
    pub asymptotic_type: AsymptoticType,
    pub closure: Option<AsymptoticType>,
    pub seeds: Vec<Seed>,
    /// One solution per seed in the homogeneous case.
    pub kernel_basis: Vec<SingularExpansion>,
    pub cutoff: f64,
    pub parametrix: ParametrixHierarchy,
    pub flat_law: FlatLaw,
    pub sigma0: Sigma0Report,
    pub conormal: ConormalReport,
    pub warnings: Vec<String>,
}

/// Coefficient threshold relative to the largest coefficient.
pub const COEFF_TOL: f64 = 1e-13;
/// Residual threshold relative to the size of `f`, `A u` and the terms cancelling in `A u`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Size of the terms that cancel in `A u`: `max_t |c_t| sum_{j,i} |a_{ji}| (1 + |p_t + i|)^j`.
fn backward_scale(a: &FuchsOperator, u: &SingularExpansion) -> f64 {
    let mut worst: f64 = 0.0;
    for t in u.terms() {
        let mut s = 0.0;
        for j in 0..=a.mu {
            for i in 0..=a.r_order() {
                s += norm(&a.coeff(j, i)) * (1.0 + (t.p + i as f64).norm()).powi(j as i32);
            }
        }
        worst = worst.max(s * t.norm());
    }
    worst
}

/// Seeds `r^{-rho} log^s r` for zeros `rho` of `h_0` with `lo < Re rho < hi`.
pub fn kernel_seeds(a: &FuchsOperator, lo: f64, hi: f64) -> Result<(Vec<Seed>, Vec<String>)> {
    let k = a.size();
    let h0 = a.level_symbol(0);
    let mut seeds = Vec::new();
    let mut warnings = Vec::new();
    let opts = PolyeigOptions { allow_infinite: true, ..Default::default() };
    let inside = |z: Complex64| z.re > lo + POINT_TOL && z.re < hi - LINE_TOL;
    if h0.is_diagonal() {
        for m in 0..k {
            let block: MatPolynomial = h0.block(&[m]);
            if block.is_zero() {
                return Err(Error::IdenticallySingular);
            }
            for r in polyeig_with(&block, &opts)?.roots {
                if !inside(r.value) {
                    continue;
                }
                let mut e = vec![Complex64::new(0.0, 0.0); k];
                e[m] = Complex64::new(1.0, 0.0);
                for s in 0..r.multiplicity {
                    seeds.push(Seed { root: r.value, log: s, vector: e.clone(), mode: Some(m) });
                }
            }
        }
    } else {
        for r in polyeig_with(&h0, &opts)?.roots {
            if !inside(r.value) {
                continue;
            }
            let m = h0.eval(r.value);
            let svd = m.clone().svd(false, true);
            let v_t = svd.v_t.expect("requested right singular vectors");
            let smax = singular_values(&m).first().copied().unwrap_or(1.0).max(1e-300);
            let mut nulls = 0;
            for (i, sv) in svd.singular_values.iter().enumerate() {
                if *sv <= 1e-8 * smax {
                    let v: Vec<Complex64> = (0..k).map(|j| v_t[(i, j)].conj()).collect();
                    seeds.push(Seed { root: r.value, log: 0, vector: v, mode: None });
                    nulls += 1;
                }
            }
            if nulls < r.multiplicity {
                warnings.push(format!(
                    "zero {} has multiplicity {} but {} null vectors; logarithmic seeds omitted",
                    r.value, r.multiplicity, nulls
                ));
            }
        }
    }
    Ok((seeds, warnings))
}

fn seed_expansion(k: usize, s: &Seed) -> SingularExpansion {
    let mut e = SingularExpansion::new(k);
    e.add_term(s.root, s.log, &s.vector);
    e
}

/// Whether `A_0 (c r^{-p} log^k r) = 0`.
fn annihilated(h0: &MatPolynomial, p: Complex64, k: usize, c: &[Complex64], scale: f64) -> bool {
    let taylor = h0.taylor_at(p, k + 1);
    (0..=k).all(|j| {
        let m = &taylor[j];
        let v: f64 = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|jj| m[(i, jj)] * c[jj]).sum::<Complex64>().norm_sqr())
            .sum::<f64>()
            .sqrt();
        v <= 1e-9 * scale.max(1e-300)
    })
}

fn apply_full(
    a: &FuchsOperator,
    mellin: Option<&SmoothingMellinPart>,
    n: usize,
    u: &SingularExpansion,
) -> Result<SingularExpansion> {
    let mut out = apply_fuchs(a, u, None)?;
    if let Some(m) = mellin {
        for t in &m.terms {
            out = out.add(&apply_mellin_term(t, a.mu, n, u)?);
        }
    }
    Ok(out)
}

/// Residual `A u - f` up to `cutoff` and the flat-law check of its terms against `threshold`.
pub fn flat_law_check(
    a: &FuchsOperator,
    mellin: Option<&SmoothingMellinPart>,
    u: &SingularExpansion,
    f: &SingularExpansion,
    cutoff: f64,
    threshold: f64,
) -> Result<(SingularExpansion, FlatLaw)> {
    let au = apply_full(a, mellin, a.model.n, u)?;
    let scale = au.max_abs().max(f.max_abs()).max(backward_scale(a, u)).max(1e-300);
    let residual = au.sub(f).truncate_at(cutoff).prune(1e-15 * scale).normalized();
    let worst = residual
        .terms()
        .iter()
        .filter(|t| t.p.re > threshold + POINT_TOL)
        .map(|t| t.norm() / scale)
        .fold(0.0, f64::max);
    Ok((residual, FlatLaw { threshold, worst, ok: worst <= RESIDUAL_TOL }))
}

/// Solves `A u = f` modulo terms flatter than `f` by `depth + 1` orders,
/// within the weight strip `((n+1)/2 - gamma + theta, (n+1)/2 - gamma)`.
/// An empty `f` yields the kernel solutions seeded at the zeros of `h_0` in the strip.
pub fn solve_asymptotics(
    a: &FuchsOperator,
    mellin: Option<&SmoothingMellinPart>,
    f: &SingularExpansion,
    gamma: f64,
    theta: f64,
    depth: usize,
) -> Result<Solution> {
    let n = a.model.n;
    let k = a.size();
    let mu = a.mu as f64;
    if f.size != k {
        return Err(Error::DimensionMismatch(format!("right-hand side of size {} for a {k}x{k} operator", f.size)));
    }
    if !(theta <= 0.0) {
        return Err(Error::InvalidInput(format!("theta = {theta} must be non-positive")));
    }
    let mut warnings = Vec::new();
    let sigma0 = check_sigma0_ellipticity(a);
    match sigma0.verdict {
        Sigma0Verdict::NotElliptic => return Err(Error::NotElliptic(format!("principal symbol: {}", sigma0.reason))),
        Sigma0Verdict::Undeterminable => warnings.push(format!("interior ellipticity not checked: {}", sigma0.reason)),
        Sigma0Verdict::Elliptic => {}
    }
    let line_u = weight_line(n, gamma);
    let line_p = line_u + mu;
    let lower = line_u + theta;
    for t in f.terms() {
        if t.p.re >= line_p - LINE_TOL {
            return Err(Error::Incompatible(format!(
                "right-hand side exponent {} not left of Re z = {line_p}",
                t.p
            )));
        }
    }
    let h0 = conormal_hierarchy(a, mellin, 0);
    let conormal = check_conormal_ellipticity(&h0, gamma, n)?;
    if !conormal.elliptic {
        let list: Vec<String> = conormal.offending.iter().map(|z| z.value.to_string()).collect();
        return Err(Error::NotElliptic(format!(
            "conormal symbol has zeros {} on Re z = {line_u}",
            list.join(", ")
        )));
    }
    warnings.extend(conormal.warnings.iter().cloned());

    let homogeneous = f.is_empty();
    let (seeds, seed_warnings) = if homogeneous { kernel_seeds(a, lower, line_u)? } else { (Vec::new(), Vec::new()) };
    warnings.extend(seed_warnings);
    let p_star = if homogeneous {
        seeds.iter().map(|s| s.root.re).fold(f64::INFINITY, f64::min) + mu
    } else {
        f.leading_exponent().unwrap_or(line_p)
    };
    let mut cutoff = p_star - mu - (depth + 1) as f64;
    if theta.is_finite() {
        cutoff = cutoff.max(lower);
    }
    if homogeneous && seeds.is_empty() {
        cutoff = line_u - (depth + 1) as f64;
    }
    let levels = ((p_star.max(line_p) - mu - cutoff).ceil().max(0.0) as usize).max(depth);
    let hierarchy = conormal_hierarchy(a, mellin, levels);
    let parametrix = parametrix_hierarchy(&hierarchy, gamma, n, levels)?;
    warnings.extend(parametrix.warnings.iter().cloned());

    let mut kernel_basis = Vec::new();
    let total = if homogeneous {
        let mut acc = SingularExpansion::with_flat_order(k, cutoff);
        for s in &seeds {
            let u0 = seed_expansion(k, s);
            let defect = apply_full(a, mellin, n, &u0)?.scale(Complex64::new(-1.0, 0.0));
            let defect = defect.prune(0.0);
            let phi = u0.add(&apply_parametrix(&parametrix, &defect, cutoff)?).truncate_at(cutoff);
            let scale = phi.max_abs();
            let phi = phi.prune(COEFF_TOL * scale).normalized();
            acc = acc.add(&phi);
            kernel_basis.push(phi);
        }
        acc
    } else {
        apply_parametrix(&parametrix, f, cutoff)?.truncate_at(cutoff)
    };
    let scale = total.max_abs();
    let total = total.prune(COEFF_TOL * scale).normalized();

    let h0p = a.level_symbol(0);
    let mut particular = SingularExpansion::with_flat_order(k, total.flat_order);
    let mut kernel = SingularExpansion::with_flat_order(k, total.flat_order);
    for t in total.terms() {
        if homogeneous || (mellin.is_none() && annihilated(&h0p, t.p, t.k, &t.c, scale)) {
            kernel.add_term(t.p, t.k, &t.c);
        } else {
            particular.add_term(t.p, t.k, &t.c);
        }
    }

    let threshold = p_star - (depth as f64 - 1.0);
    let (residual, flat_law) = flat_law_check(a, mellin, &total, f, cutoff + mu, threshold)?;

    let mut points: Vec<AsymptoticPoint> = Vec::new();
    for t in total.terms() {
        match points.iter_mut().find(|q| (q.p - t.p).norm() <= POINT_TOL) {
            Some(q) => q.m = q.m.max(t.k),
            None => points.push(AsymptoticPoint { p: t.p, m: t.k }),
        }
    }
    let asymptotic_type = AsymptoticType::new(points, gamma, theta, n)?;
    let closure = if theta.is_finite() {
        Some(asymptotic_type.shadow_closure()?)
    } else {
        warnings.push("infinite weight strip: shadow closure not formed".into());
        None
    };
    Ok(Solution {
        particular: particular.normalized(),
        kernel: kernel.normalized(),
        total,
        residual,
        asymptotic_type,
        closure,
        seeds,
        kernel_basis,
        cutoff,
        parametrix,
        flat_law,
        sigma0,
        conormal,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::SpectralModel;
    use crate::mero::linalg::{c64, CMatrix};

    fn op(rows: &[&[f64]]) -> FuchsOperator {
        let taylor = rows
            .iter()
            .map(|r| r.iter().map(|&x| CMatrix::from_element(1, 1, c64(x, 0.0))).collect())
            .collect();
        FuchsOperator::new(rows.len() - 1, SpectralModel::point("t"), taylor).unwrap()
    }

    #[test]
    fn resonant_example_residual_vanishes() {
        let a = op(&[&[-0.25], &[0.0], &[1.0]]);
        let f = SingularExpansion::scalar_term(c64(2.5, 0.0), 0, c64(1.0, 0.0));
        let s = solve_asymptotics(&a, None, &f, -0.5, f64::NEG_INFINITY, 4).unwrap();
        assert!(s.residual.max_abs() < 1e-12, "{:?}", s.residual);
        assert!(s.flat_law.ok);
        assert_eq!(s.particular.terms().len(), 1);
        assert_eq!(s.particular.terms()[0].k, 1);
        assert_eq!(s.kernel.terms().len(), 2);
    }

    #[test]
    fn perturbed_solution_breaks_flat_law() {
        let a = op(&[&[-0.25], &[0.0], &[1.0]]);
        let f = SingularExpansion::scalar_term(c64(2.5, 0.0), 0, c64(1.0, 0.0));
        let s = solve_asymptotics(&a, None, &f, -0.5, f64::NEG_INFINITY, 4).unwrap();
        let t = &s.particular.terms()[0];
        let bump = SingularExpansion::scalar_term(t.p, t.k, t.c[0] * 1e-6);
        let bad = s.total.add(&bump);
        let (_, law) = flat_law_check(&a, None, &bad, &f, s.cutoff + 2.0, s.flat_law.threshold).unwrap();
        assert!(!law.ok && law.worst > 1e-8, "{law:?}");
        let (_, law) = flat_law_check(&a, None, &s.total, &f, s.cutoff + 2.0, s.flat_law.threshold).unwrap();
        assert!(law.ok);
    }

    #[test]
    fn weight_line_through_zero_is_rejected() {
        let a = op(&[&[-0.25], &[0.0], &[1.0]]);
        let f = SingularExpansion::scalar_term(c64(1.0, 0.0), 0, c64(1.0, 0.0));
        assert!(matches!(solve_asymptotics(&a, None, &f, 0.0, -3.0, 2), Err(Error::NotElliptic(_))));
    }

    #[test]
    fn coulomb_ratio() {
        // -1/2 (D^2 - D) - Z r - E r^2, Z = 1, E = -1/2
        let s = |x: f64| CMatrix::from_element(1, 1, c64(x, 0.0));
        let taylor = vec![vec![s(0.0), s(-1.0), s(0.5)], vec![s(0.5)], vec![s(-0.5)]];
        let model = SpectralModel::new("coulomb", 2, 1).unwrap();
        let a = FuchsOperator::new(2, model, taylor).unwrap();
        let sol = solve_asymptotics(&a, None, &SingularExpansion::new(1), 1.0, f64::NEG_INFINITY, 6).unwrap();
        let c0 = sol.total.coefficient(c64(0.0, 0.0), 0).unwrap()[0];
        let c1 = sol.total.coefficient(c64(-1.0, 0.0), 0).unwrap()[0];
        assert!((c1 / c0 + 1.0).norm() < 1e-8);
    }
}
