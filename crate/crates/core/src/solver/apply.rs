//! Action of Fuchs operators and parametrices on singular expansions.

use super::expansion::{ExpansionTerm, SingularExpansion};
use crate::asymp::POINT_TOL;
use crate::cone::{weight_line, FuchsOperator, MellinTerm, LINE_TOL};
use crate::error::{Error, Result};
use crate::mero::function::same_point;
use crate::mero::linalg::{binomial, cpow, factorial, CMatrix};
use crate::mero::MeroMatrix;
use crate::parametrix::ParametrixHierarchy;
use num_complex::Complex64;

fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// `A u` by the derivative rule: `h_i(-r d_r)` maps `c r^{-p} log^k r` to
/// `sum_j (-1)^j C(k,j) h_i^{(j)}(p) c r^{-p} log^{k-j} r`, times `r^{-mu+i}`.
/// Levels with `i > max_level` are omitted and the flat order raised accordingly.
pub fn apply_fuchs(a: &FuchsOperator, u: &SingularExpansion, max_level: Option<usize>) -> Result<SingularExpansion> {
    if u.size != a.size() {
        return Err(Error::DimensionMismatch("expansion and operator sizes differ".into()));
    }
    let mu = a.mu as f64;
    let top = max_level.map(|m| m.min(a.r_order())).unwrap_or(a.r_order());
    let mut flat = u.flat_order + mu;
    if top < a.r_order() {
        if let Some(lead) = u.leading_exponent() {
            flat = flat.max(lead + mu - (top + 1) as f64);
        }
    }
    let mut out = SingularExpansion::with_flat_order(u.size, flat);
    let symbols: Vec<_> = (0..=top).map(|i| a.level_symbol(i)).collect();
    for t in u.terms() {
        for (i, h) in symbols.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let p_out = t.p + (mu - i as f64);
            if p_out.re <= flat + POINT_TOL {
                continue;
            }
            let taylor = h.taylor_at(t.p, t.k + 1);
            for j in 0..=t.k {
                let f = binomial(t.k, j) * factorial(j) * if j % 2 == 0 { 1.0 } else { -1.0 };
                let v = mat_vec(&taylor[j], &t.c);
                if v.iter().all(|x| x.norm() == 0.0) {
                    continue;
                }
                let v: Vec<Complex64> = v.into_iter().map(|x| x * f).collect();
                out.add_term(p_out, t.k - j, &v);
            }
        }
    }
    Ok(out.normalized())
}

/// Residues of `sym(z) M_t(z) r^{-z}` at `t.p` and at those poles `z0` of
/// `sym` accepted by `take`, where `M_t(z) = (-1)^k k! (z-p)^{-(k+1)} c` is the
/// Mellin datum of `t = c r^{-p} log^k r`. Returns `(z0, s, vector)` for
/// contributions `vector r^{-z0} log^s r`.
pub fn residue_terms(
    sym: &MeroMatrix,
    t: &ExpansionTerm,
    take: impl Fn(Complex64) -> bool,
) -> Result<Vec<(Complex64, usize, Vec<Complex64>)>> {
    let k = t.k as i64;
    let mk = factorial(t.k) * if t.k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    // z0 = p: M has the single coefficient mk at power -(k+1).
    let order = sym
        .poles()
        .iter()
        .find(|q| same_point(q.location, t.p, POINT_TOL))
        .map(|q| q.order() as i64)
        .unwrap_or(0);
    let lp = sym.laurent_at_tol(t.p, k, POINT_TOL)?;
    for s in 0..=(k + order) {
        // a + b + s = -1 with b = -(k+1)
        let a = k - s;
        let coeff = lp.coeff(a);
        let w = mk * if s % 2 == 0 { 1.0 } else { -1.0 } / factorial(s as usize);
        let v: Vec<Complex64> = mat_vec(&coeff, &t.c).into_iter().map(|x| x * w).collect();
        if v.iter().any(|x| x.norm() > 0.0) {
            out.push((t.p, s as usize, v));
        }
    }
    for q in sym.poles() {
        if same_point(q.location, t.p, POINT_TOL) || !take(q.location) {
            continue;
        }
        let z0 = q.location;
        let m = q.order() as i64;
        let d = z0 - t.p;
        // Taylor coefficients of M at z0: mk binom(-(k+1), b) d^{-(k+1)-b}
        let mb: Vec<Complex64> = (0..m)
            .map(|b| {
                let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(mk * sign * binomial((k + b) as usize, b as usize), 0.0) / cpow(d, (k + 1 + b) as usize)
            })
            .collect();
        for s in 0..m {
            let mut acc = CMatrix::zeros(sym.rows(), sym.cols());
            for b in 0..m {
                let a = -1 - s - b;
                if a < -m {
                    continue;
                }
                acc += &q.principal[(-a - 1) as usize] * mb[b as usize];
            }
            let w = if s % 2 == 0 { 1.0 } else { -1.0 } / factorial(s as usize);
            let v: Vec<Complex64> = mat_vec(&acc, &t.c).into_iter().map(|x| x * w).collect();
            if v.iter().any(|x| x.norm() > 0.0) {
                out.push((z0, s as usize, v));
            }
        }
    }
    Ok(out)
}

/// `u = sum_l r^{mu+l} op_M(q_l) f`, keeping the residues left of the symbol
/// line `Re z = (n+1)/2 - (gamma - mu)` whose exponent `z0 - mu - l` exceeds `cutoff`.
pub fn apply_parametrix(p: &ParametrixHierarchy, f: &SingularExpansion, cutoff: f64) -> Result<SingularExpansion> {
    let k = p.levels[0].rows();
    if f.size != k {
        return Err(Error::DimensionMismatch("expansion and parametrix sizes differ".into()));
    }
    let line = p.symbol_line();
    let mu = p.mu as f64;
    for t in f.terms() {
        if t.p.re >= line - LINE_TOL {
            return Err(Error::Incompatible(format!(
                "right-hand side exponent {} not left of the weight line Re z = {line}",
                t.p
            )));
        }
    }
    for (l, q) in p.levels.iter().enumerate() {
        if let Some(z) = q.pole_locations().into_iter().find(|z| (z.re - line).abs() <= LINE_TOL) {
            return Err(Error::Numerical(format!("level {l} symbol has a pole {z} on its integration line")));
        }
    }
    let mut flat = cutoff.max(f.flat_order - mu);
    if let Some(lead) = f.leading_exponent() {
        flat = flat.max(lead.max(line) - mu - (p.depth() + 1) as f64);
    }
    let mut u = SingularExpansion::with_flat_order(k, flat);
    for (l, q) in p.levels.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let shift = mu + l as f64;
        for t in f.terms() {
            if t.p.re - shift <= flat + POINT_TOL {
                // the f-point and every pole to its left are below the cutoff at this level
                let any_pole = q.pole_locations().iter().any(|z| z.re < line && z.re - shift > flat + POINT_TOL);
                if !any_pole {
                    continue;
                }
            }
            let res = residue_terms(q, t, |z| z.re < line && z.re - shift > flat + POINT_TOL)?;
            for (z0, s, v) in res {
                let pu = z0 - shift;
                if pu.re > flat + POINT_TOL {
                    u.add_term(pu, s, &v);
                }
            }
        }
    }
    Ok(u.normalized())
}

/// Action of a smoothing Mellin term `r^{-mu} r^j op_M^{gamma_j}(f_j)` on `u`.
pub fn apply_mellin_term(term: &MellinTerm, mu: usize, n: usize, u: &SingularExpansion) -> Result<SingularExpansion> {
    let line = weight_line(n, term.gamma_j);
    let shift = term.j as f64 - mu as f64;
    let mut out = SingularExpansion::with_flat_order(u.size, u.flat_order - shift);
    for t in u.terms() {
        if t.p.re >= line - LINE_TOL {
            return Err(Error::Incompatible(format!("exponent {} not left of the Mellin line {line}", t.p)));
        }
        let cut = u.flat_order;
        for (z0, s, v) in residue_terms(&term.symbol, t, |z| z.re < line && z.re > cut)? {
            out.add_term(z0 - shift, s, &v);
        }
    }
    Ok(out.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{conormal_hierarchy, SpectralModel};
    use crate::mero::linalg::c64;
    use crate::parametrix::parametrix_hierarchy;

    fn resonant_op() -> FuchsOperator {
        let s = |x: f64| CMatrix::from_element(1, 1, c64(x, 0.0));
        FuchsOperator::new(2, SpectralModel::point("t"), vec![vec![s(-0.25)], vec![s(0.0)], vec![s(1.0)]]).unwrap()
    }

    #[test]
    fn derivative_rule_on_log_term() {
        // (D^2 - 1/4) r^{-1/2} log r = -h0'(1/2) r^{-1/2} = -r^{-1/2}, then times r^{-2}
        let u = SingularExpansion::scalar_term(c64(0.5, 0.0), 1, c64(1.0, 0.0));
        let v = apply_fuchs(&resonant_op(), &u, None).unwrap();
        assert_eq!(v.terms().len(), 1);
        assert_eq!(v.terms()[0].p, c64(2.5, 0.0));
        assert_eq!(v.terms()[0].k, 0);
        assert!((v.terms()[0].c[0] + c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resonant_right_hand_side() {
        let a = resonant_op();
        let p = parametrix_hierarchy(&conormal_hierarchy(&a, None, 2), -0.5, 0, 2).unwrap();
        let f = SingularExpansion::scalar_term(c64(2.5, 0.0), 0, c64(1.0, 0.0));
        let u = apply_parametrix(&p, &f, -10.0).unwrap();
        let get = |pp: f64, k: usize| u.coefficient(c64(pp, 0.0), k).map(|c| c[0]).unwrap_or_default();
        assert!((get(0.5, 1) + c64(1.0, 0.0)).norm() < 1e-12);
        assert!((get(0.5, 0) + c64(1.0, 0.0)).norm() < 1e-12);
        assert!((get(-0.5, 0) - c64(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(u.terms().len(), 3);
        let back = apply_fuchs(&a, &u, None).unwrap().sub(&f).prune(1e-13);
        assert!(back.is_empty(), "{back:?}");
    }
}
