//! Classical Frobenius method for one spectral mode, used as an independent check.
//!
//! The mode operator is the scalar ODE `r^{-mu} sum_i r^i h_i(-r d_r)`. A series
//! `sum_e r^{-e} U_e(log r)` solves it when, for every exponent `e`,
//! `h_0(e - d_L) U_e = F_{e+mu} - sum_{l>=1} h_l(e + l - d_L) U_{e+l}`.

use super::expansion::SingularExpansion;
use crate::asymp::POINT_TOL;
use crate::cone::{weight_line, FuchsOperator, LINE_TOL};
use crate::error::{Error, Result};
use crate::mero::{polyeig_with, MatPolynomial, PolyeigOptions};
use num_complex::Complex64;

type LogPoly = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, Default)]
pub struct OracleOptions {
    /// Exponents with `Re p <= cutoff` are dropped. Defaults to the solver's rule.
    pub cutoff: Option<f64>,
    /// Indicial roots with multiplicities, when known exactly.
    pub roots: Option<Vec<(Complex64, usize)>>,
}

#[derive(Clone, Debug)]
pub struct FrobeniusSolution {
    /// Particular solution with zero integration constants at every root.
    pub particular: SingularExpansion,
    /// `phi_{rho,s}`: the series started by `r^{-rho} log^s r`, `s < mult(rho)`.
    pub kernel: Vec<(Complex64, usize, SingularExpansion)>,
    pub roots: Vec<(Complex64, usize)>,
    pub cutoff: f64,
}

/// Scalar coefficients `h[i][j]` of `z^j` in level `i` for mode `m`.
fn mode_symbols(a: &FuchsOperator, m: usize) -> Vec<Vec<Complex64>> {
    (0..=a.r_order()).map(|i| (0..=a.mu).map(|j| a.coeff(j, i)[(m, m)]).collect()).collect()
}

/// Taylor coefficients `h^{(j)}(e)/j!`, `j = 0..=deg`.
fn taylor(h: &[Complex64], e: Complex64) -> Vec<Complex64> {
    let mut c = h.to_vec();
    let n = c.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        // synthetic division by (z - e)
        let mut acc = ZERO;
        for i in (j..n).rev() {
            acc = acc * e + c[i];
            c[i] = acc;
        }
        out.push(c[j]);
    }
    out
}

/// `h(e - d_L) P`.
fn apply_shifted(h: &[Complex64], e: Complex64, p: &LogPoly) -> LogPoly {
    let t = taylor(h, e);
    let mut out = vec![ZERO; p.len()];
    for (j, tj) in t.iter().enumerate() {
        if *tj == ZERO {
            continue;
        }
        // (-d)^j L^s = (-1)^j s!/(s-j)! L^{s-j}
        for s in j..p.len() {
            let mut f = 1.0;
            for q in 0..j {
                f *= (s - q) as f64;
            }
            if j % 2 == 1 {
                f = -f;
            }
            out[s - j] += tj * p[s] * f;
        }
    }
    out
}

/// Solves `h(e - d_L) U = G` for the polynomial `U` with `U_s = 0` for `s < order`,
/// where `order` is the vanishing order of `h` at `e`.
fn solve_shifted(h: &[Complex64], e: Complex64, order: usize, g: &LogPoly) -> LogPoly {
    let t = taylor(h, e);
    let d = g.len();
    let mut v = vec![ZERO; d];
    for s in (0..d).rev() {
        let mut acc = g[s];
        for m in 1..(t.len() - order) {
            if s + m >= d {
                break;
            }
            let mut f = 1.0;
            for q in 1..=m {
                f *= (s + q) as f64;
            }
            if m % 2 == 1 {
                f = -f;
            }
            acc -= t[order + m] * v[s + m] * f;
        }
        v[s] = acc / t[order];
    }
    // (-d)^order U = V
    let mut u = v;
    for _ in 0..order {
        let mut next = vec![ZERO; u.len() + 1];
        for (s, c) in u.iter().enumerate() {
            next[s + 1] = -c / (s + 1) as f64;
        }
        u = next;
    }
    trim(u)
}

fn trim(mut p: LogPoly) -> LogPoly {
    while p.last() == Some(&ZERO) {
        p.pop();
    }
    p
}

fn add_into(acc: &mut LogPoly, p: &LogPoly, sign: f64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), ZERO);
    }
    for (a, b) in acc.iter_mut().zip(p) {
        *a += b * sign;
    }
}

fn find(list: &[Complex64], e: Complex64) -> Option<usize> {
    list.iter().position(|x| (x - e).norm() <= POINT_TOL)
}

struct ModeProblem {
    mu: f64,
    h: Vec<Vec<Complex64>>,
    roots: Vec<(Complex64, usize)>,
    cutoff: f64,
}

impl ModeProblem {
    fn order_at(&self, e: Complex64) -> usize {
        self.roots
            .iter()
            .find(|(r, _)| (r - e).norm() <= 1e-6 * (1.0 + e.norm()))
            .map_or(0, |(_, m)| *m)
    }

    /// Runs the recursion from `starts` downward; `forced` holds `F` by exponent,
    /// `seeded` prescribes `U` at an exponent before the recursion adds to it.
    fn run(&self, forced: &[(Complex64, LogPoly)], seeded: Option<(Complex64, LogPoly)>) -> SingularExpansion {
        let mut exps: Vec<Complex64> = Vec::new();
        let mut starts: Vec<Complex64> = forced.iter().map(|(p, _)| p - self.mu).collect();
        if let Some((e, _)) = &seeded {
            starts.push(*e);
        }
        for s in starts {
            let mut e = s;
            while e.re > self.cutoff + POINT_TOL {
                if find(&exps, e).is_none() {
                    exps.push(e);
                }
                e -= 1.0;
            }
        }
        exps.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
        let mut sol: Vec<LogPoly> = vec![Vec::new(); exps.len()];
        for idx in 0..exps.len() {
            let e = exps[idx];
            let mut g: LogPoly = Vec::new();
            for (p, f) in forced {
                if (p - self.mu - e).norm() <= POINT_TOL {
                    add_into(&mut g, f, 1.0);
                }
            }
            for (l, hl) in self.h.iter().enumerate().skip(1) {
                if let Some(src) = find(&exps, e + l as f64) {
                    let t = apply_shifted(hl, e + l as f64, &sol[src]);
                    add_into(&mut g, &t, -1.0);
                }
            }
            let order = self.order_at(e);
            let mut u = if g.iter().any(|c| *c != ZERO) { solve_shifted(&self.h[0], e, order, &g) } else { Vec::new() };
            if let Some((s, seed)) = &seeded {
                if (s - e).norm() <= POINT_TOL {
                    add_into(&mut u, seed, 1.0);
                }
            }
            sol[idx] = trim(u);
        }
        let mut out = SingularExpansion::with_flat_order(1, self.cutoff);
        for (e, u) in exps.iter().zip(&sol) {
            for (k, c) in u.iter().enumerate() {
                if *c != ZERO {
                    out.add_term(*e, k, &[*c]);
                }
            }
        }
        out.normalized()
    }
}

/// Frobenius series for mode `m` of a diagonal operator: a particular solution of
/// `A u = f` (`f` scalar) and the kernel series at the indicial roots in the strip
/// `((n+1)/2 - gamma + theta, (n+1)/2 - gamma)`, down to the same cutoff as the
/// asymptotics solver at this depth.
pub fn frobenius_oracle(
    a: &FuchsOperator,
    m: usize,
    f: &SingularExpansion,
    gamma: f64,
    theta: f64,
    depth: usize,
    opts: &OracleOptions,
) -> Result<FrobeniusSolution> {
    if !a.is_diagonal() {
        return Err(Error::NonDiagonal);
    }
    if m >= a.size() || f.size != 1 {
        return Err(Error::DimensionMismatch("mode index or right-hand side size".into()));
    }
    let h = mode_symbols(a, m);
    let mu = a.mu as f64;
    let roots = match &opts.roots {
        Some(r) => r.clone(),
        None => {
            let p = MatPolynomial::scalar(1, &h[0]);
            if p.is_zero() {
                return Err(Error::IdenticallySingular);
            }
            let o = PolyeigOptions { allow_infinite: true, ..Default::default() };
            polyeig_with(&p, &o)?.roots.into_iter().map(|r| (r.value, r.multiplicity)).collect()
        }
    };
    let line = weight_line(a.model.n, gamma);
    let lower = line + theta;
    let strip: Vec<(Complex64, usize)> = roots
        .iter()
        .copied()
        .filter(|(r, _)| r.re < line - LINE_TOL && r.re > lower + POINT_TOL)
        .collect();
    let cutoff = match opts.cutoff {
        Some(c) => c,
        None => {
            let top = if f.is_empty() {
                strip.iter().map(|(r, _)| r.re).fold(f64::INFINITY, f64::min)
            } else {
                f.leading_exponent().unwrap_or(line + mu) - mu
            };
            let top = if top.is_finite() { top } else { line };
            let c = top - (depth + 1) as f64;
            if theta.is_finite() {
                c.max(lower)
            } else {
                c
            }
        }
    };
    let problem = ModeProblem { mu, h, roots, cutoff };
    let mut forced: Vec<(Complex64, LogPoly)> = Vec::new();
    for t in f.terms() {
        let mut poly = vec![ZERO; t.k + 1];
        poly[t.k] = t.c[0];
        match forced.iter_mut().find(|(p, _)| (p - t.p).norm() <= POINT_TOL) {
            Some((_, q)) => add_into(q, &poly, 1.0),
            None => forced.push((t.p, poly)),
        }
    }
    let particular = if forced.is_empty() {
        SingularExpansion::with_flat_order(1, cutoff)
    } else {
        problem.run(&forced, None)
    };
    let mut kernel = Vec::new();
    for (r, mult) in &strip {
        if r.re <= cutoff + POINT_TOL {
            continue;
        }
        for s in 0..*mult {
            let mut seed = vec![ZERO; s + 1];
            seed[s] = Complex64::new(1.0, 0.0);
            kernel.push((*r, s, problem.run(&[], Some((*r, seed)))));
        }
    }
    Ok(FrobeniusSolution { particular, kernel, roots: problem.roots, cutoff })
}

#[derive(Clone, Debug)]
pub struct OracleComparison {
    /// Kernel coefficients `alpha_{rho,s}` reproducing the solver output.
    pub kernel_coefficients: Vec<(Complex64, usize, Complex64)>,
    /// Whether the `(p, k)` supports agree after pairing.
    pub support_match: bool,
    /// Largest coefficient difference relative to the largest coefficient.
    pub coefficient_error: f64,
    pub missing: Vec<(Complex64, usize)>,
    pub extra: Vec<(Complex64, usize)>,
}

impl OracleComparison {
    pub fn passed(&self, tol: f64) -> bool {
        self.support_match && self.coefficient_error <= tol
    }
}

/// Compares a scalar solver expansion with the oracle family
/// `particular + sum alpha_{rho,s} phi_{rho,s}`, fixing `alpha` from the
/// coefficients at the root exponents, highest first.
pub fn compare_modulo_kernel(solver: &SingularExpansion, oracle: &FrobeniusSolution) -> OracleComparison {
    let cutoff = oracle.cutoff.max(solver.flat_order);
    let solver = solver.clone().truncate_at(cutoff);
    let mut family = oracle.particular.clone().truncate_at(cutoff);
    let mut basis: Vec<&(Complex64, usize, SingularExpansion)> = oracle.kernel.iter().collect();
    basis.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.1.cmp(&a.1)));
    let mut alphas = Vec::new();
    for (rho, s, phi) in basis {
        let diff = solver.sub(&family);
        let alpha = diff.coefficient(*rho, *s).map_or(ZERO, |c| c[0]);
        if alpha != ZERO {
            family = family.add(&phi.scale(alpha));
        }
        alphas.push((*rho, *s, alpha));
    }
    let scale = solver.max_abs().max(family.max_abs()).max(1e-300);
    let keep = 1e-9 * scale;
    let a = solver.clone().prune(keep);
    let b = family.clone().prune(keep);
    let missing: Vec<(Complex64, usize)> =
        b.terms().iter().filter(|t| a.coefficient(t.p, t.k).is_none()).map(|t| (t.p, t.k)).collect();
    let extra: Vec<(Complex64, usize)> =
        a.terms().iter().filter(|t| b.coefficient(t.p, t.k).is_none()).map(|t| (t.p, t.k)).collect();
    let coefficient_error = solver.sub(&family).max_abs() / scale;
    OracleComparison {
        kernel_coefficients: alphas,
        support_match: missing.is_empty() && extra.is_empty(),
        coefficient_error,
        missing,
        extra,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::SpectralModel;
    use crate::mero::linalg::{c64, CMatrix};

    fn scalar_op(mu: usize, taylor: &[&[f64]], n: usize) -> FuchsOperator {
        let t = taylor
            .iter()
            .map(|r| r.iter().map(|&x| CMatrix::from_element(1, 1, c64(x, 0.0))).collect())
            .collect();
        let model = if n == 0 { SpectralModel::point("t") } else { SpectralModel::new("t", n, 1).unwrap() };
        FuchsOperator::new(mu, model, t).unwrap()
    }

    #[test]
    fn euler_exponents() {
        // D^2 - 4
        let a = scalar_op(2, &[&[-4.0], &[0.0], &[1.0]], 0);
        let s = frobenius_oracle(&a, 0, &SingularExpansion::new(1), -3.0, f64::NEG_INFINITY, 2, &Default::default())
            .unwrap();
        let mut exps: Vec<f64> = s.kernel.iter().map(|(r, _, _)| r.re).collect();
        exps.sort_by(f64::total_cmp);
        assert!((exps[0] + 2.0).abs() < 1e-12 && (exps[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn double_root_gives_log() {
        let a = scalar_op(2, &[&[0.0], &[0.0], &[1.0]], 0);
        let s = frobenius_oracle(&a, 0, &SingularExpansion::new(1), 0.0, f64::NEG_INFINITY, 1, &Default::default())
            .unwrap();
        let logs: Vec<usize> = s.kernel.iter().map(|(_, k, _)| *k).collect();
        assert_eq!(logs, vec![0, 1]);
    }

    #[test]
    fn resonant_particular_part() {
        let a = scalar_op(2, &[&[-0.25], &[0.0], &[1.0]], 0);
        let f = SingularExpansion::scalar_term(c64(2.5, 0.0), 0, c64(1.0, 0.0));
        let s = frobenius_oracle(&a, 0, &f, -0.5, f64::NEG_INFINITY, 2, &Default::default()).unwrap();
        let t = s.particular.terms();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].k, 1);
        assert!((t[0].c[0] + 1.0).norm() < 1e-12);
    }

    #[test]
    fn coulomb_series() {
        let a = scalar_op(2, &[&[0.0, -2.0, 2.0], &[0.5], &[-0.5]], 2);
        let s = frobenius_oracle(&a, 0, &SingularExpansion::new(1), 1.0, f64::NEG_INFINITY, 3, &Default::default())
            .unwrap();
        let phi = &s.kernel[0].2;
        let c1 = phi.coefficient(c64(-1.0, 0.0), 0).unwrap()[0];
        assert!((c1 + 2.0).norm() < 1e-12);
    }

    #[test]
    fn shifted_solve_inverts_shifted_apply() {
        let h = [c64(0.3, 0.1), c64(-1.0, 0.0), c64(0.5, 0.2), c64(1.0, 0.0)];
        let g = vec![c64(1.0, 0.0), c64(-2.0, 0.5), c64(0.25, 0.0)];
        let e = c64(0.7, -0.2);
        let u = solve_shifted(&h, e, 0, &g);
        let back = apply_shifted(&h, e, &u);
        for (x, y) in back.iter().zip(&g) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn solver_lies_in_oracle_family() {
        use crate::mero::MatPolynomial;
        use crate::solver::solve_asymptotics;
        // h0 = (z-0.3)(z+0.7)(z-1.2), h1 = z + 0.5, h2 = 0.2 z^2
        let h0 = MatPolynomial::from_roots(1, &[c64(0.3, 0.0), c64(-0.7, 0.0), c64(1.2, 0.0)]);
        let c = |i: usize| h0.coeff(i)[(0, 0)].re;
        let a = scalar_op(3, &[&[c(0), 0.5, 0.0], &[c(1), 1.0, 0.0], &[c(2), 0.0, 0.2], &[1.0]], 0);
        let mut f = SingularExpansion::scalar_term(c64(2.3, 0.0), 0, c64(1.0, 0.0));
        f.add_term(c64(1.6, 0.0), 1, &[c64(-0.5, 0.0)]);
        let sol = solve_asymptotics(&a, None, &f, -0.5, f64::NEG_INFINITY, 5).unwrap();
        assert!(sol.flat_law.ok, "{:?}", sol.flat_law);
        let oracle = frobenius_oracle(&a, 0, &f, -0.5, f64::NEG_INFINITY, 5, &Default::default()).unwrap();
        let cmp = compare_modulo_kernel(&sol.total, &oracle);
        assert!(cmp.passed(1e-6), "{cmp:?}");
    }
}
