//! Verification suites: oracle equivalences, defect identities and worked examples.

use super::builtins::{build_model, BuiltOperator};
use super::random::{random_elliptic, random_hierarchy, random_ode, random_pair, rng, Rng8};
use crate::asymp::{compose_remainder, Remainder, RemainderClass};
use crate::cone::{
    conormal_hierarchy, conormal_zeros, direct_compose, translation_product, ComposeLimits, ConormalHierarchy,
    FuchsOperator, SpectralModel,
};
use crate::edge::{conormal_inverse_field, edge_parametrix_hierarchy};
use crate::error::Result;
use crate::mero::linalg::{c64, norm, CMatrix};
use crate::mero::rel_err;
use crate::parametrix::{operator_recursion, parametrix_hierarchy, verify_parametrix};
use crate::solver::{
    apply_fuchs, compare_modulo_kernel, frobenius_oracle, kernel_seeds, solve_asymptotics, OracleOptions,
    SingularExpansion,
};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Map, Value};
use web_time::Instant;

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub criterion: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

impl SuiteResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<32} metric {:.3e} (tol {:.0e}) {:.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.metric,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "metric": super::json::real(self.metric),
            "tolerance": self.tolerance,
            "detail": self.detail,
        })
    }
}

fn finish(criterion: usize, name: &'static str, t0: Instant, r: Result<(bool, f64, f64, String)>) -> SuiteResult {
    let seconds = t0.elapsed().as_secs_f64();
    match r {
        Ok((passed, metric, tolerance, detail)) => SuiteResult { criterion, name, passed, metric, tolerance, detail, seconds },
        Err(e) => SuiteResult {
            criterion,
            name,
            passed: false,
            metric: f64::NAN,
            tolerance: f64::NAN,
            detail: format!("error: {e}"),
            seconds,
        },
    }
}

fn scalar_op(mu: usize, taylor: &[&[f64]]) -> FuchsOperator {
    let t = taylor.iter().map(|r| r.iter().map(|&x| CMatrix::from_element(1, 1, c64(x, 0.0))).collect()).collect();
    FuchsOperator::new(mu, SpectralModel::point("scalar"), t).expect("scalar operator")
}

fn cone_builtin(name: &str, params: Value) -> Result<FuchsOperator> {
    match build_model(name, params.as_object().expect("object"))? {
        BuiltOperator::Cone(a) => Ok(a),
        BuiltOperator::Edge(_) => unreachable!("cone built-in"),
    }
}

/// Exponents `+-k`, `k <= K`, of the cone Laplacian on S^1 with a log term only at 0.
pub fn indicial_s1(k: usize, gamma: f64) -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let a = cone_builtin("cone_laplacian_s1", json!({ "K": k }))?;
        let h0 = conormal_hierarchy(&a, None, 0);
        let (roots, _, _) = conormal_zeros(&h0.levels[0])?;
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for e in -(k as i64)..=(k as i64) {
            let target = c64(e as f64, 0.0);
            match roots.iter().min_by(|x, y| (x.value - target).norm().total_cmp(&(y.value - target).norm())) {
                Some(r) => {
                    worst = worst.max((r.value - target).norm());
                    ok &= r.multiplicity == 2;
                }
                None => ok = false,
            }
        }
        ok &= roots.len() == 2 * k + 1;
        let (seeds, _) = kernel_seeds(&a, f64::NEG_INFINITY, f64::INFINITY)?;
        let logs_at_zero = seeds.iter().filter(|s| s.root.norm() < 1e-10 && s.log == 1).count();
        let logs_elsewhere = seeds.iter().filter(|s| s.root.norm() >= 1e-10 && s.log > 0).count();
        ok &= logs_at_zero == 1 && logs_elsewhere == 0;
        let line_ok = crate::cone::check_conormal_ellipticity(&h0, gamma, 1)?.elliptic;
        let secs = t0.elapsed().as_secs_f64();
        let passed = ok && worst < 1e-10 && secs < 1.0;
        Ok((
            passed,
            worst,
            1e-10,
            format!("{} distinct exponents, log at 0: {}, line clear: {line_ok}, {secs:.3}s", roots.len(), logs_at_zero == 1),
        ))
    })();
    finish(1, "cone Laplacian indicial data", t0, r)
}

fn hierarchy_error(a: &ConormalHierarchy, b: &ConormalHierarchy) -> f64 {
    let mut worst: f64 = 0.0;
    for l in 0..=a.depth().min(b.depth()) {
        let (x, y) = (a.level(l), b.level(l));
        let deg = x.poly().degree().max(y.poly().degree());
        let scale = x.poly().max_coeff_norm().max(y.poly().max_coeff_norm()).max(1e-300);
        for j in 0..=deg {
            worst = worst.max(norm(&(x.poly().coeff(j) - y.poly().coeff(j))) / scale);
        }
    }
    worst
}

/// Translation product against composition of the operators.
pub fn translation_oracle(seed: u64, count: usize) -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let mut g = rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let (a, b) = random_pair(&mut g);
            let depth = a.r_order() + b.r_order();
            let ha = conormal_hierarchy(&a, None, depth);
            let hb = conormal_hierarchy(&b, None, depth);
            let tp = translation_product(&ha, &hb, depth)?;
            let direct = conormal_hierarchy(&direct_compose(&a, &b, ComposeLimits::default())?, None, depth);
            worst = worst.max(hierarchy_error(&tp, &direct));
        }
        Ok((worst < 1e-12, worst, 1e-12, format!("{count} random pairs")))
    })();
    finish(2, "translation product oracle", t0, r)
}

/// Left and right defect identities of random parametrix hierarchies.
pub fn parametrix_defects(seed: u64, count: usize, depth: usize) -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let mut g = rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let (h, gamma, n) = random_hierarchy(&mut g, depth)?;
            let p = parametrix_hierarchy(&h, gamma, n, depth)?;
            let v = verify_parametrix(&h, &p, &[])?;
            worst = worst.max(v.left.iter().chain(&v.right).fold(0.0, |a, &b| a.max(b)));
        }
        let secs = t0.elapsed().as_secs_f64();
        Ok((worst < 1e-10 && secs < 30.0, worst, 1e-10, format!("{count} hierarchies, depth {depth}, 100 samples per level")))
    })();
    finish(3, "parametrix defect identities", t0, r)
}

/// Operator recursion against the symbol recursion, and word counts of `P_2`, `P_3`.
pub fn recursion_cross_check(seed: u64, count: usize) -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let a = scalar_op(2, &[&[-0.25, 0.7], &[0.0], &[1.0]]);
        let depth = 3;
        let mut worst: f64 = 0.0;
        let rec = operator_recursion(&conormal_hierarchy(&a, None, depth), 0.25, 0, depth)?;
        worst = worst.max(rec.agreement.iter().fold(0.0, |x, &y| x.max(y)));
        let words_ok = rec.words[2].len() == 2 && rec.words[3].len() == 4;
        let mut g = rng(seed);
        for _ in 0..count {
            let (h, gamma, n) = random_hierarchy(&mut g, depth)?;
            let rec = operator_recursion(&h, gamma, n, depth)?;
            worst = worst.max(rec.agreement.iter().fold(0.0, |x, &y| x.max(y)));
        }
        Ok((
            worst < 1e-12 && words_ok,
            worst,
            1e-12,
            format!("P_2/P_3 words: {}/{}, {} random instances", rec.words[2].len(), rec.words[3].len(), count),
        ))
    })();
    finish(4, "operator recursion cross-check", t0, r)
}

/// Solver against the Frobenius oracle on random scalar problems.
pub fn frobenius_equivalence(seed: u64, count: usize, depth: usize) -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let mut g = rng(seed);
        let mut worst: f64 = 0.0;
        let mut supports = 0;
        for _ in 0..count {
            let p = random_ode(&mut g);
            let sol = solve_asymptotics(&p.op, None, &p.f, p.gamma, f64::NEG_INFINITY, depth)?;
            let opts = OracleOptions { cutoff: Some(sol.cutoff), roots: Some(p.roots.clone()) };
            let oracle = frobenius_oracle(&p.op, 0, &p.f, p.gamma, f64::NEG_INFINITY, depth, &opts)?;
            let cmp = compare_modulo_kernel(&sol.total, &oracle);
            worst = worst.max(cmp.coefficient_error);
            if cmp.support_match {
                supports += 1;
            }
        }
        Ok((
            supports == count && worst < 1e-6,
            worst,
            1e-6,
            format!("{supports}/{count} exponent and log-power sets identical, N = {depth}"),
        ))
    })();
    finish(5, "Frobenius oracle equivalence", t0, r)
}

/// `A = r^{-2}(D^2 - 1/4)`, `f = r^{-5/2}`.
pub fn resonance_example() -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let a = scalar_op(2, &[&[-0.25], &[0.0], &[1.0]]);
        let f = SingularExpansion::scalar_term(c64(2.5, 0.0), 0, c64(1.0, 0.0));
        let mut u = SingularExpansion::new(1);
        u.add_term(c64(0.5, 0.0), 1, &[c64(-1.0, 0.0)]);
        u.add_term(c64(0.5, 0.0), 0, &[c64(-1.0, 0.0)]);
        u.add_term(c64(-0.5, 0.0), 0, &[c64(1.0, 0.0)]);
        let res = apply_fuchs(&a, &u, None)?.sub(&f).max_abs();
        let sol = solve_asymptotics(&a, None, &f, -0.5, f64::NEG_INFINITY, 1)?;
        let diff = sol.total.sub(&u).max_abs();
        let metric = res.max(diff);
        Ok((metric < 1e-12, metric, 1e-12, format!("residual {res:.1e}, solver vs closed form {diff:.1e}")))
    })();
    finish(6, "resonance worked example", t0, r)
}

/// Kato cusp `c_1 / c_0 = -Z` for the s-wave Coulomb operator.
pub fn coulomb_cusp() -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let mut worst: f64 = 0.0;
        let mut notes = Vec::new();
        for z in [1.0, 2.0] {
            let a = cone_builtin("coulomb_swave", json!({"Z": z, "E": -z * z / 2.0}))?;
            let sol = solve_asymptotics(&a, None, &SingularExpansion::new(1), 1.0, f64::NEG_INFINITY, 6)?;
            let c0 = sol.total.coefficient(c64(0.0, 0.0), 0).map_or(c64(0.0, 0.0), |c| c[0]);
            let c1 = sol.total.coefficient(c64(-1.0, 0.0), 0).map_or(c64(0.0, 0.0), |c| c[0]);
            let ratio = c1 / c0;
            let oracle = frobenius_oracle(&a, 0, &SingularExpansion::new(1), 1.0, f64::NEG_INFINITY, 6, &Default::default())?;
            let phi = &oracle.kernel.iter().find(|(r, s, _)| r.norm() < 1e-10 && *s == 0).expect("root 0").2;
            let o = phi.coefficient(c64(-1.0, 0.0), 0).map_or(c64(f64::NAN, 0.0), |c| c[0])
                / phi.coefficient(c64(0.0, 0.0), 0).map_or(c64(f64::NAN, 0.0), |c| c[0]);
            worst = worst.max((ratio + z).norm()).max((o - ratio).norm());
            notes.push(format!("Z={z}: c1/c0 = {:.12}", ratio.re));
        }
        Ok((worst < 1e-8, worst, 1e-8, notes.join(", ")))
    })();
    finish(7, "Coulomb cusp", t0, r)
}

/// Edge Laplacian in R^3: pole drift, Leibniz defects and reduction to the cone.
pub fn edge_consistency(seed: u64, k: usize, depth: usize) -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let a = match build_model("edge_laplacian_r3", json!({ "K": k }).as_object().expect("object"))? {
            BuiltOperator::Edge(a) => a,
            BuiltOperator::Cone(_) => unreachable!("edge built-in"),
        };
        let grid: Vec<Vec<f64>> = (0..11).map(|i| vec![-1.0 + 0.2 * i as f64]).collect();
        let field = conormal_inverse_field(&a, &grid)?;
        let mut g = rng(seed);
        let p = edge_parametrix_hierarchy(&a, depth);
        let mut samples = Vec::new();
        while samples.len() < 50 {
            let y = vec![g.gen_range(-1.0..1.0)];
            let z = c64(g.gen_range(-3.0..3.0), g.gen_range(0.2..2.0) * if g.gen_bool(0.5) { 1.0 } else { -1.0 });
            let eta = vec![g.gen_range(-2.0..2.0)];
            samples.push((y, z, eta));
        }
        let defects = p.leibniz_defects(&samples)?;
        let leibniz = defects.iter().fold(0.0f64, |x, &y| x.max(y));
        let cone = cone_builtin("cone_laplacian_s1", json!({ "K": k }))?;
        let hc = conormal_hierarchy(&cone, None, 0);
        let qc = parametrix_hierarchy(&hc, 0.25, 1, 0)?.levels[0].clone();
        let mut reduce: f64 = 0.0;
        for y in &grid {
            let red = a.reduce_to_cone(y)?;
            let hr = conormal_hierarchy(&red, None, 0);
            reduce = reduce.max(hierarchy_error(&hr, &hc));
            let qr = parametrix_hierarchy(&hr, 0.25, 1, 0)?.levels[0].clone();
            for (_, z, _) in samples.iter().take(10) {
                let zr = *z + 2.0;
                reduce = reduce.max(rel_err(&qr.eval(zr), &qc.eval(zr)));
                let k0 = p.at(y, zr, &[0.0])?.level_value(0, 0.0);
                reduce = reduce.max(rel_err(&k0, &qc.eval(zr)));
            }
        }
        let passed = field.drift < 1e-12 && leibniz < 1e-10 && reduce < 1e-12;
        Ok((
            passed,
            field.drift.max(leibniz).max(reduce),
            1e-10,
            format!("drift {:.1e}, Leibniz {leibniz:.1e} (levels 1..={depth}), reduction {reduce:.1e}", field.drift),
        ))
    })();
    finish(8, "edge consistency", t0, r)
}

/// Closed-form class of `r1 o r2` used to check the composition table.
fn expected(r1: Remainder, r2: Remainder) -> Remainder {
    use RemainderClass::*;
    let weighted = |r: Remainder| matches!(r.class, Flat(_) | GreenFlat(_));
    let green_like = |r: Remainder| matches!(r.class, Green | GreenFlat(_) | SmoothingMellin);
    if r1.class == Exact {
        return r2;
    }
    if r2.class == Exact {
        return r1;
    }
    if r1.class == Green || r2.class == Green {
        return Remainder::GREEN;
    }
    let gf = matches!(r1.class, GreenFlat(_)) || matches!(r2.class, GreenFlat(_));
    let sm = r1.class == SmoothingMellin || r2.class == SmoothingMellin;
    if gf && sm {
        return Remainder::GREEN;
    }
    if gf {
        return Remainder::green_flat(r1.order() + r2.order());
    }
    if sm {
        return Remainder::SMOOTHING_MELLIN;
    }
    debug_assert!(weighted(r1) && weighted(r2) && !green_like(r1));
    Remainder::flat(r1.order() + r2.order(), r2.order() > 0.0 || r1.green_flag || r2.green_flag)
}

/// Exhaustive pair and triple table of remainder composition.
pub fn remainder_algebra() -> SuiteResult {
    let t0 = Instant::now();
    let mut classes = vec![Remainder::EXACT, Remainder::SMOOTHING_MELLIN, Remainder::GREEN];
    for o in [0.0, 1.0, 2.5] {
        classes.push(Remainder::flat(o, false));
        classes.push(Remainder::flat(o, true));
        classes.push(Remainder::green_flat(o));
    }
    let mut bad_pairs = 0;
    for &a in &classes {
        for &b in &classes {
            if compose_remainder(a, b) != expected(a, b) {
                bad_pairs += 1;
            }
        }
    }
    let mut bad_triples = 0;
    for &a in &classes {
        for &b in &classes {
            for &c in &classes {
                if compose_remainder(compose_remainder(a, b), c) != compose_remainder(a, compose_remainder(b, c)) {
                    bad_triples += 1;
                }
            }
        }
    }
    let n = classes.len();
    let r = Ok((
        bad_pairs == 0 && bad_triples == 0,
        (bad_pairs + bad_triples) as f64,
        0.0,
        format!("{} pairs, {} triples, {bad_pairs} table and {bad_triples} associativity failures", n * n, n * n * n),
    ));
    finish(9, "remainder-class algebra", t0, r)
}

pub fn random_rhs(g: &mut Rng8, size: usize, top: f64) -> SingularExpansion {
    let mut f = SingularExpansion::new(size);
    let terms = g.gen_range(1..=3);
    for i in 0..terms {
        let p = c64(top - i as f64 * g.gen_range(0.3..0.9), if g.gen_bool(0.3) { g.gen_range(-0.5..0.5) } else { 0.0 });
        let c: Vec<Complex64> = (0..size).map(|_| c64(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0))).collect();
        f.add_term(p, g.gen_range(0..=1), &c);
    }
    f.normalized()
}

/// Residual of the solver is flat to `N - 1` orders below the leading right-hand side term.
pub fn flat_residual_law(seed: u64, count: usize, depth: usize) -> SuiteResult {
    let t0 = Instant::now();
    let r = (|| {
        let mut g = rng(seed);
        let mut worst: f64 = 0.0;
        let mut ok = 0;
        for _ in 0..count {
            let e = random_elliptic(&mut g)?;
            let line = (e.n as f64 + 1.0) / 2.0 - e.gamma + e.op.mu as f64;
            let top = line - g.gen_range(0.1..1.0);
            let f = random_rhs(&mut g, e.op.size(), top);
            let sol = solve_asymptotics(&e.op, None, &f, e.gamma, f64::NEG_INFINITY, depth)?;
            worst = worst.max(sol.flat_law.worst);
            if sol.flat_law.ok {
                ok += 1;
            }
        }
        Ok((ok == count, worst, crate::solver::solve::RESIDUAL_TOL, format!("{ok}/{count} problems, N = {depth}")))
    })();
    finish(10, "flat-residual law", t0, r)
}

/// All suites with the acceptance sizes.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    vec![
        indicial_s1(8, 0.5),
        translation_oracle(seed, 50),
        parametrix_defects(seed, 20, 6),
        recursion_cross_check(seed, 10),
        frobenius_equivalence(seed, 10, 6),
        resonance_example(),
        coulomb_cusp(),
        edge_consistency(seed, 4, 4),
        remainder_algebra(),
        flat_residual_law(seed, 10, 5),
    ]
}

pub fn report_json(results: &[SuiteResult], seed: u64) -> Value {
    let mut m = Map::new();
    m.insert("seed".into(), json!(seed));
    m.insert("passed".into(), json!(results.iter().all(|r| r.passed)));
    m.insert("suites".into(), Value::Array(results.iter().map(SuiteResult::to_json).collect()));
    Value::Object(m)
}
