//! Command layer behind the `conecalc` binary.

use super::cache::{cache_key, Cache, Lookup};
use super::json::{self, complex, expansion, matrix, real};
use super::problem::{Problem, ProblemSpec};
use super::random::rng;
use super::verify;
use crate::cone::{
    check_conormal_ellipticity, check_sigma0_ellipticity, conormal_hierarchy, weight_line, ConormalReport,
    FuchsOperator, Sigma0Report, Sigma0Verdict,
};
use crate::edge::{check_edge_ellipticity, conormal_inverse_field, edge_parametrix_hierarchy};
use crate::error::{Error, Result};
use crate::parametrix::{parametrix_hierarchy, verify_parametrix, ParametrixHierarchy, ParametrixVerification};
use crate::solver::{kernel_seeds, solve_asymptotics, SingularExpansion};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};
use std::fmt::Write;
use std::path::PathBuf;

pub const COMMANDS: [&str; 6] = ["analyze", "parametrix", "asymptotics", "verify", "edge-analyze", "edge-parametrix"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Overrides the spec depth.
    pub order: Option<usize>,
    /// Overrides `weight.gamma`.
    pub gamma: Option<f64>,
    /// Defect and residual tolerance.
    pub tol: Option<f64>,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Result of a command: machine-readable payload, a table rendering,
/// diagnostics for stderr and the exit code.
#[derive(Clone, Debug)]
pub struct Output {
    pub value: Value,
    pub table: String,
    pub notes: Vec<String>,
    pub exit: i32,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json::to_canonical(&self.value) + "\n",
            Format::Table => self.table.clone(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotElliptic(_) => 2,
        Error::Schema(_) | Error::UnknownModel(_) | Error::InvalidInput(_) | Error::Json(_) | Error::Io(_) => 3,
        _ => 4,
    }
}

pub fn error_value(e: &Error) -> Value {
    let kind = match e {
        Error::NotElliptic(_) => "not_elliptic",
        Error::Schema(_) | Error::Json(_) => "schema",
        Error::UnknownModel(_) => "unknown_model",
        Error::InvalidInput(_) | Error::Io(_) => "invalid_input",
        _ => "numerical",
    };
    json!({"error": {"kind": kind, "message": e.to_string(), "exit_code": exit_code(e)}})
}

fn load(spec: Option<&str>, opts: &Options) -> Result<Problem> {
    let text = spec.ok_or_else(|| Error::InvalidInput("--spec FILE is required".into()))?;
    let mut s = ProblemSpec::from_json(text)?;
    if let Some(g) = opts.gamma {
        s.weight.gamma = g;
    }
    if let Some(n) = opts.order {
        s.depth = n;
    }
    s.build()
}

/// Runs `command` on the spec text.
pub fn run(command: &str, spec: Option<&str>, opts: &Options) -> Result<Output> {
    match command {
        "analyze" => analyze(&load(spec, opts)?),
        "parametrix" => parametrix(&load(spec, opts)?, opts),
        "asymptotics" => asymptotics(&load(spec, opts)?, opts),
        "edge-analyze" => edge_analyze(&load(spec, opts)?),
        "edge-parametrix" => edge_parametrix(&load(spec, opts)?, opts),
        "verify" => Ok(run_verify(opts.seed.unwrap_or(7))),
        other => Err(Error::InvalidInput(format!("unknown command {other:?}; expected one of {}", COMMANDS.join(", ")))),
    }
}

fn fmt_c(z: Complex64) -> String {
    let tiny = 1e-13 * z.norm().max(1.0);
    let clean = |x: f64| if x.abs() <= tiny { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.10}")
    } else {
        format!("{re:.10}{im:+.10}i")
    }
}

fn sigma0_value(s: &Sigma0Report) -> Value {
    let verdict = match s.verdict {
        Sigma0Verdict::Elliptic => "elliptic",
        Sigma0Verdict::NotElliptic => "not_elliptic",
        Sigma0Verdict::Undeterminable => "undeterminable",
    };
    json!({"verdict": verdict, "min_modulus": s.min_modulus.map(real), "reason": s.reason})
}

fn conormal_value(c: &ConormalReport) -> Value {
    let zero = |z: &crate::cone::ZeroInfo| json!({"z": complex(z.value), "multiplicity": z.multiplicity, "offset": z.offset});
    json!({
        "elliptic": c.elliptic,
        "line": c.line,
        "zeros": c.zeros.iter().map(zero).collect::<Vec<_>>(),
        "offending": c.offending.iter().map(zero).collect::<Vec<_>>(),
        "min_distance": real(c.min_distance),
        "infinite": c.infinite,
        "warnings": c.warnings,
    })
}

fn analyze(p: &Problem) -> Result<Output> {
    let a = p.cone()?;
    let sigma0 = check_sigma0_ellipticity(a);
    let h = conormal_hierarchy(a, p.mellin.as_ref(), 0);
    let conormal = check_conormal_ellipticity(&h, p.gamma, a.model.n)?;
    let (seeds, seed_warnings) = if p.mellin.is_none() {
        kernel_seeds(a, f64::NEG_INFINITY, f64::INFINITY)?
    } else {
        (Vec::new(), vec!["kernel seeds are not computed with a smoothing Mellin part".to_string()])
    };
    let elliptic = conormal.elliptic && sigma0.verdict != Sigma0Verdict::NotElliptic;
    let seeds_json: Vec<Value> = seeds
        .iter()
        .map(|s| {
            json!({
                "z": complex(s.root),
                "log": s.log,
                "mode": s.mode.map(|m| a.model.mode_labels[m].clone()),
                "vector": s.vector.iter().map(|c| complex(*c)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let value = json!({
        "command": "analyze",
        "model": a.model.name,
        "n": a.model.n,
        "mu": a.mu,
        "K": a.size(),
        "gamma": p.gamma,
        "elliptic": elliptic,
        "sigma0": sigma0_value(&sigma0),
        "conormal": conormal_value(&conormal),
        "indicial_exponents": seeds_json,
        "warnings": seed_warnings,
    });
    let mut t = String::new();
    writeln!(t, "model {}  n = {}  mu = {}  K = {}", a.model.name, a.model.n, a.mu, a.size()).ok();
    writeln!(t, "weight gamma = {}  line Re z = {}", p.gamma, conormal.line).ok();
    writeln!(t, "interior symbol: {:?} ({})", sigma0.verdict, sigma0.reason).ok();
    writeln!(t, "conormal symbol on the line: {}", if conormal.elliptic { "invertible" } else { "NOT invertible" }).ok();
    writeln!(t, "{:>28} {:>5} {:>10}  term", "zero z", "mult", "Re z-line").ok();
    for z in &conormal.zeros {
        writeln!(t, "{:>28} {:>5} {:>10.4}  r^(-z) = r^({})", fmt_c(z.value), z.multiplicity, z.offset, fmt_c(-z.value)).ok();
    }
    if !seeds.is_empty() {
        let logs = seeds.iter().filter(|s| s.log > 0).count();
        writeln!(t, "{} kernel seeds, {} with log terms", seeds.len(), logs).ok();
    }
    let mut notes = Vec::new();
    if !elliptic {
        notes.push(format!(
            "not elliptic: {}",
            if conormal.elliptic { sigma0.reason.clone() } else { format!("zeros on Re z = {}", conormal.line) }
        ));
    }
    Ok(Output { value, table: t, notes, exit: if elliptic { 0 } else { 2 } })
}

fn verification_value(v: &ParametrixVerification, tol: f64) -> Value {
    json!({
        "left": v.left.iter().map(|x| real(*x)).collect::<Vec<_>>(),
        "right": v.right.iter().map(|x| real(*x)).collect::<Vec<_>>(),
        "flat_order": v.flat_order,
        "remainder": json::remainder(&v.remainder),
        "tolerance": tol,
    })
}

fn compute_parametrix(p: &Problem, a: &FuchsOperator) -> Result<ParametrixHierarchy> {
    let h = conormal_hierarchy(a, p.mellin.as_ref(), p.depth);
    let report = check_conormal_ellipticity(&h, p.gamma, a.model.n)?;
    if !report.elliptic {
        return Err(Error::NotElliptic(format!("conormal symbol has zeros on Re z = {}", report.line)));
    }
    parametrix_hierarchy(&h, p.gamma, a.model.n, p.depth)
}

fn parametrix(p: &Problem, opts: &Options) -> Result<Output> {
    let a = p.cone()?;
    let tol = opts.tol.unwrap_or(crate::parametrix::verify::DEFECT_TOL);
    let mut notes = Vec::new();
    let cache = Cache::from_flag_or_env(opts.cache_dir.as_deref());
    let request = json!({"command": "parametrix", "spec": p.spec.to_value()});
    let key = cache_key(&request, p.depth);
    let mut cached = None;
    if let Some(c) = &cache {
        match c.load(&key) {
            Lookup::Hit(v) => match json::parse_parametrix(&v) {
                Ok(q) if json::to_canonical(&json::parametrix(&q)) == json::to_canonical(&v) => {
                    notes.push(format!("cache hit {key}"));
                    cached = Some(q);
                }
                _ => notes.push(format!("warning: cache entry {key} does not round-trip; recomputing")),
            },
            Lookup::Corrupt(why) => notes.push(format!("warning: corrupt cache entry {key} ({why}); recomputing")),
            Lookup::Miss => notes.push(format!("cache miss {key}")),
        }
    }
    let q = match cached {
        Some(q) => q,
        None => {
            let q = compute_parametrix(p, a)?;
            if let Some(c) = &cache {
                if let Err(e) = c.store(&key, &json::parametrix(&q)) {
                    notes.push(format!("warning: cache write failed: {e}"));
                }
            }
            q
        }
    };
    let h = conormal_hierarchy(a, p.mellin.as_ref(), p.depth);
    let v = verify_parametrix(&h, &q, &[])?;
    let worst = v.left.iter().chain(&v.right).fold(0.0f64, |x, &y| x.max(y));
    let value = json!({
        "command": "parametrix",
        "parametrix": json::parametrix(&q),
        "verification": verification_value(&v, tol),
        "passed": worst < tol,
    });
    let mut t = String::new();
    writeln!(t, "parametrix of order -{} at gamma = {}, depth {}", q.mu, q.gamma(), q.depth()).ok();
    writeln!(t, "symbol line Re z = {}", q.symbol_line()).ok();
    writeln!(t, "{:>5} {:>6} {:>12} {:>12}  remainder", "level", "poles", "left", "right").ok();
    for l in 0..=q.depth() {
        writeln!(
            t,
            "{:>5} {:>6} {:>12.3e} {:>12.3e}  {}",
            l,
            q.levels[l].poles().len(),
            v.left[l],
            v.right[l],
            q.bookkeeping[l]
        )
        .ok();
    }
    for w in &q.warnings {
        writeln!(t, "warning: {w}").ok();
    }
    Ok(Output { value, table: t, notes, exit: if worst < tol { 0 } else { 4 } })
}

fn expansion_table(t: &mut String, title: &str, e: &SingularExpansion) {
    writeln!(t, "{title}:").ok();
    if e.is_empty() {
        writeln!(t, "  (none)").ok();
        return;
    }
    writeln!(t, "  {:>26} {:>26} {:>3}  coefficients", "r^(-p): p", "plain exponent -p", "log").ok();
    for term in e.terms() {
        let c: Vec<String> = term.c.iter().map(|z| fmt_c(*z)).collect();
        writeln!(t, "  {:>26} {:>26} {:>3}  [{}]", fmt_c(term.p), fmt_c(-term.p), term.k, c.join(", ")).ok();
    }
}

fn asymptotics(p: &Problem, opts: &Options) -> Result<Output> {
    let a = p.cone()?;
    let sol = solve_asymptotics(a, p.mellin.as_ref(), &p.rhs, p.gamma, p.theta, p.depth)?;
    let tol = opts.tol.unwrap_or(crate::solver::solve::RESIDUAL_TOL);
    let flat_ok = sol.flat_law.worst <= tol;
    let value = json!({
        "command": "asymptotics",
        "depth": p.depth,
        "cutoff": sol.cutoff,
        "particular": expansion(&sol.particular),
        "kernel": expansion(&sol.kernel),
        "terms": expansion(&sol.total)["terms"].clone(),
        "flat_order": real(sol.total.flat_order),
        "residual": expansion(&sol.residual),
        "asymptotic_type": json::asymptotic_type(&sol.asymptotic_type),
        "closure": sol.closure.as_ref().map(json::asymptotic_type),
        "flat_law": {"threshold": sol.flat_law.threshold, "worst": real(sol.flat_law.worst), "ok": flat_ok, "tolerance": tol},
        "warnings": sol.warnings,
    });
    let mut t = String::new();
    writeln!(t, "asymptotics of u with A u = f, gamma = {}, N = {}", p.gamma, p.depth).ok();
    writeln!(t, "terms r^(-p) log^k r with Re p > {} kept", sol.cutoff).ok();
    expansion_table(&mut t, "particular", &sol.particular);
    expansion_table(&mut t, "kernel", &sol.kernel);
    writeln!(
        t,
        "residual: worst relative coefficient above Re p = {} is {:.3e} ({})",
        sol.flat_law.threshold,
        sol.flat_law.worst,
        if flat_ok { "flat" } else { "NOT flat" }
    )
    .ok();
    for w in &sol.warnings {
        writeln!(t, "warning: {w}").ok();
    }
    Ok(Output { value, table: t, notes: Vec::new(), exit: if flat_ok { 0 } else { 4 } })
}

fn edge_analyze(p: &Problem) -> Result<Output> {
    let a = p.edge()?;
    let grid = p.y_grid();
    let report = check_edge_ellipticity(a, p.gamma, &grid)?;
    let field = conormal_inverse_field(a, &grid)?;
    let per_y: Vec<Value> = report
        .conormal
        .iter()
        .zip(&field.poles)
        .map(|((y, c), poles)| {
            json!({
                "y": y,
                "conormal": conormal_value(c),
                "poles": poles.iter().map(|(z, m)| json!({"z": complex(*z), "order": m})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let value = json!({
        "command": "edge-analyze",
        "q": a.q,
        "mu": a.mu,
        "K": a.size(),
        "gamma": p.gamma,
        "elliptic": report.elliptic,
        "sigma0": sigma0_value(&report.sigma0),
        "offending_modes": report.offending_modes,
        "pole_drift": real(field.drift),
        "y_independent_poles": field.constant,
        "grid": per_y,
        "note": report.note,
        "warnings": field.warnings,
    });
    let mut t = String::new();
    writeln!(t, "edge operator q = {}  mu = {}  K = {}  gamma = {}", a.q, a.mu, a.size(), p.gamma).ok();
    writeln!(t, "interior symbol: {:?} ({})", report.sigma0.verdict, report.sigma0.reason).ok();
    writeln!(t, "line Re z = {}", weight_line(a.model.n, p.gamma)).ok();
    writeln!(t, "{:>24} {:>6} {:>9}", "y", "poles", "on line").ok();
    for ((y, c), poles) in report.conormal.iter().zip(&field.poles) {
        let ys: Vec<String> = y.iter().map(|v| format!("{v:.3}")).collect();
        writeln!(t, "{:>24} {:>6} {:>9}", ys.join(","), poles.len(), c.offending.len()).ok();
    }
    writeln!(t, "pole drift over the grid: {:.3e}", field.drift).ok();
    if !report.offending_modes.is_empty() {
        writeln!(t, "modes with zeros on the line: {}", report.offending_modes.join(", ")).ok();
    }
    if report.sigma0.verdict == Sigma0Verdict::Undeterminable {
        writeln!(t, "warning: interior ellipticity not checked").ok();
    }
    writeln!(t, "note: {}", report.note).ok();
    Ok(Output { value, table: t, notes: Vec::new(), exit: if report.elliptic { 0 } else { 2 } })
}

fn edge_parametrix(p: &Problem, opts: &Options) -> Result<Output> {
    let a = p.edge()?;
    let grid = p.y_grid();
    let report = check_edge_ellipticity(a, p.gamma, &grid)?;
    if !report.elliptic {
        return Err(Error::NotElliptic(format!("modes {} have conormal zeros on the line", report.offending_modes.join(", "))));
    }
    let tol = opts.tol.unwrap_or(1e-10);
    let k = edge_parametrix_hierarchy(a, p.depth);
    let line = weight_line(a.model.n, p.gamma) + a.mu as f64;
    let mut g = rng(opts.seed.unwrap_or(7));
    let mut samples = Vec::new();
    for _ in 0..20 {
        let y = grid[g.gen_range(0..grid.len())].clone();
        let z = Complex64::new(line, g.gen_range(-3.0..3.0));
        let eta: Vec<f64> = (0..a.q).map(|_| g.gen_range(-2.0..2.0)).collect();
        samples.push((y, z, eta));
    }
    let defects = k.leibniz_defects(&samples)?;
    let worst = defects.iter().fold(0.0f64, |x, &y| x.max(y));
    let shown: Vec<Value> = samples
        .iter()
        .take(3)
        .map(|(y, z, eta)| {
            let j = k.at(y, *z, eta)?;
            let levels: Vec<Value> =
                (0..=p.depth).map(|l| Value::Array(j.k[l].iter().map(|s| matrix(s.value())).collect())).collect();
            Ok(json!({"y": y, "z": complex(*z), "eta": eta, "k": levels}))
        })
        .collect::<Result<_>>()?;
    let value = json!({
        "command": "edge-parametrix",
        "depth": p.depth,
        "gamma": p.gamma,
        "line": line,
        "leibniz_defects": defects.iter().map(|x| real(*x)).collect::<Vec<_>>(),
        "tolerance": tol,
        "passed": worst < tol,
        "samples": shown,
    });
    let mut t = String::new();
    writeln!(t, "edge parametrix symbols k_0..k_{} on Re z = {line}", p.depth).ok();
    writeln!(t, "{:>5} {:>14}", "level", "Leibniz defect").ok();
    for (l, d) in defects.iter().enumerate() {
        writeln!(t, "{:>5} {:>14.3e}", l + 1, d).ok();
    }
    writeln!(t, "k_l = sum_s r^s K_(l,s); grades s = 0..l reported per sample in JSON").ok();
    Ok(Output { value, table: t, notes: Vec::new(), exit: if worst < tol { 0 } else { 4 } })
}

fn run_verify(seed: u64) -> Output {
    let results = verify::run_all(seed);
    let value = verify::report_json(&results, seed);
    let mut t = String::new();
    for r in &results {
        writeln!(t, "{}", r.line()).ok();
    }
    let passed = results.iter().all(|r| r.passed);
    writeln!(t, "{} of {} suites passed (seed {seed})", results.iter().filter(|r| r.passed).count(), results.len()).ok();
    Output { value, table: t, notes: Vec::new(), exit: if passed { 0 } else { 4 } }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: &str = r#"{"model":{"name":"euler_ode"},"weight":{"gamma":0}}"#;
    const RESONANT: &str = r#"{"model":{"name":"resonant","n":0,"K":1},
        "operator":{"mu":2,"taylor":[[[[-0.25]]],[[[0]]],[[[1]]]]},
        "weight":{"gamma":-0.5},
        "rhs":{"terms":[{"p_re":2.5,"p_im":0,"k":0,"c":[1]}]},"depth":1}"#;

    #[test]
    fn zero_on_line_exits_two() {
        let out = run("analyze", Some(EULER), &Options::default()).unwrap();
        assert_eq!(out.exit, 2);
        assert_eq!(out.value["elliptic"], false);
        let ok = run("analyze", Some(EULER), &Options { gamma: Some(0.25), ..Default::default() }).unwrap();
        assert_eq!(ok.exit, 0);
    }

    #[test]
    fn resonant_log_term() {
        let out = run("asymptotics", Some(RESONANT), &Options { order: Some(1), ..Default::default() }).unwrap();
        let terms = out.value["terms"].as_array().unwrap();
        let log = terms.iter().find(|t| t["k"] == 1).unwrap();
        assert_eq!(log["p_re"].as_f64(), Some(0.5));
        assert!((log["c"][0]["re"].as_f64().unwrap() + 1.0).abs() < 1e-12);
        assert!(out.table.contains("plain exponent"));
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Schema("x".into())), 3);
        assert_eq!(exit_code(&Error::UnknownModel("x".into())), 3);
        assert_eq!(exit_code(&Error::NotElliptic("x".into())), 2);
        assert_eq!(exit_code(&Error::Numerical("x".into())), 4);
        assert!(matches!(run("nope", None, &Options::default()), Err(Error::InvalidInput(_))));
        assert!(matches!(run("analyze", None, &Options::default()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn parametrix_through_cache() {
        let dir = tempfile::tempdir().unwrap();
        let opts = Options { cache_dir: Some(dir.path().to_path_buf()), gamma: Some(0.25), ..Default::default() };
        let first = run("parametrix", Some(EULER), &opts).unwrap();
        assert!(first.notes.iter().any(|n| n.starts_with("cache miss")));
        let second = run("parametrix", Some(EULER), &opts).unwrap();
        assert!(second.notes.iter().any(|n| n.starts_with("cache hit")));
        assert_eq!(first.render(Format::Json), second.render(Format::Json));
    }

    #[test]
    fn edge_commands() {
        let spec = r#"{"model":{"name":"edge_laplacian_r3","K":2},"weight":{"gamma":0.25},"edge":{"q":1},"depth":2}"#;
        let a = run("edge-analyze", Some(spec), &Options::default()).unwrap();
        assert_eq!(a.exit, 0, "{}", a.table);
        let p = run("edge-parametrix", Some(spec), &Options::default()).unwrap();
        assert_eq!(p.exit, 0, "{}", p.table);
        assert_eq!(p.value["leibniz_defects"].as_array().unwrap().len(), 2);
    }
}
