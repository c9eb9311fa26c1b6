//! Seeded random instances for the verification suites.

use crate::cone::{conormal_hierarchy, ConormalHierarchy, FuchsOperator, SpectralModel};
use crate::error::Result;
use crate::mero::linalg::{c64, eye, CMatrix};
use crate::mero::{polyeig_with, MatPolynomial, PolyeigOptions};
use crate::solver::SingularExpansion;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cnum(rng: &mut Rng8, scale: f64) -> Complex64 {
    c64(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

fn cmat(rng: &mut Rng8, k: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(k, k, |_, _| cnum(rng, scale))
}

/// Random operator with `taylor[j][i]` for `j <= mu`, `i <= imax`.
pub fn random_fuchs(rng: &mut Rng8, k: usize, mu: usize, imax: usize) -> FuchsOperator {
    let model = if k == 1 { SpectralModel::point("random") } else { SpectralModel::new("random", 1, k).expect("valid") };
    let taylor = (0..=mu).map(|_| (0..=imax).map(|_| cmat(rng, k, 1.0)).collect()).collect();
    FuchsOperator::new(mu, model, taylor).expect("consistent shapes")
}

/// Random pair for composition checks: `K <= 4`, `mu, nu <= 3`, `I_max <= 3`.
pub fn random_pair(rng: &mut Rng8) -> (FuchsOperator, FuchsOperator) {
    let k = rng.gen_range(1..=4);
    let (mu, nu) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    let (ia, ib) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    (random_fuchs(rng, k, mu, ia), random_fuchs(rng, k, nu, ib))
}

/// Weight `gamma` whose line `Re z = (n+1)/2 - gamma` keeps at least `gap`
/// from every zero of `h0`, preferring lines near `target`.
fn pick_gamma(roots: &[Complex64], n: usize, target: f64, gap: f64) -> f64 {
    let mut line = target;
    for step in 0..400 {
        let sign = if step % 2 == 0 { 1.0 } else { -1.0 };
        let cand = target + sign * 0.05 * ((step + 1) / 2) as f64;
        if roots.iter().all(|r| (r.re - cand).abs() >= gap) {
            line = cand;
            break;
        }
    }
    (n as f64 + 1.0) / 2.0 - line
}

/// Elliptic random operator: invertible leading coefficient, `K <= 3`, `mu <= 3`.
#[derive(Clone, Debug)]
pub struct RandomElliptic {
    pub op: FuchsOperator,
    pub gamma: f64,
    pub n: usize,
}

pub fn random_elliptic(rng: &mut Rng8) -> Result<RandomElliptic> {
    let k = rng.gen_range(1..=3);
    let mu = rng.gen_range(1..=3);
    let imax = rng.gen_range(1..=3);
    let mut op = random_fuchs(rng, k, mu, imax);
    let mut taylor: Vec<Vec<CMatrix>> = op.taylor().to_vec();
    taylor[mu][0] = eye(k) + cmat(rng, k, 0.2);
    for c in taylor[mu].iter_mut().skip(1) {
        *c *= c64(0.1, 0.0);
    }
    op = FuchsOperator::new(mu, op.model.clone(), taylor)?;
    let n = op.model.n;
    let opts = PolyeigOptions { allow_infinite: true, ..Default::default() };
    let roots: Vec<Complex64> = polyeig_with(&op.level_symbol(0), &opts)?.roots.iter().map(|r| r.value).collect();
    let target = rng.gen_range(-0.5..1.5);
    let gamma = pick_gamma(&roots, n, target, 0.15);
    Ok(RandomElliptic { op, gamma, n })
}

pub fn random_hierarchy(rng: &mut Rng8, depth: usize) -> Result<(ConormalHierarchy, f64, usize)> {
    let e = random_elliptic(rng)?;
    Ok((conormal_hierarchy(&e.op, None, depth), e.gamma, e.n))
}

/// Scalar regular-singular problem with exactly known indicial roots.
#[derive(Clone, Debug)]
pub struct RandomOde {
    pub op: FuchsOperator,
    pub roots: Vec<(Complex64, usize)>,
    pub f: SingularExpansion,
    pub gamma: f64,
}

/// Order `<= 4`; double roots, integer-separated roots and resonant
/// right-hand sides occur with positive probability.
pub fn random_ode(rng: &mut Rng8) -> RandomOde {
    let mu = rng.gen_range(1..=4);
    let mut roots: Vec<(Complex64, usize)> = Vec::new();
    let mut left = mu;
    while left > 0 {
        let base = c64((rng.gen_range(-150..150) as f64) / 100.0, if rng.gen_bool(0.25) { rng.gen_range(-1.0..1.0) } else { 0.0 });
        if roots.iter().any(|(r, _)| (r - base).norm() < 0.1) {
            continue;
        }
        let m = if left >= 2 && rng.gen_bool(0.3) { 2 } else { 1 };
        roots.push((base, m));
        left -= m;
        if left > 0 && rng.gen_bool(0.3) {
            let partner = base - 1.0;
            if !roots.iter().any(|(r, _)| (r - partner).norm() < 0.1) {
                roots.push((partner, 1));
                left -= 1;
            }
        }
    }
    let flat: Vec<Complex64> = roots.iter().flat_map(|(r, m)| std::iter::repeat_n(*r, *m)).collect();
    let h0 = MatPolynomial::from_roots(1, &flat);
    let imax = rng.gen_range(1..=3);
    let mut taylor = vec![vec![CMatrix::zeros(1, 1); imax + 1]; mu + 1];
    for j in 0..=mu {
        taylor[j][0] = h0.coeff(j);
        for (i, t) in taylor[j].iter_mut().enumerate().skip(1) {
            let s = if j == mu { 0.2 } else { 1.0 };
            *t = cmat(rng, 1, s / i as f64);
        }
    }
    let op = FuchsOperator::new(mu, SpectralModel::point("random ode"), taylor).expect("scalar operator");
    let values: Vec<Complex64> = roots.iter().map(|(r, _)| *r).collect();
    let max_re = values.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
    let gamma = pick_gamma(&values, 0, max_re + rng.gen_range(0.2..0.8), 0.15);
    let line = 0.5 - gamma;
    let mut f = SingularExpansion::new(1);
    let terms = rng.gen_range(1..=2);
    for _ in 0..terms {
        let e = if rng.gen_bool(0.5) {
            let (r, _) = roots[rng.gen_range(0..roots.len())];
            r - rng.gen_range(0..=1) as f64
        } else {
            loop {
                let e = c64(rng.gen_range(-1.5..line - 0.05), 0.0);
                if values.iter().all(|r| ((r - e).re - (r - e).re.round()).abs() > 0.05 || (r - e).im.abs() > 0.05) {
                    break e;
                }
            }
        };
        if e.re >= line - 0.05 {
            continue;
        }
        let k = rng.gen_range(0..=1);
        f.add_term(e + mu as f64, k, &[cnum(rng, 1.0)]);
    }
    if f.is_empty() {
        f.add_term(c64(line - 1.3 + mu as f64, 0.0), 0, &[c64(1.0, 0.0)]);
    }
    RandomOde { op, roots, f: f.normalized(), gamma }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_instances() {
        let a = random_ode(&mut rng(3));
        let b = random_ode(&mut rng(3));
        assert_eq!(a.roots, b.roots);
        assert_eq!(a.f, b.f);
        assert_eq!(a.gamma, b.gamma);
    }

    #[test]
    fn ode_roots_are_exact_zeros() {
        for s in 0..20 {
            let p = random_ode(&mut rng(s));
            let h = p.op.level_symbol(0);
            for (r, _) in &p.roots {
                assert!(h.eval(*r)[(0, 0)].norm() < 1e-12);
                assert!((r.re - (0.5 - p.gamma)).abs() >= 0.15 - 1e-12);
            }
        }
    }

    #[test]
    fn elliptic_lines_avoid_zeros() {
        for s in 0..10 {
            let e = random_elliptic(&mut rng(s)).unwrap();
            let h = conormal_hierarchy(&e.op, None, 0);
            assert!(crate::cone::check_conormal_ellipticity(&h, e.gamma, e.n).unwrap().elliptic);
        }
    }
}
