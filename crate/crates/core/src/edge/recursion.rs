//! Edge Mellin-symbol parametrix by successive solution of the Leibniz system
//! `sum_{|alpha| + kappa = l} 1/alpha! (d_z^a0 d_eta^a' m)((-r d_r)^a0 D_y^a' k_kappa) = 0`.
//!
//! With `eta~ = r eta` and `m = m~(y, z, eta~)`, each `d_eta` contributes a factor `r`,
//! so `k_l = sum_s r^s K_{l,s}(y, z, eta~)` and `(-r d_r)` acts on `r^s K` as
//! `r^s (-s - E) K` with `E = eta~ . d_eta~`. All functions of `(y, eta~)` are handled
//! as jets around the evaluation point.

use super::jet::{Jet, JetSpace};
use super::operator::EdgeDegenerateOperator;
use crate::error::{Error, Result};
use crate::mero::linalg::{binomial, factorial, norm, CMatrix};
use num_complex::Complex64;
use std::sync::Arc;

/// Edge parametrix symbols `k_0, ..., k_depth` of the shifted symbol of `A_0`.
#[derive(Clone, Debug)]
pub struct EdgeParametrix {
    pub op: EdgeDegenerateOperator,
    pub depth: usize,
}

pub fn edge_parametrix_hierarchy(a: &EdgeDegenerateOperator, depth: usize) -> EdgeParametrix {
    EdgeParametrix { op: a.clone(), depth }
}

/// Jets of `k_l` (graded by powers of `r`) and of `d_z^a0 m~` at one point.
#[derive(Clone, Debug)]
pub struct EdgeSymbolJets {
    pub y: Vec<f64>,
    pub z: Complex64,
    pub eta: Vec<f64>,
    q: usize,
    mu: usize,
    mz: Vec<Jet>,
    /// `k[l][s]` is the coefficient of `r^s` in `k_l`.
    pub k: Vec<Vec<Jet>>,
}

fn multi_indices(q: usize, max: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; q]];
    for _ in 0..max {
        let mut next = out.clone();
        for m in &out {
            for v in 0..q {
                let mut m2 = m.clone();
                m2[v] += 1;
                if !next.contains(&m2) && m2.iter().map(|&x| x as usize).sum::<usize>() <= max {
                    next.push(m2);
                }
            }
        }
        out = next;
    }
    out.sort_by_key(|m| m.iter().map(|&x| x as usize).sum::<usize>());
    out
}

fn symbol_jet(a: &EdgeDegenerateOperator, sp: &Arc<JetSpace>, y: &[f64], z: Complex64, eta: &[f64], a0: usize) -> Jet {
    let q = a.q;
    let w = z - a.mu as f64;
    let mut out = Jet::zero(sp, a.size());
    for t in a.coeffs().iter().filter(|t| t.i == 0 && t.j >= a0) {
        let zf = w.powu((t.j - a0) as u32) * (factorial(t.j) / factorial(t.j - a0));
        // (eta0 + d)^alpha
        let mut eparts: Vec<(Vec<u8>, f64)> = vec![(Vec::new(), 1.0)];
        for v in 0..q {
            let av = t.alpha[v];
            let mut next = Vec::new();
            for (m, c) in &eparts {
                for s in 0..=av {
                    let mut m2 = m.clone();
                    m2.push(s as u8);
                    next.push((m2, c * binomial(av as usize, s as usize) * eta[v].powi((av - s) as i32)));
                }
            }
            eparts = next;
        }
        for (b, c) in t.poly.expand_at(y) {
            if b.iter().sum::<u32>() as usize > sp.order {
                continue;
            }
            for (e, f) in &eparts {
                let mut m: Vec<u8> = b.iter().map(|&x| x as u8).collect();
                m.extend_from_slice(e);
                out.add_monomial(&m, &(&c * (zf * *f)));
            }
        }
    }
    out
}

impl EdgeSymbolJets {
    fn dm(&self, a0: usize, ap: &[u8]) -> Jet {
        let mut j = self.mz[a0].clone();
        for (v, &n) in ap.iter().enumerate() {
            for _ in 0..n {
                j = j.deriv(self.q + v);
            }
        }
        j
    }

    /// `(-s - E)^a0 D_y^a' K`.
    fn act(&self, kj: &Jet, s: usize, a0: usize, ap: &[u8]) -> Jet {
        let mut j = kj.clone();
        for (v, &n) in ap.iter().enumerate() {
            for _ in 0..n {
                j = j.deriv(v).scale(Complex64::new(0.0, -1.0));
            }
        }
        for _ in 0..a0 {
            let mut e = j.scale(Complex64::from(-(s as f64)));
            for v in 0..self.q {
                e = e.add(&j.deriv(self.q + v).times_linear(self.q + v, self.eta[v]).scale(Complex64::from(-1.0)));
            }
            j = e;
        }
        j
    }

    /// Terms of the level-`l` equation at grade `r^{s_out}`, excluding `m k_l`.
    fn level_terms(&self, l: usize, s_out: usize) -> Vec<Jet> {
        let mut out = Vec::new();
        let ord = l.min(self.mu);
        for a0 in 0..=ord {
            for ap in multi_indices(self.q, ord - a0) {
                let na: usize = ap.iter().map(|&x| x as usize).sum();
                if a0 + na == 0 || s_out < na {
                    continue;
                }
                let kappa = l - a0 - na;
                let s = s_out - na;
                if s > kappa {
                    continue;
                }
                let w = factorial(a0) * ap.iter().map(|&x| factorial(x as usize)).product::<f64>();
                let t = self.dm(a0, &ap).mul(&self.act(&self.k[kappa][s], s, a0, &ap));
                out.push(t.scale(Complex64::from(1.0 / w)));
            }
        }
        out
    }

    /// `k_l` at `(r, y, z, eta~)`: `sum_s r^s K_{l,s}`.
    pub fn level_value(&self, l: usize, r: f64) -> CMatrix {
        let mut acc = self.k[l][0].value().clone();
        for s in 1..self.k[l].len() {
            acc += self.k[l][s].value() * Complex64::from(r.powi(s as i32));
        }
        acc
    }

    /// Relative residual of the level-`l` equation, largest over the grades.
    pub fn defect(&self, l: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..=l {
            let mut terms: Vec<CMatrix> = self.level_terms(l, s).iter().map(|t| t.value().clone()).collect();
            terms.push(self.mz[0].mul(&self.k[l][s]).value().clone());
            let scale: f64 = terms.iter().map(norm).sum();
            let sum = terms.iter().fold(CMatrix::zeros(terms[0].nrows(), terms[0].ncols()), |a, t| a + t);
            if scale > 0.0 {
                worst = worst.max(norm(&sum) / scale);
            }
        }
        worst
    }
}

impl EdgeParametrix {
    /// Jets of `k_0..k_depth` at `(y, z, eta~)`.
    pub fn at(&self, y: &[f64], z: Complex64, eta: &[f64]) -> Result<EdgeSymbolJets> {
        let a = &self.op;
        if y.len() != a.q || eta.len() != a.q {
            return Err(Error::DimensionMismatch(format!("edge point needs {} coordinates", a.q)));
        }
        let sp = JetSpace::new(2 * a.q, self.depth + a.mu);
        let mz: Vec<Jet> = (0..=a.mu).map(|a0| symbol_jet(a, &sp, y, z, eta, a0)).collect();
        let k0 = mz[0].inverse().map_err(|_| {
            Error::Numerical(format!("shifted symbol singular at y = {y:?}, z = {z}, eta = {eta:?}"))
        })?;
        let mut jets = EdgeSymbolJets { y: y.to_vec(), z, eta: eta.to_vec(), q: a.q, mu: a.mu, mz, k: vec![vec![k0.clone()]] };
        let zero = Jet::zero(&sp, a.size());
        for l in 1..=self.depth {
            let mut level = Vec::with_capacity(l + 1);
            jets.k.push(vec![zero.clone(); l + 1]);
            for s in 0..=l {
                let sum = jets.level_terms(l, s).into_iter().fold(zero.clone(), |acc, t| acc.add(&t));
                level.push(k0.mul(&sum).scale(Complex64::from(-1.0)));
            }
            jets.k[l] = level;
        }
        Ok(jets)
    }

    /// Largest Leibniz defect per level `1..=depth` over the sample points.
    pub fn leibniz_defects(&self, samples: &[(Vec<f64>, Complex64, Vec<f64>)]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.depth];
        for (y, z, eta) in samples {
            let j = self.at(y, *z, eta)?;
            for (l, o) in out.iter_mut().enumerate() {
                *o = f64::max(*o, j.defect(l + 1));
            }
        }
        Ok(out)
    }
}
