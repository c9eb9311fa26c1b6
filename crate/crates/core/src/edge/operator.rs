//! Edge-degenerate differential operators.

use super::ypoly::YPoly;
use crate::cone::{FuchsOperator, PrincipalSymbol, SpectralModel};
use crate::error::{Error, Result};
use crate::mero::linalg::{zeros, CMatrix};
use crate::mero::MatPolynomial;
use num_complex::Complex64;

/// Coefficient of `r^i (-r d_r)^j (r D_y)^alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCoeff {
    pub j: usize,
    pub alpha: Vec<u32>,
    pub i: usize,
    pub poly: YPoly,
}

/// `A = r^{-mu} sum a_{j alpha}(r, y) (-r d_r)^j (r D_y)^alpha` with
/// `j + |alpha| <= mu` and coefficients polynomial in `y`.
#[derive(Clone, Debug)]
pub struct EdgeDegenerateOperator {
    pub mu: usize,
    pub q: usize,
    pub model: SpectralModel,
    coeffs: Vec<EdgeCoeff>,
    pub principal: Option<PrincipalSymbol>,
}

impl EdgeDegenerateOperator {
    pub fn new(mu: usize, q: usize, model: SpectralModel, coeffs: Vec<EdgeCoeff>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInput("edge dimension must be at least 1".into()));
        }
        let k = model.basis_size;
        for c in &coeffs {
            let order = c.j + c.alpha.iter().sum::<u32>() as usize;
            if c.alpha.len() != q {
                return Err(Error::DimensionMismatch(format!("multi-index {:?} for q = {q}", c.alpha)));
            }
            if order > mu {
                return Err(Error::InvalidInput(format!("term of order {order} exceeds mu = {mu}")));
            }
            if c.poly.q != q || c.poly.size != k {
                return Err(Error::DimensionMismatch("coefficient polynomial shape".into()));
            }
        }
        Ok(Self { mu, q, model, coeffs, principal: None })
    }

    pub fn with_principal(mut self, p: PrincipalSymbol) -> Self {
        self.principal = Some(p);
        self
    }

    pub fn size(&self) -> usize {
        self.model.basis_size
    }

    pub fn coeffs(&self) -> &[EdgeCoeff] {
        &self.coeffs
    }

    pub fn is_y_independent(&self) -> bool {
        self.coeffs.iter().all(|c| c.poly.is_constant())
    }

    pub fn is_diagonal(&self) -> bool {
        self.coeffs.iter().all(|c| {
            c.poly.terms().iter().all(|(_, m)| {
                (0..m.nrows()).all(|a| (0..m.ncols()).all(|b| a == b || m[(a, b)].norm() == 0.0))
            })
        })
    }

    fn r_order(&self) -> usize {
        self.coeffs.iter().map(|c| c.i).max().unwrap_or(0)
    }

    /// `sigma_c(A)(y, z) = sum_j a_{j0}(0, y) z^j`.
    pub fn subordinate_conormal(&self, y: &[f64]) -> MatPolynomial {
        let k = self.size();
        let mut c = vec![zeros(k, k); self.mu + 1];
        for t in &self.coeffs {
            if t.i == 0 && t.alpha.iter().all(|&a| a == 0) {
                c[t.j] += t.poly.eval(y);
            }
        }
        MatPolynomial::with_shape(k, k, c).expect("finite coefficients")
    }

    /// Shifted symbol `m(y, z, eta) = sum a_{j alpha}(0, y) (z - mu)^j eta^alpha`.
    pub fn shifted_symbol(&self, y: &[f64], z: Complex64, eta: &[f64]) -> CMatrix {
        let k = self.size();
        let w = z - self.mu as f64;
        let mut out = zeros(k, k);
        for t in self.coeffs.iter().filter(|t| t.i == 0) {
            let e: f64 = t.alpha.iter().zip(eta).map(|(&a, x)| x.powi(a as i32)).product();
            out += t.poly.eval(y) * (w.powu(t.j as u32) * e);
        }
        out
    }

    /// Freezes `y = y0` and drops the edge covariable.
    pub fn reduce_to_cone(&self, y0: &[f64]) -> Result<FuchsOperator> {
        let k = self.size();
        let mut taylor = vec![vec![zeros(k, k); self.r_order() + 1]; self.mu + 1];
        for t in &self.coeffs {
            if t.alpha.iter().all(|&a| a == 0) {
                taylor[t.j][t.i] += t.poly.eval(y0);
            }
        }
        let mut a = FuchsOperator::new(self.mu, self.model.clone(), taylor)?;
        if let Some(p) = &self.principal {
            let frozen = match p {
                PrincipalSymbol::Quadratic(s) => {
                    let mut s = s.clone();
                    let pt = crate::cone::SymbolPoint { y: y0.to_vec(), ..Default::default() };
                    let c = if s.y_scale.is_empty() {
                        1.0
                    } else {
                        s.y_scale.iter().map(|(e, a)| a * e.iter().zip(&pt.y).map(|(&k, y)| y.powi(k as i32)).product::<f64>()).sum()
                    };
                    s.y_scale = vec![(Vec::new(), c)];
                    s.edge = 0.0;
                    PrincipalSymbol::Quadratic(s)
                }
                PrincipalSymbol::Custom(f) => {
                    let f = f.clone();
                    let y0 = y0.to_vec();
                    PrincipalSymbol::Custom(std::sync::Arc::new(move |p: &crate::cone::SymbolPoint| {
                        let mut p = p.clone();
                        p.y = y0.clone();
                        p.eta = vec![0.0; y0.len()];
                        f(&p)
                    }))
                }
            };
            a = a.with_principal(frozen);
        }
        Ok(a)
    }

    /// Multiplies every coefficient by the scalar polynomial `c(y)`.
    pub fn scaled_by(&self, c: &[(Vec<u32>, f64)]) -> Self {
        let coeffs = self.coeffs.iter().map(|t| EdgeCoeff { poly: t.poly.scale_by(c), ..t.clone() }).collect();
        let principal = match &self.principal {
            Some(PrincipalSymbol::Quadratic(s)) => {
                let mut s = s.clone();
                let base = if s.y_scale.is_empty() { vec![(vec![0; self.q], 1.0)] } else { s.y_scale.clone() };
                let mut prod = Vec::new();
                for (e, a) in &base {
                    for (f, b) in c {
                        let g: Vec<u32> = (0..self.q).map(|v| e.get(v).copied().unwrap_or(0) + f[v]).collect();
                        prod.push((g, a * b));
                    }
                }
                s.y_scale = prod;
                Some(PrincipalSymbol::Quadratic(s))
            }
            other => other.clone(),
        };
        Self { coeffs, principal, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::c64;

    fn euler_edge(shift_by_y: bool) -> EdgeDegenerateOperator {
        let c = |x: f64| CMatrix::from_element(1, 1, c64(x, 0.0));
        let mut a0 = vec![(vec![0], c(-0.25))];
        if shift_by_y {
            a0.push((vec![1], c(-1.0)));
        }
        let coeffs = vec![
            EdgeCoeff { j: 0, alpha: vec![0], i: 0, poly: YPoly::new(1, 1, a0).unwrap() },
            EdgeCoeff { j: 1, alpha: vec![0], i: 0, poly: YPoly::constant(1, c(1.0)) },
            EdgeCoeff { j: 0, alpha: vec![1], i: 0, poly: YPoly::constant(1, c(1.0)) },
        ];
        EdgeDegenerateOperator::new(1, 1, SpectralModel::point("e"), coeffs).unwrap()
    }

    #[test]
    fn subordinate_conormal_tracks_y() {
        let a = euler_edge(true);
        let s = a.subordinate_conormal(&[0.5]);
        assert_eq!(s.coeff(0)[(0, 0)], c64(-0.75, 0.0));
        assert_eq!(s.coeff(1)[(0, 0)], c64(1.0, 0.0));
    }

    #[test]
    fn reduction_drops_covariable() {
        let a = euler_edge(false);
        let f = a.reduce_to_cone(&[2.0]).unwrap();
        assert_eq!(f.level_symbol(0), a.subordinate_conormal(&[2.0]));
    }

    #[test]
    fn order_bound_is_enforced() {
        let c = CMatrix::from_element(1, 1, c64(1.0, 0.0));
        let bad = vec![EdgeCoeff { j: 1, alpha: vec![1], i: 0, poly: YPoly::constant(1, c) }];
        assert!(EdgeDegenerateOperator::new(1, 1, SpectralModel::point("e"), bad).is_err());
    }
}
