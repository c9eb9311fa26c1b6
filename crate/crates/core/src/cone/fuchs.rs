//! Fuchs-type differential operators `A = r^{-mu} sum_j a_j(r) (-r d_r)^j`.

use super::model::SpectralModel;
use crate::error::{Error, Result};
use crate::mero::linalg::{binomial, zeros, CMatrix};
use crate::mero::MatPolynomial;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// Point of the rescaled cotangent bundle at which a principal symbol is sampled.
#[derive(Clone, Debug, Default)]
pub struct SymbolPoint {
    pub r: f64,
    pub rho: f64,
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Quadratic principal symbol
/// `s(r) c(y) (radial rho^2 + cross |xi|^2 + edge |eta|^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSymbol {
    pub radial: f64,
    pub cross: f64,
    pub edge: f64,
    /// Taylor coefficients of `s(r)`; empty means `s = 1`.
    pub r_scale: Vec<f64>,
    /// Monomials `(exponents, coefficient)` of `c(y)`; empty means `c = 1`.
    pub y_scale: Vec<(Vec<u32>, f64)>,
}

impl QuadraticSymbol {
    pub fn laplace_like(edge: f64) -> Self {
        Self { radial: 1.0, cross: 1.0, edge, r_scale: Vec::new(), y_scale: Vec::new() }
    }

    pub fn eval(&self, p: &SymbolPoint) -> f64 {
        let s = if self.r_scale.is_empty() {
            1.0
        } else {
            self.r_scale.iter().rev().fold(0.0, |acc, c| acc * p.r + c)
        };
        let c = if self.y_scale.is_empty() {
            1.0
        } else {
            self.y_scale
                .iter()
                .map(|(e, a)| a * e.iter().zip(&p.y).map(|(&k, y)| y.powi(k as i32)).product::<f64>())
                .sum()
        };
        let xi2: f64 = p.xi.iter().map(|x| x * x).sum();
        let eta2: f64 = p.eta.iter().map(|x| x * x).sum();
        s * c * (self.radial * p.rho * p.rho + self.cross * xi2 + self.edge * eta2)
    }
}

pub type SymbolFn = Arc<dyn Fn(&SymbolPoint) -> CMatrix + Send + Sync>;

/// Closed-form rescaled principal symbol attached to an operator.
#[derive(Clone)]
pub enum PrincipalSymbol {
    Quadratic(QuadraticSymbol),
    Custom(SymbolFn),
}

impl fmt::Debug for PrincipalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrincipalSymbol::Quadratic(q) => f.debug_tuple("Quadratic").field(q).finish(),
            PrincipalSymbol::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PrincipalSymbol {
    /// Smallest singular value of the symbol at a point.
    pub fn modulus(&self, p: &SymbolPoint) -> f64 {
        match self {
            PrincipalSymbol::Quadratic(q) => q.eval(p).abs(),
            PrincipalSymbol::Custom(f) => crate::mero::linalg::smallest_singular_value(&f(p)),
        }
    }
}

/// `A = r^{-mu} sum_{j <= mu} sum_i a[j][i] r^i (-r d_r)^j` on a spectral model.
#[derive(Clone, Debug)]
pub struct FuchsOperator {
    pub mu: usize,
    pub model: SpectralModel,
    taylor: Vec<Vec<CMatrix>>,
    pub principal: Option<PrincipalSymbol>,
    /// Set when the r-Taylor series was cut at a configured order.
    pub truncated: bool,
}

impl FuchsOperator {
    /// `taylor[j][i]` multiplies `r^i (-r d_r)^j`.
    pub fn new(mu: usize, model: SpectralModel, taylor: Vec<Vec<CMatrix>>) -> Result<Self> {
        let k = model.basis_size;
        if taylor.len() > mu + 1 {
            return Err(Error::InvalidInput(format!(
                "derivative index {} exceeds the order {mu}",
                taylor.len() - 1
            )));
        }
        let width = taylor.iter().map(|row| row.len()).max().unwrap_or(0).max(1);
        let mut rows = Vec::with_capacity(mu + 1);
        for j in 0..=mu {
            let mut row = Vec::with_capacity(width);
            for i in 0..width {
                let c = taylor.get(j).and_then(|r| r.get(i)).cloned().unwrap_or_else(|| zeros(k, k));
                if c.shape() != (k, k) {
                    return Err(Error::DimensionMismatch(format!(
                        "coefficient [{j}][{i}] has shape {:?}, expected {k}x{k}",
                        c.shape()
                    )));
                }
                if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::InvalidInput(format!("non-finite coefficient [{j}][{i}]")));
                }
                row.push(c);
            }
            rows.push(row);
        }
        Ok(Self { mu, model, taylor: rows, principal: None, truncated: false })
    }

    pub fn with_principal(mut self, p: PrincipalSymbol) -> Self {
        self.principal = Some(p);
        self
    }

    pub fn size(&self) -> usize {
        self.model.basis_size
    }

    /// Highest r-power present in the Taylor data.
    pub fn r_order(&self) -> usize {
        self.taylor[0].len() - 1
    }

    pub fn coeff(&self, j: usize, i: usize) -> CMatrix {
        self.taylor
            .get(j)
            .and_then(|r| r.get(i))
            .cloned()
            .unwrap_or_else(|| zeros(self.size(), self.size()))
    }

    pub fn taylor(&self) -> &[Vec<CMatrix>] {
        &self.taylor
    }

    /// Conormal symbol of level `i`: `h_i(z) = sum_j a[j][i] z^j`.
    pub fn level_symbol(&self, i: usize) -> MatPolynomial {
        let k = self.size();
        let coeffs = (0..=self.mu).map(|j| self.coeff(j, i)).collect();
        MatPolynomial::with_shape(k, k, coeffs).expect("validated coefficients")
    }

    /// Whether every coefficient is diagonal in the model basis.
    pub fn is_diagonal(&self) -> bool {
        self.taylor.iter().flatten().all(|c| {
            (0..c.nrows()).all(|a| (0..c.ncols()).all(|b| a == b || c[(a, b)] == Complex64::new(0.0, 0.0)))
        })
    }

    /// Scalar operator for mode `m` of a diagonal operator.
    pub fn mode(&self, m: usize) -> Result<FuchsOperator> {
        if !self.is_diagonal() {
            return Err(Error::NonDiagonal);
        }
        let taylor = self
            .taylor
            .iter()
            .map(|row| row.iter().map(|c| CMatrix::from_element(1, 1, c[(m, m)])).collect())
            .collect();
        FuchsOperator::new(self.mu, SpectralModel::point(format!("{} mode {m}", self.model.name)), taylor)
    }
}

/// Limits for operator composition.
#[derive(Clone, Copy, Debug)]
pub struct ComposeLimits {
    /// r-Taylor terms above this order are discarded and the result flagged.
    pub max_r_order: Option<usize>,
    pub max_z_degree: usize,
}

impl Default for ComposeLimits {
    fn default() -> Self {
        Self { max_r_order: None, max_z_degree: 64 }
    }
}

/// Composition `A o B` by commuting `(-r d_r)^j` through `r^c`: `D^j r^c = r^c (D - c)^j`.
pub fn direct_compose(a: &FuchsOperator, b: &FuchsOperator, limits: ComposeLimits) -> Result<FuchsOperator> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch("operators act on different bases".into()));
    }
    let mu = a.mu + b.mu;
    if mu > limits.max_z_degree {
        return Err(Error::Overflow(format!("z-degree {mu} exceeds {}", limits.max_z_degree)));
    }
    let k = a.size();
    let full = a.r_order() + b.r_order();
    let keep = limits.max_r_order.map(|m| m.min(full)).unwrap_or(full);
    let mut out = vec![vec![zeros(k, k); keep + 1]; mu + 1];
    let nu = b.mu as f64;
    for j in 0..=a.mu {
        for i in 0..=a.r_order() {
            let aji = a.coeff(j, i);
            if aji.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            for kk in 0..=b.mu {
                for s in 0..=b.r_order() {
                    if i + s > keep {
                        continue;
                    }
                    let bks = b.coeff(kk, s);
                    let prod = &aji * &bks;
                    // D^j r^{s - nu} = r^{s - nu} sum_t C(j,t) (nu - s)^{j-t} D^t
                    let shift = nu - s as f64;
                    for t in 0..=j {
                        let f = binomial(j, t) * shift.powi((j - t) as i32);
                        if f != 0.0 {
                            out[t + kk][i + s] += &prod * Complex64::from(f);
                        }
                    }
                }
            }
        }
    }
    let mut op = FuchsOperator::new(mu, a.model.clone(), out)?;
    op.truncated = keep < full || a.truncated || b.truncated;
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::c64;

    fn scalar_op(mu: usize, a: &[&[f64]]) -> FuchsOperator {
        let taylor = a
            .iter()
            .map(|row| row.iter().map(|&x| CMatrix::from_element(1, 1, c64(x, 0.0))).collect())
            .collect();
        FuchsOperator::new(mu, SpectralModel::point("t"), taylor).unwrap()
    }

    #[test]
    fn rejects_derivative_beyond_order() {
        let t = vec![vec![CMatrix::from_element(1, 1, c64(1.0, 0.0))]; 3];
        assert!(FuchsOperator::new(1, SpectralModel::point("t"), t).is_err());
    }

    #[test]
    fn compose_commutes_r_powers() {
        // A = r^{-1} D, B = r^{-1}: AB = r^{-1} D r^{-1} = r^{-2} (D + 1)
        let a = scalar_op(1, &[&[0.0], &[1.0]]);
        let b = scalar_op(1, &[&[1.0]]);
        let c = direct_compose(&a, &b, ComposeLimits::default()).unwrap();
        assert_eq!(c.mu, 2);
        assert_eq!(c.coeff(0, 0)[(0, 0)], c64(1.0, 0.0));
        assert_eq!(c.coeff(1, 0)[(0, 0)], c64(1.0, 0.0));
        assert_eq!(c.coeff(2, 0)[(0, 0)], c64(0.0, 0.0));
    }

    #[test]
    fn compose_truncates_r_order() {
        let a = scalar_op(1, &[&[1.0, 1.0], &[1.0]]);
        let lim = ComposeLimits { max_r_order: Some(1), max_z_degree: 8 };
        let c = direct_compose(&a, &a, lim).unwrap();
        assert!(c.truncated);
        assert_eq!(c.r_order(), 1);
        let lim = ComposeLimits { max_r_order: None, max_z_degree: 1 };
        assert!(direct_compose(&a, &a, lim).is_err());
    }
}
