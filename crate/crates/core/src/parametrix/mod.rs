//! Parametrix hierarchies `P = sum_l r^{mu+l} op_M(q_l)` of elliptic Fuchs-type operators.

pub mod decompose;
pub mod recursion;
pub mod samples;
pub mod verify;

pub use decompose::{taylor_decompose, TaylorDecomposition, TaylorTerm};
pub use recursion::{operator_recursion, OperatorRecursion, ShiftRecord, Word};
pub use samples::sample_points;
pub use verify::{verify_parametrix, ParametrixVerification};

use crate::asymp::{Remainder, WeightData};
use crate::cone::{conormal_zeros, weight_line, ConormalHierarchy, LINE_TOL};
use crate::error::{Error, Result};
use crate::mero::MeroMatrix;

/// Symbols `q_l` of a parametrix of order `-mu` together with its weight data.
#[derive(Clone, Debug)]
pub struct ParametrixHierarchy {
    pub mu: usize,
    pub n: usize,
    pub weight: WeightData,
    pub levels: Vec<MeroMatrix>,
    /// Remainder class attached to each level.
    pub bookkeeping: Vec<Remainder>,
    pub warnings: Vec<String>,
}

impl ParametrixHierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Target weight `gamma` of the parametrix.
    pub fn gamma(&self) -> f64 {
        self.weight.gamma_out
    }

    /// Integration line of the `q_l`: `Re z = (n+1)/2 - (gamma - mu)`.
    pub fn symbol_line(&self) -> f64 {
        weight_line(self.n, self.weight.gamma_in)
    }

    /// The hierarchy of order `-mu` formed by the `q_l`.
    pub fn as_hierarchy(&self) -> ConormalHierarchy {
        ConormalHierarchy { order: -(self.mu as i64), levels: self.levels.clone() }
    }
}

/// `q_0(z) = (h_0(z - mu))^{-1}`, after checking `h_0` on `Re z = (n+1)/2 - gamma`.
pub fn leading_parametrix(h0: &MeroMatrix, mu: usize, gamma: f64, n: usize) -> Result<MeroMatrix> {
    let line = weight_line(n, gamma);
    let (zeros, _, _) = conormal_zeros(h0)?;
    let bad: Vec<String> = zeros
        .iter()
        .filter(|z| (z.value.re - line).abs() <= LINE_TOL)
        .map(|z| format!("{} (multiplicity {})", z.value, z.multiplicity))
        .collect();
    if !bad.is_empty() {
        return Err(Error::NotElliptic(format!(
            "conormal symbol not invertible on Re z = {line}: zeros {}",
            bad.join(", ")
        )));
    }
    Ok(h0.inverse()?.translate_real(-(mu as f64)))
}

/// `q_l(z) = -[sum_{j=1..l} q_{l-j}(z - j) h_j(z - mu)] q_0(z)`.
pub fn parametrix_hierarchy(h: &ConormalHierarchy, gamma: f64, n: usize, depth: usize) -> Result<ParametrixHierarchy> {
    if h.order < 0 {
        return Err(Error::InvalidInput("parametrix of an operator of negative order".into()));
    }
    let mu = h.order as usize;
    let q0 = leading_parametrix(&h.levels[0], mu, gamma, n)?;
    let shifted_h: Vec<MeroMatrix> = (0..=depth).map(|j| h.level(j).translate_real(-(mu as f64))).collect();
    let mut levels = vec![q0.clone()];
    for l in 1..=depth {
        let mut acc = MeroMatrix::zero(q0.rows(), q0.cols());
        for j in 1..=l {
            if shifted_h[j].is_zero() || levels[l - j].is_zero() {
                continue;
            }
            acc = acc.add(&levels[l - j].translate_real(-(j as f64)).mul(&shifted_h[j]));
        }
        levels.push(acc.mul(&q0).neg());
    }
    let weight = WeightData::for_order(gamma - mu as f64, -(mu as f64), f64::NEG_INFINITY)?;
    let line = weight_line(n, weight.gamma_in);
    let mut warnings = Vec::new();
    for (l, q) in levels.iter().enumerate() {
        for p in q.pole_locations() {
            if (p.re - line).abs() <= LINE_TOL {
                warnings.push(format!("level {l} has a pole {p} on the integration line Re z = {line}"));
            }
        }
    }
    let bookkeeping = (0..=depth)
        .map(|l| if l == 0 { Remainder::EXACT } else { Remainder::flat(l as f64, true) })
        .collect();
    Ok(ParametrixHierarchy { mu, n, weight, levels, bookkeeping, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{conormal_hierarchy, FuchsOperator, SpectralModel};
    use crate::mero::linalg::{c64, CMatrix};

    fn euler(c: &[f64]) -> FuchsOperator {
        let taylor = c.iter().map(|&x| vec![CMatrix::from_element(1, 1, c64(x, 0.0))]).collect();
        FuchsOperator::new(c.len() - 1, SpectralModel::point("euler"), taylor).unwrap()
    }

    #[test]
    fn leading_symbol_of_euler_operator() {
        let a = euler(&[-0.25, 0.0, 1.0]);
        let h = conormal_hierarchy(&a, None, 0);
        let q0 = leading_parametrix(&h.levels[0], 2, 0.25, 0).unwrap();
        let mut poles: Vec<f64> = q0.pole_locations().iter().map(|p| p.re).collect();
        poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((poles[0] - 1.5).abs() < 1e-12 && (poles[1] - 2.5).abs() < 1e-12);
        assert!(matches!(leading_parametrix(&h.levels[0], 2, 0.0, 0), Err(Error::NotElliptic(_))));
    }

    #[test]
    fn higher_levels_vanish_for_euler_operator() {
        let a = euler(&[-0.25, 0.0, 1.0]);
        let p = parametrix_hierarchy(&conormal_hierarchy(&a, None, 3), 0.25, 0, 3).unwrap();
        assert_eq!(p.levels.len(), 4);
        assert!(p.levels[1..].iter().all(|q| q.is_zero()));
    }
}
