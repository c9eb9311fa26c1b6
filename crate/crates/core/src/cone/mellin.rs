//! Smoothing Mellin parts and commutation of weights past Mellin symbols.

use super::model::weight_line;
use crate::error::{Error, Result};
use crate::mero::MeroMatrix;

/// One term `r^j op_M^{gamma_j}(f_j)` of a smoothing Mellin operator.
#[derive(Clone, Debug)]
pub struct MellinTerm {
    pub j: usize,
    pub gamma_j: f64,
    pub symbol: MeroMatrix,
}

/// Smoothing Mellin part `sum_j r^j op_M^{gamma_j}(f_j)` attached to an operator.
#[derive(Clone, Debug, Default)]
pub struct SmoothingMellinPart {
    pub terms: Vec<MellinTerm>,
}

/// Distance below which a pole counts as lying on a weight line.
pub const LINE_TOL: f64 = 1e-8;

impl SmoothingMellinPart {
    /// Validates `gamma - j <= gamma_j <= gamma` and that no pole of `f_j`
    /// lies on its own weight line.
    pub fn new(terms: Vec<MellinTerm>, gamma: f64, n: usize) -> Result<Self> {
        for t in &terms {
            if t.gamma_j > gamma + LINE_TOL || t.gamma_j < gamma - t.j as f64 - LINE_TOL {
                return Err(Error::Incompatible(format!(
                    "Mellin weight {} outside [{}, {}] for j = {}",
                    t.gamma_j,
                    gamma - t.j as f64,
                    gamma,
                    t.j
                )));
            }
            let line = weight_line(n, t.gamma_j);
            if let Some(p) = t.symbol.pole_locations().into_iter().find(|p| (p.re - line).abs() <= LINE_TOL) {
                return Err(Error::Incompatible(format!(
                    "pole {p} of the level-{} Mellin symbol lies on Re z = {line}",
                    t.j
                )));
            }
        }
        Ok(Self { terms })
    }

    pub fn level(&self, j: usize) -> impl Iterator<Item = &MellinTerm> {
        self.terms.iter().filter(move |t| t.j == j)
    }

    pub fn max_level(&self) -> usize {
        self.terms.iter().map(|t| t.j).max().unwrap_or(0)
    }
}

/// Outcome of commuting `r^beta` through `op_M^gamma(f)`.
#[derive(Clone, Debug)]
pub struct WeightShift {
    /// `T^{-(beta - eps)} f`.
    pub shifted: MeroMatrix,
    /// True when no pole blocks the shift and `eps = 0`.
    pub legal: bool,
    pub eps_used: f64,
}

/// `op_M^gamma(f) r^beta = r^beta op_M^{gamma+beta}(T^{-beta} f)` when no pole
/// of `f` lies on `Re z = (n+1)/2 - (gamma + beta)`. Otherwise the shift stops
/// `eps` short of the blocked line.
pub fn weight_shift_commute(
    f: &MeroMatrix,
    gamma: f64,
    n: usize,
    beta: f64,
    eps_fallback: Option<f64>,
) -> Result<WeightShift> {
    if beta < 0.0 {
        return Err(Error::InvalidInput(format!("negative weight shift {beta}")));
    }
    if beta == 0.0 {
        return Ok(WeightShift { shifted: f.clone(), legal: true, eps_used: 0.0 });
    }
    let target = weight_line(n, gamma + beta);
    let poles = f.pole_locations();
    let blocked = poles.iter().any(|p| (p.re - target).abs() <= LINE_TOL);
    if !blocked {
        return Ok(WeightShift { shifted: f.translate_real(-beta), legal: true, eps_used: 0.0 });
    }
    let gap = poles
        .iter()
        .map(|p| p.re - target)
        .filter(|&d| d > LINE_TOL)
        .fold(f64::INFINITY, f64::min);
    let eps = eps_fallback.unwrap_or_else(|| (0.5 * gap).min(0.25));
    if !(eps > 0.0) || eps >= beta {
        return Err(Error::IllegalWeightShift(format!(
            "pole on Re z = {target} and fallback eps = {eps} is not in (0, {beta})"
        )));
    }
    let line = target + eps;
    if let Some(p) = poles.iter().find(|p| (p.re - line).abs() <= LINE_TOL) {
        return Err(Error::IllegalWeightShift(format!("pole {p} also lies on Re z = {line}")));
    }
    Ok(WeightShift { shifted: f.translate_real(-(beta - eps)), legal: false, eps_used: eps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::{c64, CMatrix};

    fn pole_at(p: f64) -> MeroMatrix {
        MeroMatrix::simple_pole(c64(p, 0.0), 1, CMatrix::from_element(1, 1, c64(1.0, 0.0)))
    }

    #[test]
    fn unobstructed_shift_translates() {
        let w = weight_shift_commute(&pole_at(3.0), 0.0, 0, 1.0, None).unwrap();
        assert!(w.legal);
        assert!((w.shifted.pole_locations()[0] - c64(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn blocked_shift_uses_fallback() {
        let w = weight_shift_commute(&pole_at(-0.5), 0.0, 0, 1.0, None).unwrap();
        assert!(!w.legal);
        assert_eq!(w.eps_used, 0.25);
        assert!(weight_shift_commute(&pole_at(0.3), 0.0, 0, 0.2, None).is_err());
        assert!(weight_shift_commute(&pole_at(-0.5), 0.0, 0, -1.0, None).is_err());
    }

    #[test]
    fn zero_shift_is_identity() {
        let w = weight_shift_commute(&pole_at(0.5), 0.0, 0, 0.0, None).unwrap();
        assert!(w.legal && w.eps_used == 0.0);
    }

    #[test]
    fn mellin_weights_are_validated() {
        let t = MellinTerm { j: 1, gamma_j: -2.0, symbol: pole_at(3.0) };
        assert!(SmoothingMellinPart::new(vec![t], 0.0, 0).is_err());
        let t = MellinTerm { j: 0, gamma_j: 0.0, symbol: pole_at(0.5) };
        assert!(SmoothingMellinPart::new(vec![t], 0.0, 0).is_err());
    }
}
