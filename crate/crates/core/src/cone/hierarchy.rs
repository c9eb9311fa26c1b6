//! Conormal symbol hierarchies and the translation product.

use super::fuchs::FuchsOperator;
use super::mellin::SmoothingMellinPart;
use crate::error::{Error, Result};
use crate::mero::{MatPolynomial, MeroMatrix};
use num_complex::Complex64;

/// Sequence `(h_l)` of conormal symbols of an operator of order `order`:
/// `A = r^{-order} sum_l r^l op_M(h_l)`.
#[derive(Clone, Debug)]
pub struct ConormalHierarchy {
    pub order: i64,
    pub levels: Vec<MeroMatrix>,
}

impl ConormalHierarchy {
    pub fn new(order: i64, levels: Vec<MeroMatrix>) -> Result<Self> {
        let first = levels.first().ok_or_else(|| Error::InvalidInput("empty hierarchy".into()))?;
        let shape = first.shape();
        if levels.iter().any(|l| l.shape() != shape) {
            return Err(Error::DimensionMismatch("levels of unequal size".into()));
        }
        Ok(Self { order, levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn size(&self) -> usize {
        self.levels[0].rows()
    }

    pub fn level(&self, l: usize) -> MeroMatrix {
        self.levels
            .get(l)
            .cloned()
            .unwrap_or_else(|| MeroMatrix::zero(self.size(), self.size()))
    }

    pub fn truncate(&self, depth: usize) -> Self {
        Self { order: self.order, levels: (0..=depth).map(|l| self.level(l)).collect() }
    }
}

/// `(h_0, ..., h_depth)` with `h_l = sum_j a[j][l] z^j + f_l`.
pub fn conormal_hierarchy(
    a: &FuchsOperator,
    mellin: Option<&SmoothingMellinPart>,
    depth: usize,
) -> ConormalHierarchy {
    let k = a.size();
    let levels = (0..=depth)
        .map(|l| {
            let poly = if l <= a.r_order() { a.level_symbol(l) } else { MatPolynomial::zero(k, k) };
            let mut h = MeroMatrix::from_poly(poly);
            if let Some(m) = mellin {
                for t in m.level(l) {
                    h = h.add(&t.symbol);
                }
            }
            h
        })
        .collect();
    ConormalHierarchy { order: a.mu as i64, levels }
}

/// Level `l` of `A B` is `sum_{i+j=l} (T^{nu-j} a_i) b_j`, with `nu` the order of `B`.
pub fn translation_product(
    a: &ConormalHierarchy,
    b: &ConormalHierarchy,
    depth: usize,
) -> Result<ConormalHierarchy> {
    if depth > a.depth().min(b.depth()) {
        return Err(Error::InvalidInput(format!(
            "depth {depth} exceeds hierarchy depths {} and {}",
            a.depth(),
            b.depth()
        )));
    }
    if a.levels[0].cols() != b.levels[0].rows() {
        return Err(Error::DimensionMismatch("hierarchies act on different bases".into()));
    }
    let nu = b.order as f64;
    let levels = (0..=depth)
        .map(|l| {
            let mut acc = MeroMatrix::zero(a.levels[0].rows(), b.levels[0].cols());
            for j in 0..=l {
                let i = l - j;
                let shifted = a.levels[i].translate(Complex64::new(nu - j as f64, 0.0));
                acc = acc.add(&shifted.mul(&b.levels[j]));
            }
            acc
        })
        .collect();
    ConormalHierarchy::new(a.order + b.order, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::fuchs::{direct_compose, ComposeLimits};
    use crate::cone::model::SpectralModel;
    use crate::mero::linalg::{c64, CMatrix};
    use crate::mero::rel_err;

    fn scalar_op(mu: usize, a: &[&[f64]]) -> FuchsOperator {
        let taylor = a
            .iter()
            .map(|row| row.iter().map(|&x| CMatrix::from_element(1, 1, c64(x, 0.0))).collect())
            .collect();
        FuchsOperator::new(mu, SpectralModel::point("t"), taylor).unwrap()
    }

    #[test]
    fn euler_hierarchy_has_single_level() {
        let a = scalar_op(2, &[&[-0.25], &[0.0], &[1.0]]);
        let h = conormal_hierarchy(&a, None, 3);
        assert_eq!(h.levels.len(), 4);
        assert!(h.levels[1].is_zero() && h.levels[3].is_zero());
        assert_eq!(h.levels[0].eval(c64(0.5, 0.0))[(0, 0)], c64(0.0, 0.0));
    }

    #[test]
    fn product_matches_composition() {
        let a = scalar_op(1, &[&[1.0, 2.0], &[0.5, -1.0]]);
        let b = scalar_op(2, &[&[0.3, 0.0, 1.0], &[1.0], &[2.0, 0.5]]);
        let c = direct_compose(&a, &b, ComposeLimits::default()).unwrap();
        let ha = conormal_hierarchy(&a, None, 3);
        let hb = conormal_hierarchy(&b, None, 3);
        let hc = conormal_hierarchy(&c, None, 3);
        let tp = translation_product(&ha, &hb, 3).unwrap();
        assert_eq!(tp.order, 3);
        for l in 0..=3 {
            for z in [c64(0.1, 0.2), c64(-3.0, 1.0)] {
                assert!(rel_err(&tp.levels[l].eval(z), &hc.levels[l].eval(z)) < 1e-13);
            }
        }
    }

    #[test]
    fn depth_beyond_inputs_is_rejected() {
        let a = conormal_hierarchy(&scalar_op(1, &[&[1.0], &[1.0]]), None, 1);
        assert!(translation_product(&a, &a, 2).is_err());
    }
}
