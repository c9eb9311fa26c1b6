//! Pointwise verification of the parametrix identities.

use super::{sample_points, ParametrixHierarchy};
use crate::asymp::Remainder;
use crate::cone::ConormalHierarchy;
use crate::error::{Error, Result};
use crate::mero::linalg::{eye, norm};
use num_complex::Complex64;

/// Defect tolerance used to decide the achieved flat order.
pub const DEFECT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ParametrixVerification {
    /// Max defect of `sum T^{mu-j} q_i h_j = delta_{l0}` per level, relative to
    /// the summed magnitude of the evaluated terms.
    pub left: Vec<f64>,
    /// Same for `sum T^{-mu-j} h_i q_j = delta_{l0}`.
    pub right: Vec<f64>,
    /// Highest level up to which all defects are below tolerance.
    pub flat_order: Option<usize>,
    pub remainder: Remainder,
}

impl ParametrixVerification {
    pub fn passed(&self, depth: usize) -> bool {
        self.flat_order == Some(depth)
    }
}

/// Evaluates the left and right defects at `samples` (or at 100 seeded
/// points away from all poles when `samples` is empty).
pub fn verify_parametrix(
    h: &ConormalHierarchy,
    p: &ParametrixHierarchy,
    samples: &[Complex64],
) -> Result<ParametrixVerification> {
    if h.order != p.mu as i64 {
        return Err(Error::Incompatible(format!("operator order {} and parametrix order {}", h.order, p.mu)));
    }
    let depth = p.depth();
    let mu = p.mu as f64;
    let owned;
    let pts: &[Complex64] = if samples.is_empty() {
        let refs: Vec<_> = p.levels.iter().collect();
        let shifts: Vec<f64> = (0..=depth).map(|j| mu - j as f64).chain([0.0]).collect();
        owned = sample_points(&refs, &shifts, 100, 0.2, 0x5eed);
        &owned
    } else {
        samples
    };
    let k = p.levels[0].rows();
    let id = eye(k);
    let mut left = vec![0.0f64; depth + 1];
    let mut right = vec![0.0f64; depth + 1];
    for &z in pts {
        for l in 0..=depth {
            let mut acc_l = if l == 0 { -&id } else { id.clone() * Complex64::new(0.0, 0.0) };
            let mut acc_r = acc_l.clone();
            let mut scale_l = if l == 0 { norm(&id) } else { 0.0 };
            let mut scale_r = scale_l;
            for j in 0..=l {
                let i = l - j;
                let (qs, hj) = (&p.levels[i], h.level(j));
                let zl = z + (mu - j as f64);
                acc_l += qs.eval(zl) * hj.eval(z);
                scale_l += qs.eval_bound(zl) * hj.eval_bound(z);
                let (hi, qj) = (h.level(i), &p.levels[j]);
                let zr = z - (mu + j as f64);
                acc_r += hi.eval(zr) * qj.eval(z);
                scale_r += hi.eval_bound(zr) * qj.eval_bound(z);
            }
            let dl = if scale_l > 0.0 { norm(&acc_l) / scale_l } else { 0.0 };
            let dr = if scale_r > 0.0 { norm(&acc_r) / scale_r } else { 0.0 };
            left[l] = left[l].max(dl);
            right[l] = right[l].max(dr);
        }
    }
    let passing = (0..=depth).take_while(|&l| left[l] < DEFECT_TOL && right[l] < DEFECT_TOL).count();
    let flat_order = passing.checked_sub(1);
    let remainder = Remainder::green_flat(flat_order.unwrap_or(0) as f64);
    Ok(ParametrixVerification { left, right, flat_order, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{conormal_hierarchy, FuchsOperator, SpectralModel};
    use crate::mero::linalg::{c64, CMatrix};
    use crate::mero::MeroMatrix;
    use crate::parametrix::parametrix_hierarchy;

    fn op() -> FuchsOperator {
        let s = |x: f64| CMatrix::from_element(1, 1, c64(x, 0.0));
        let taylor = vec![vec![s(-0.25), s(1.0), s(0.3)], vec![s(0.0), s(0.5)], vec![s(1.0)]];
        FuchsOperator::new(2, SpectralModel::point("t"), taylor).unwrap()
    }

    #[test]
    fn exact_hierarchy_verifies() {
        let h = conormal_hierarchy(&op(), None, 4);
        let p = parametrix_hierarchy(&h, 0.2, 0, 4).unwrap();
        let v = verify_parametrix(&h, &p, &[]).unwrap();
        assert_eq!(v.flat_order, Some(4), "{:?} {:?}", v.left, v.right);
        assert_eq!(v.remainder, Remainder::green_flat(4.0));
    }

    #[test]
    fn truncated_hierarchy_reports_flat_order_zero() {
        let h = conormal_hierarchy(&op(), None, 3);
        let p = parametrix_hierarchy(&h, 0.2, 0, 0).unwrap();
        let v = verify_parametrix(&h, &p, &[]).unwrap();
        assert_eq!(v.flat_order, Some(0));
    }

    #[test]
    fn perturbation_is_detected() {
        let h = conormal_hierarchy(&op(), None, 2);
        let mut p = parametrix_hierarchy(&h, 0.2, 0, 2).unwrap();
        p.levels[1] = p.levels[1].add(&MeroMatrix::constant(CMatrix::from_element(1, 1, c64(1e-3, 0.0))).mul(&p.levels[0]));
        let v = verify_parametrix(&h, &p, &[]).unwrap();
        assert_eq!(v.flat_order, Some(0));
        assert!(v.left[1] > 1e-5 && v.left[1] < 1e-1, "{}", v.left[1]);
    }
}
