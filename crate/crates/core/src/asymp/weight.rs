//! Weight data `g = (gamma_in, gamma_out, Theta)` with `Theta = (theta, 0]`.

use crate::error::{Error, Result};

/// Weight data of an operator `H^{s,gamma_in} -> H^{s-mu,gamma_out}`, with the
/// weight interval `Theta = (theta, 0]`; `theta = -inf` is the infinite strip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightData {
    pub gamma_in: f64,
    pub gamma_out: f64,
    pub theta: f64,
}

impl WeightData {
    pub fn new(gamma_in: f64, gamma_out: f64, theta: f64) -> Result<Self> {
        if !(theta <= 0.0) || !gamma_in.is_finite() || !gamma_out.is_finite() {
            return Err(Error::InvalidInput(format!(
                "invalid weight data ({gamma_in}, {gamma_out}, {theta})"
            )));
        }
        Ok(Self { gamma_in, gamma_out, theta })
    }

    /// Weight data `(gamma, gamma - mu, Theta)` of an operator of order `mu`.
    pub fn for_order(gamma: f64, mu: f64, theta: f64) -> Result<Self> {
        Self::new(gamma, gamma - mu, theta)
    }
}

/// `(gamma', gamma'', Theta') o (gamma, gamma', Theta) = (gamma, gamma'', Theta cap Theta')`.
pub fn compose_weight_data(outer: &WeightData, inner: &WeightData) -> Result<WeightData> {
    if (outer.gamma_in - inner.gamma_out).abs() > 1e-12 {
        return Err(Error::Incompatible(format!(
            "inner target weight {} differs from outer source weight {}",
            inner.gamma_out, outer.gamma_in
        )));
    }
    Ok(WeightData { gamma_in: inner.gamma_in, gamma_out: outer.gamma_out, theta: outer.theta.max(inner.theta) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn composition_of_compatible_data() {
        let inner = WeightData::new(0.5, -1.5, -3.0).unwrap();
        let outer = WeightData::new(-1.5, -2.0, -2.0).unwrap();
        let c = compose_weight_data(&outer, &inner).unwrap();
        assert_eq!(c, WeightData { gamma_in: 0.5, gamma_out: -2.0, theta: -2.0 });
        assert!(compose_weight_data(&inner, &outer).is_err());
        assert!(WeightData::new(0.0, 0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn composition_is_associative(g in -3.0f64..3.0, a in 0u8..4, b in 0u8..4, c in 0u8..4,
                                      t1 in -5.0f64..0.0, t2 in -5.0f64..0.0, t3 in -5.0f64..0.0) {
            let w1 = WeightData::new(g, g - a as f64, t1).unwrap();
            let w2 = WeightData::new(g - a as f64, g - (a + b) as f64, t2).unwrap();
            let w3 = WeightData::new(g - (a + b) as f64, g - (a + b + c) as f64, t3).unwrap();
            let left = compose_weight_data(&w3, &compose_weight_data(&w2, &w1).unwrap()).unwrap();
            let right = compose_weight_data(&compose_weight_data(&w3, &w2).unwrap(), &w1).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
