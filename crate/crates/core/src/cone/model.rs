//! Spectral truncation of the cross-section.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Finite-dimensional model of the cross-section `X`: `basis_size` modes of
/// an `n`-dimensional base. Point models (`n = 0`) carry a single mode.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralModel {
    pub name: String,
    pub n: usize,
    pub basis_size: usize,
    pub mode_labels: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

impl SpectralModel {
    pub fn new(name: impl Into<String>, n: usize, basis_size: usize) -> Result<Self> {
        let labels = (0..basis_size).map(|i| format!("mode {i}")).collect();
        Self::with_labels(name, n, basis_size, labels)
    }

    pub fn with_labels(
        name: impl Into<String>,
        n: usize,
        basis_size: usize,
        mode_labels: Vec<String>,
    ) -> Result<Self> {
        if basis_size == 0 {
            return Err(Error::InvalidInput("basis size must be at least 1".into()));
        }
        if n == 0 && basis_size != 1 {
            return Err(Error::InvalidInput("a point cross-section has exactly one mode".into()));
        }
        if mode_labels.len() != basis_size {
            return Err(Error::InvalidInput("one label per mode required".into()));
        }
        Ok(Self { name: name.into(), n, basis_size, mode_labels, metadata: BTreeMap::new() })
    }

    /// Scalar point model used by ordinary differential operators.
    pub fn point(name: impl Into<String>) -> Self {
        Self::new(name, 0, 1).expect("point model is valid")
    }

    /// Weight line `Re z = (n+1)/2 - gamma`.
    pub fn weight_line(&self, gamma: f64) -> f64 {
        weight_line(self.n, gamma)
    }
}

/// `Re z = (n+1)/2 - gamma`.
pub fn weight_line(n: usize, gamma: f64) -> f64 {
    (n as f64 + 1.0) / 2.0 - gamma
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SpectralModel::new("x", 0, 2).is_err());
        assert!(SpectralModel::new("x", 1, 0).is_err());
        let m = SpectralModel::new("x", 1, 3).unwrap();
        assert_eq!(m.weight_line(0.5), 0.5);
    }
}
