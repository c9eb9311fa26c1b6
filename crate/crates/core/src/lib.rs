//! Symbolic and numerical tools for Fuchs-type operators on manifolds with
//! conical and edge singularities: Mellin symbols, conormal hierarchies,
//! parametrices and singular asymptotic expansions.

pub mod error;
pub mod app;
pub mod asymp;
pub mod cone;
pub mod edge;
pub mod mero;
pub mod parametrix;
pub mod solver;

pub use error::{Error, Result};
