//! Cone calculus: Fuchs-type operators, conormal symbols and Mellin parts.

pub mod ellipticity;
pub mod fuchs;
pub mod hierarchy;
pub mod mellin;
pub mod model;

pub use ellipticity::{
    check_conormal_ellipticity, check_sigma0_ellipticity, conormal_zeros, ConormalReport, Sigma0Report,
    Sigma0Verdict, ZeroInfo,
};
pub use fuchs::{
    direct_compose, ComposeLimits, FuchsOperator, PrincipalSymbol, QuadraticSymbol, SymbolFn, SymbolPoint,
};
pub use hierarchy::{conormal_hierarchy, translation_product, ConormalHierarchy};
pub use mellin::{weight_shift_commute, MellinTerm, SmoothingMellinPart, WeightShift, LINE_TOL};
pub use model::{weight_line, SpectralModel};
