//! Asymptotics of solutions and the independent Frobenius check.

pub mod apply;
pub mod expansion;
pub mod frobenius;
pub mod solve;

pub use apply::{apply_fuchs, apply_mellin_term, apply_parametrix, residue_terms};
pub use expansion::{ExpansionTerm, SingularExpansion};
pub use frobenius::{compare_modulo_kernel, frobenius_oracle, FrobeniusSolution, OracleComparison, OracleOptions};
pub use solve::{flat_law_check, kernel_seeds, solve_asymptotics, FlatLaw, Seed, Solution};
