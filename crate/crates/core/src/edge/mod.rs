//! Edge-degenerate operators and the edge Mellin-symbol parametrix.

pub mod field;
pub mod jet;
pub mod operator;
pub mod recursion;
pub mod ypoly;

pub use field::{check_edge_ellipticity, conormal_inverse_field, pole_sets_agree, ConormalField, EdgeEllipticityReport, DRIFT_TOL};
pub use jet::{Jet, JetSpace};
pub use operator::{EdgeCoeff, EdgeDegenerateOperator};
pub use recursion::{edge_parametrix_hierarchy, EdgeParametrix, EdgeSymbolJets};
pub use ypoly::YPoly;
