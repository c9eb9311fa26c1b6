//! Matrix polynomials, polynomial eigenvalues and meromorphic matrix functions.

pub mod function;
pub mod inverse;
pub mod linalg;
pub mod poly;
pub mod polyeig;

pub use function::{rel_err, Laurent, MeroMatrix, MeroTol, PoleDatum};
pub use inverse::{invert_one_plus, mero_inverse, mero_inverse_with, InverseOptions};
pub use linalg::{c64, CMatrix};
pub use poly::MatPolynomial;
pub use polyeig::{polyeig, polyeig_with, PolyeigOptions, PolyeigReport, Root};
