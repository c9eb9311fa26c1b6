//! Weights, asymptotic types and remainder bookkeeping.

pub mod remainder;
pub mod types;
pub mod weight;

pub use remainder::{compose_remainder, Remainder, RemainderClass};
pub use types::{AsymptoticPoint, AsymptoticType, POINT_TOL};
pub use weight::{compose_weight_data, WeightData};
