//! Exact and asymptotic enumeration of bipartite partitions: vector
//! partitions of `(n1, n2)` into parts from ℕ² (both coordinates positive) or
//! from ℤ₊²∖{0}.
//!
//! Numerical code is generic over [`Real`]; the aliases below fix the common
//! instantiations.

pub mod asymptotics;
pub mod calibration;
pub mod count;
pub mod error;
pub mod format;
pub mod gibbs;
pub mod scalar;
pub mod series;
pub mod special;
mod truncation;

pub use count::{CountTable, PartSet, Target};
pub use error::{Error, Result};
pub use scalar::Real;

use num_rational::BigRational;

pub type ShapeParams64 = calibration::ShapeParams<f64>;
pub type ShapeParams32 = calibration::ShapeParams<f32>;
pub type CalibrationResult64 = calibration::CalibrationResult<f64>;
pub type EvalTolerance64 = special::EvalTolerance<f64>;
pub type AsymptoticEstimate64 = asymptotics::AsymptoticEstimate<f64>;
pub type LogZExpansion64 = asymptotics::LogZExpansion<f64>;
pub type RateRow64 = asymptotics::RateRow<f64>;
pub type RationalSeries = series::Series<BigRational>;
pub type LaurentSeries = series::Series<series::LaurentA>;
