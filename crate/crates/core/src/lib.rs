//! Universal scaling limits of correlations between zeros of random
//! holomorphic sections.
//!
//! The crate evaluates `κ_km(r)`, the normalized pair correlation of the
//! simultaneous zeros of `k` Gaussian sections in complex dimension `m`, and
//! the general `n`-point functions, by several independent routes: Berezin
//! integrals over fermionic variables ([`grassmann`], [`correlators`]),
//! explicit closed forms, exact Laurent expansions in `u = r²` ([`series`])
//! and Monte-Carlo sampling ([`montecarlo`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlators;
pub mod error;
pub mod grassmann;
pub mod kernel;
pub mod linalg;
pub mod montecarlo;
pub mod reference;
pub mod scalar;
pub mod series;
pub mod validate;

pub use error::{Error, Result};

pub type Grassmann64 = grassmann::GrassmannEven<f64>;
pub type GrassmannC64 = grassmann::GrassmannEven<num_complex::Complex64>;
pub type GrassmannRational = grassmann::GrassmannEven<num_rational::BigRational>;
pub type PointConfig64 = kernel::PointConfig<f64>;
pub type PairKernel64 = kernel::PairKernel<f64>;
pub type CovarianceBundle64 = kernel::CovarianceBundle<f64>;
pub use series::RationalLaurentSeries;
pub type CorrelationQuery64 = correlators::CorrelationQuery<f64>;
pub type MCEstimate64 = montecarlo::MCEstimate<f64>;
