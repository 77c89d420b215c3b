//! Stochastic oracles: Gaussian-integral sampling and the SU(2) polynomial
//! ensemble.
//!
//! Every run is a pure function of its seed and size. Work is split into
//! fixed blocks, each with its own ChaCha stream, and the block results are
//! combined in block order, so the worker count never changes the output.

pub mod ensemble;
pub mod gaussian;

pub use ensemble::{ensemble_su2, BinRecord, EnsembleConfig, EnsembleReport};
pub use gaussian::{
    estimate_g, estimate_kappa_mc, gram_product, sample_gaussian, GaussianSampler, MCConfig,
    MCEstimate,
};
