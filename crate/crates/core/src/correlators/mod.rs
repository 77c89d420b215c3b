//! Evaluators of the scaling-limit correlation functions.
//!
//! Four independent routes compute the same pair correlation `κ_km(r)`:
//! the general `n`-point Berezin integral, its two-point reduction to
//! `Φ, Ψ`, the binomial expansion of `Ψ^{1−m}`, and the explicit formulas in
//! [`closed`]. The point case `k = m` adds the permanent enumeration in
//! [`wick`].

pub mod berezin;
pub mod closed;
pub mod query;
pub mod wick;

pub use berezin::{k_npoint_berezin, kappa_pair_berezin, kappa_pair_expansion};
pub use closed::{
    f_m_eval, g_l_eval, kappa_low_codim_closed, kappa_point_closed, kappa_point_kmm,
};
pub use query::{kappa_curve, CorrelationQuery, Geometry};
pub use wick::{g_lemma, g_wick_enumerate, WickSummary, WickTerm};
