//! Generation and spreadness classification of α-Kakutani substitution
//! tilings of the real line.
//!
//! The crate is split along the pipeline:
//!
//! * [`params`] holds the exact parameter types (α, the ratio class, tile
//!   length exponents) and the parameter solvers.
//! * [`engine`] runs the multiscale substitution semi-flow, counts tiles via
//!   walks on the associated graph, extracts Delone points and measures the
//!   Chabauty–Fell distance between point sets.
//! * [`cover`] builds the fixed-scale primitive substitution that covers a
//!   commensurable rule, its substitution matrix and the exact cover check.
//! * [`spectral`] does the integer polynomial work, root finding and the
//!   spectral spreadness verdicts.
//! * [`discrepancy`] measures densities and interval discrepancies at scale.

pub mod cover;
pub mod discrepancy;
pub mod engine;
mod error;
pub mod params;
pub mod poly;
pub mod spectral;

pub use error::{Error, Result};
pub use params::{AlphaParam, LengthExponent, RatioClass};

/// Version string embedded in every exported artifact.
pub const VERSION: &str = concat!("kakutani ", env!("CARGO_PKG_VERSION"));
