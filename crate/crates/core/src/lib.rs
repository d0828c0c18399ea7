//! Numerical core for relative wave traces of `∂_t² − Δ + V`.
//!
//! Everything here is `no_std` (with `alloc`): special functions, simplex
//! geometry, the Monte Carlo and quadrature engines, the potential catalog,
//! and the Fourier-side and spatial-side trace pipelines. IO, the CLI and the
//! periodic eigenvalue oracle live in the `wavetrace` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod geometry;
pub mod integrate;
pub mod multiplier;
pub mod potential;
pub mod spatial;
pub mod specfun;
pub mod testfn;
pub mod trace;

pub use error::{Error, Result};
pub use integrate::{Executor, McConfig, McEstimate, McVecEstimate, Sequential};
pub use potential::{Family, Norm, NormReport, Potential};
pub use testfn::{EvenTestFunction, EvenWeight};
pub use trace::TraceCurve;

/// Library version embedded in every provenance record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
