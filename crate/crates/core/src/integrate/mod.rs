//! Monte Carlo and quadrature engines.

pub mod mc;
pub mod quad;
pub mod rng;

pub use mc::{mc_integrate, mc_integrate_vec, Executor, McConfig, McEstimate, McVecEstimate, Sequential, StratumAcc};
pub use quad::{adaptive_quad, adaptive_quad_with, GaussLegendre, QuadOptions, QuadResult};
pub use rng::Stream;
