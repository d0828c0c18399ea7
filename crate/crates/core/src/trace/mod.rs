//! Fourier-side trace pipeline: `ν_d`, `a_{2,V}`, `c_{2,j}`, the multilinear
//! `a_{k,V}`, the `F_{m,n}` recursion, `α_V` and the assembled trace.
//!
//! Every `a_{k,V}` is kept in its own normalization with a positive
//! prefactor; the alternating sign `(−1)^k` is applied only when `α_V` and
//! `μ` are assembled.

mod a2;
mod ak;
mod assemble;
mod fmn;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::pow;

use crate::error::{invalid, Result};
use crate::potential::Potential;
use crate::specfun::{factorial, gamma};
use crate::testfn::EvenTestFunction;

pub use a2::{a2, a2_curve, a2_kernel, c2j, c2j_coefficient};
pub use ak::{ak_at_zero, ak_fourier, ak_fourier_grid, ak_functional, ak_small_k, ak_small_k_grid, AkForm};
pub use assemble::{
    alpha, default_t_grid, mu_and_total, nu_weight, tail_bound, taylor_probe, AlphaOptions, TaylorProbe, TraceRecord,
    TraceTerm, K_BUDGET,
};
pub use fmn::{derivative_factor, f_recursion, ChebFunction};

/// Where a curve came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub potential: String,
    pub seed: u64,
    pub n_samples: u64,
}

/// Values of a function of `t` on a grid, with statistical errors and a bound
/// on the truncated part of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceCurve {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Zero for deterministic quadrature.
    pub stderr: Vec<f64>,
    /// Bound on the omitted `k > k_max` terms, at the largest `t`.
    pub tail_bound: f64,
    pub k_max: u32,
    /// Set when the requested tail tolerance was not reached within the
    /// `k` budget.
    pub partial: bool,
    pub provenance: Provenance,
}

impl TraceCurve {
    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(invalid("empty t grid"));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(invalid("t grid values must be finite and nonnegative"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("t grid must be strictly increasing"));
    }
    Ok(())
}

pub(crate) fn check_grid_unordered(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(invalid("empty t grid"));
    }
    if t.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(invalid("t values must be finite and nonnegative"));
    }
    Ok(())
}

pub(crate) fn sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Smallest polynomial order `p` accepted by `nu_d` and `mu_and_total`.
pub fn required_order(d: u32) -> u32 {
    d.saturating_sub(2).max(2)
}

/// `ν_d(φ)` in its two forms: `(Fourier moment form, radial-derivative form)`.
/// For `d = 1` only the first form exists and it is returned twice.
pub fn nu_d(phi: &EvenTestFunction, d: u32) -> Result<(f64, f64)> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    phi.require_order(required_order(d))?;
    let df = d as f64;
    let primary = match d {
        1 => 2.0 * phi.radial_moment(0, 1)?,
        2 => 2.0 / PI * phi.radial_moment(0, 0)?,
        _ => {
            let cd = pow(2.0, 3.0 - df) * pow(PI, 1.0 - df / 2.0) / gamma(df / 2.0 - 1.0);
            if d % 2 == 1 {
                // (D^{2m}φ)(0) = (−1)^m φ^{(2m)}(0) = (−1)^m (2m)! c_m
                let m = (d - 3) / 2;
                let c = phi.u_coefficients();
                let cm = c.get(m as usize).copied().unwrap_or(0.0);
                cd * sign(m as i64) * factorial(2 * m) * cm
            } else {
                cd * abs_d_moment(phi, d - 3)?
            }
        }
    };
    let second = if d == 1 {
        primary
    } else if d % 2 == 1 {
        // ∫₀^∞ ∂_t g = −g(0) with g = (t⁻¹∂_t)^{(d−3)/2}φ
        let g0 = phi.radial_coefficients((d - 3) / 2)?[0];
        2.0 * sign(((d - 1) / 2) as i64) * pow(2.0 * PI, -(df - 1.0) / 2.0) * -g0
    } else {
        -4.0 * sign((d / 2) as i64) * pow(2.0 * PI, -df / 2.0) * phi.radial_moment((d - 2) / 2, 0)?
    };
    Ok((primary, second))
}

/// `(|D|^n φ)(0) = π⁻¹∫₀^∞ τ^n φ̂(τ) dτ` for odd `n`, by quadrature of the
/// closed-form `φ̂` with Wynn acceleration of the oscillatory tail.
fn abs_d_moment(phi: &EvenTestFunction, n: u32) -> Result<f64> {
    use crate::integrate::quad::oscillatory_tail;
    let kernel = phi.phi_hat_kernel();
    let t = phi.support_radius();
    let scale = phi.phi_hat(0.0) * pow(1.0 / t, n as f64 + 1.0);
    let f = |tau: f64| pow(tau, n as f64) * kernel.eval_sq(tau * tau);
    let r = oscillatory_tail(f, 0.0, PI / t, 1e-13 * scale, 20_000)?;
    Ok(r.value / PI)
}

/// `trace⟨φ, W_{1,V}⟩ = ν_d(φ)∫V`, with the first form of `ν_d`.
pub fn trace_w1(phi: &EvenTestFunction, v: &Potential) -> Result<f64> {
    let (nu, _) = nu_d(phi, v.d())?;
    Ok(nu * v.integral())
}
