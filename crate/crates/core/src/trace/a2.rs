//! `a_{2,V}(t)` as a radial `|V̂|²` integral and its Taylor coefficients.

use core::f64::consts::PI;
use libm::{fabs, pow, sin};

use crate::error::{domain, invalid, Result};
use crate::integrate::quad::GaussLegendre;
use crate::potential::{sphere_area, Potential, Weight};
use crate::specfun::{factorial, struve_h};

use alloc::format;
use alloc::vec::Vec;

use super::{sign, Provenance, TraceCurve};

/// Past this `x = tρ` the tail integrals use the non-oscillatory mean of
/// the kernel only.
const MEAN_ONLY: f64 = 1e4;

/// The kernel `K_d(x)` with `a_{2,V}(t) = C_d ∫ K_d(t|η|)|V̂(η)|² dη`.
pub fn a2_kernel(d: u32, x: f64) -> f64 {
    let x = fabs(x);
    match d {
        1 => {
            if x == 0.0 {
                0.125
            } else {
                let s = sin(0.25 * x);
                2.0 * s * s / (x * x)
            }
        }
        2 => {
            if x == 0.0 {
                1.0
            } else {
                PI / x * struve_h(0, 0.5 * x)
            }
        }
        _ if d % 2 == 1 => {
            if x == 0.0 {
                0.5
            } else {
                sin(0.5 * x) / x
            }
        }
        _ => 1.0 - 0.5 * PI * struve_h(1, 0.5 * x),
    }
}

/// `C_d` in front of the kernel.
fn a2_constant(d: u32) -> f64 {
    let df = d as f64;
    match d {
        1 => 1.0 / PI,
        2 => pow(2.0 * PI, -3.0),
        _ if d % 2 == 1 => sign(((d + 1) / 2) as i64) * pow(2.0 * PI, -(3.0 * df - 1.0) / 2.0),
        _ => sign((d / 2) as i64) * pow(2.0 * PI, -1.5 * df),
    }
}

/// Non-oscillatory part of `K_d(x)` for large `x`, as `κ/x²`.
fn kernel_mean_coefficient(d: u32) -> f64 {
    match d {
        1 => 1.0,
        2 => 4.0,
        _ if d % 2 == 1 => 0.0,
        _ => -4.0,
    }
}

/// `∫_{x0}^∞ x^e K_d(x) dx` for `e < −1`.
fn kernel_tail(d: u32, e: f64, x0: f64) -> f64 {
    let kappa = kernel_mean_coefficient(d);
    let mean = |a: f64| kappa * pow(a, e - 1.0) / (1.0 - e);
    if x0 >= MEAN_ONLY {
        return mean(x0);
    }
    let end = MEAN_ONLY.max(4.0 * x0);
    let rule = GaussLegendre::new(24);
    // panels of one half period of sin(x/2)
    let width = 2.0 * PI;
    let n = ((end - x0) / width) as usize + 1;
    let body = rule.composite(x0, end, n, |x| pow(x, e) * a2_kernel(d, x));
    body + mean(end)
}

/// `a_{2,V}(t)`, deterministic. At `t = 0` the analytic limit
/// `C_d K_d(0)(2π)^d ‖V‖²` is used.
pub fn a2(v: &Potential, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain("a2 needs finite t >= 0"));
    }
    let d = v.d();
    let c = a2_constant(d);
    if t == 0.0 {
        return Ok(c * a2_kernel(d, 0.0) * pow(2.0 * PI, d as f64) * v.l2_sq()?);
    }
    let eval = |rho: f64| a2_kernel(d, t * rho);
    // ∫_a^∞ ρ^e K(tρ) dρ = t^{−e−1} ∫_{ta}^∞ x^e K(x) dx
    let tail = |e: f64, a: f64| pow(t, -e - 1.0) * kernel_tail(d, e, t * a);
    let w = Weight { eval: &eval, freq: 0.5 * t, decay: 0.0, tail: &tail };
    Ok(c * sphere_area(d) * v.weighted_fourier_sq(&w)?)
}

/// `a_{2,V}` on a grid, as a deterministic curve.
pub fn a2_curve(v: &Potential, t_grid: &[f64]) -> Result<TraceCurve> {
    super::check_grid(t_grid)?;
    let values = t_grid.iter().map(|&t| a2(v, t)).collect::<Result<Vec<f64>>>()?;
    Ok(TraceCurve {
        t_grid: t_grid.to_vec(),
        stderr: alloc::vec![0.0; values.len()],
        values,
        tail_bound: 0.0,
        k_max: 2,
        partial: false,
        provenance: Provenance { potential: format!("{v}"), seed: 0, n_samples: 0 },
    })
}

/// The dimension constant `c` with `c_{2,j} = c·‖|D|^j V‖²`, so that
/// `a_{2,V}(t) = Σ_j c_{2,j} t^{2j}`.
pub fn c2j_coefficient(d: u32, j: u32) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let df = d as f64;
    let jf = j as f64;
    let sj = sign(j as i64);
    Ok(match d {
        1 => sj / (2.0 * pow(4.0, jf) * factorial(2 * j + 2)),
        2 => sj * factorial(j) * factorial(j) / (2.0 * PI * factorial(2 * j + 1) * factorial(2 * j + 1)),
        _ if d % 2 == 1 => {
            sj * sign(((d + 1) / 2) as i64)
                / (pow(2.0, 2.0 * jf + 1.0) * pow(2.0 * PI, (df - 1.0) / 2.0) * factorial(2 * j + 1))
        }
        _ => {
            sj * sign((d / 2) as i64) * factorial(j) * factorial(j)
                / (pow(2.0 * PI, df / 2.0) * factorial(2 * j) * factorial(2 * j + 1))
        }
    })
}

/// `c_{2,j}(V)`, the coefficient of `t^{2j}` in `a_{2,V}(t)`. Uses the
/// homogeneous norm `‖|D|^j V‖`.
pub fn c2j(v: &Potential, j: u32) -> Result<f64> {
    let norm = v.hdot_sq(j)?.require("homogeneous Sobolev norm")?;
    Ok(c2j_coefficient(v.d(), j)? * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::cos;

    fn k_by_quadrature(d: u32, x: f64) -> f64 {
        let rule = GaussLegendre::new(200);
        // s = (1 − cos θ)/2, √(s − s²) = sin θ / 2, ds = sin θ/2 dθ
        rule.integrate(0.0, PI, |th| {
            let u = 0.5 * sin(th);
            let k = if d == 2 {
                if x * u == 0.0 {
                    1.0
                } else {
                    sin(x * u) / (x * u)
                }
            } else {
                cos(x * u)
            };
            k * 0.5 * sin(th)
        })
    }

    #[test]
    fn struve_kernels_match_simplex_integrals() {
        for &x in &[1e-3, 0.5, 3.0, 15.9, 16.1, 40.0, 79.0, 81.0, 150.0] {
            for d in [2, 4] {
                let a = a2_kernel(d, x);
                let b = k_by_quadrature(d, x);
                assert!(fabs(a - b) < 1e-12, "d={d} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn kernel_tail_matches_direct_sum() {
        for d in [1, 2, 3, 4] {
            let e = -2.0;
            let x0 = 30.0;
            let direct = GaussLegendre::new(24).composite(x0, 4e5, 80_000, |x| pow(x, e) * a2_kernel(d, x));
            let tail = kernel_tail(d, e, x0);
            assert!(fabs(direct - tail) < 1e-9, "d={d}: {direct} vs {tail}");
        }
    }
}
