//! Radial frequency integrals of `|V̂|^q` for the Bessel-type families.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{fabs, pow, sqrt};

use super::{sphere_area, Norm, Potential};
use crate::error::Result;
use crate::integrate::quad::{pairwise_sum, GaussLegendre};
use crate::specfun::{gamma, GKernel, GOrder, SQRT_PI};

/// Frequencies past `CUTOFF/ℓ_min` are handled by the asymptotic envelope.
const CUTOFF: f64 = 1e4;
/// Upper bound on the number of quadrature panels.
const MAX_PANELS: f64 = 2e6;

/// One factor `G_ν(ℓ²ρ²)` of a closed-form transform.
#[derive(Debug, Clone, Copy)]
pub struct BesselFactor {
    pub nu: f64,
    pub ell: f64,
    kernel: GKernel,
}

impl BesselFactor {
    pub fn new(nu: f64, ell: f64) -> Self {
        Self { nu, ell, kernel: GKernel::new(GOrder::new(nu).expect("order above -1")) }
    }

    #[inline]
    pub fn eval(&self, rho: f64) -> f64 {
        let z = self.ell * rho;
        self.kernel.eval(z * z)
    }

    /// Positive zeros in `ρ` below `upto`. Assumes `ν ≥ 1/2`, where zeros of
    /// `J_ν` are at least `π` apart.
    pub fn zeros(&self, upto: f64) -> Vec<f64> {
        let zmax = self.ell * upto;
        let g = |z: f64| self.kernel.eval(z * z);
        let mut out = Vec::new();
        let mut a = 0.0;
        let mut fa = g(a);
        while a < zmax {
            let b = a + 1.0;
            let fb = g(b);
            if fa == 0.0 {
                if a > 0.0 {
                    out.push(a / self.ell);
                }
            } else if fa * fb < 0.0 {
                out.push(illinois(&g, a, b, fa, fb) / self.ell);
            }
            a = b;
            fa = fb;
        }
        while out.last().is_some_and(|&z| z >= upto) {
            out.pop();
        }
        out
    }
}

fn illinois(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) || b - a <= 4.0 * f64::EPSILON * b {
            return 0.5 * (a + b);
        }
        let fc = g(c);
        if fc == 0.0 {
            return c;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else {
            fa *= if side == 1 { 0.5 } else { 1.0 };
            side = 1;
        }
        b = c;
        fb = fc;
    }
    0.5 * (a + b)
}

/// `E|cos θ|^n` over a uniform phase.
fn cos_power_mean(n: u32) -> f64 {
    gamma((n as f64 + 1.0) / 2.0) / (SQRT_PI * gamma(n as f64 / 2.0 + 1.0))
}

/// Coefficients of `M_ν(x)²·πx/2` in powers of `(2x)^{−2}`.
fn amplitude_series(nu: f64) -> [f64; 4] {
    let mu = 4.0 * nu * nu;
    [
        1.0,
        0.5 * (mu - 1.0),
        0.375 * (mu - 1.0) * (mu - 9.0),
        0.3125 * (mu - 1.0) * (mu - 9.0) * (mu - 25.0),
    ]
}

/// Power series of `s(w)^α` for `s(0) = 1`.
fn series_pow(s: &[f64; 4], alpha: f64) -> [f64; 4] {
    let mut b = [1.0, 0.0, 0.0, 0.0];
    for n in 1..4 {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += ((alpha + 1.0) * k as f64 - n as f64) * s[k] * b[n - k];
        }
        b[n] = acc / n as f64;
    }
    b
}

fn series_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `(2π)^{−d}∫|ξ|^{2j}|V̂|^q dξ` for a potential whose transform is a
/// product of Bessel factors.
pub(super) fn fourier_moment(pot: &Potential, q: u32, j: u32) -> Result<Norm> {
    let d = pot.d() as f64;
    let power = d - 1.0 + 2.0 * j as f64;
    let raw = radial_integral(pot, q, power, &Weight::unit())?;
    let pre = sphere_area(pot.d()) / pow(2.0 * PI, d);
    Ok(raw.map(|v| pre * v))
}

/// A radial weight `K(ρ)` for [`radial_integral`].
pub struct Weight<'a> {
    /// `K(ρ)`.
    pub eval: &'a dyn Fn(f64) -> f64,
    /// Oscillation frequency of `K` in `ρ`, used to refine panels.
    pub freq: f64,
    /// `|K(ρ)| = O(ρ^{decay})`; only used for the divergence test.
    pub decay: f64,
    /// `∫_a^∞ ρ^e K(ρ) dρ` for `e < −1`, the tail integral against one term
    /// of the `|V̂|^q` envelope.
    pub tail: &'a dyn Fn(f64, f64) -> f64,
}

impl Weight<'static> {
    pub fn unit() -> Self {
        Weight { eval: &|_| 1.0, freq: 0.0, decay: 0.0, tail: &|e, a| pow(a, e + 1.0) / -(e + 1.0) }
    }
}

/// `∫₀^∞ ρ^{power} K(ρ)|V̂(ρ)|^q dρ`, with panels between zeros of `V̂` and
/// the envelope of `|V̂|^q` past the cutoff.
pub fn radial_integral(pot: &Potential, q: u32, power: f64, w: &Weight<'_>) -> Result<Norm> {
    let (c, factors) = pot.bessel_form();
    let qf = q as f64;
    let decay: f64 = factors.iter().map(|f| qf * (f.nu + 0.5)).sum();
    let e = power - decay;
    if e + w.decay.min(0.0) >= -1.0 {
        return Ok(Norm::Infinite);
    }
    let ell_min = factors.iter().map(|f| f.ell).fold(f64::INFINITY, f64::min);
    let ell_sum: f64 = factors.iter().map(|f| f.ell).sum();
    let cutoff = (CUTOFF / ell_min).min(MAX_PANELS * PI / ell_sum);

    let mut breaks: Vec<f64> = alloc::vec![0.0];
    for f in &factors {
        breaks.extend(f.zeros(cutoff));
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite zeros"));
    breaks.dedup_by(|a, b| fabs(*a - *b) <= 1e-12 * b.max(1.0));
    if breaks.len() < 2 {
        breaks.push(cutoff);
    }
    let end = *breaks.last().expect("nonempty");

    let rule = GaussLegendre::new(24);
    let integrand = |rho: f64| {
        let v = factors.iter().fold(c, |acc, f| acc * f.eval(rho));
        pow(rho, power) * pow(fabs(v), qf) * (w.eval)(rho)
    };
    let panels: Vec<f64> = breaks
        .windows(2)
        .map(|p| {
            let pieces = 1 + (w.freq * (p[1] - p[0]) / PI) as usize;
            rule.composite(p[0], p[1], pieces, integrand)
        })
        .collect();
    let body = pairwise_sum(&panels);

    // Envelope: |G_ν(ℓ²ρ²)| ≈ √π (2ℓρ)^{−ν} M_ν(ℓρ)|cos θ|, with phases of
    // factors sharing (ν, ℓ) locked together and all others independent.
    let mut k = pow(fabs(c), qf);
    let mut series = [1.0, 0.0, 0.0, 0.0];
    let mut groups: Vec<(f64, f64, u32)> = Vec::new();
    for f in &factors {
        k *= pow(SQRT_PI * pow(2.0 * f.ell, -f.nu) * sqrt(2.0 / (PI * f.ell)), qf);
        let s = series_pow(&amplitude_series(f.nu), qf / 2.0);
        // (2ℓρ)^{−2k} = y^k/(4ℓ²)^k with y = ρ^{−2}
        let scale = 1.0 / (4.0 * f.ell * f.ell);
        let s_y = [s[0], s[1] * scale, s[2] * scale * scale, s[3] * scale * scale * scale];
        series = series_mul(&series, &s_y);
        match groups.iter_mut().find(|g| g.0 == f.nu && g.1 == f.ell) {
            Some(g) => g.2 += q,
            None => groups.push((f.nu, f.ell, q)),
        }
    }
    for g in &groups {
        k *= cos_power_mean(g.2);
    }
    let tail: f64 = series
        .iter()
        .enumerate()
        .map(|(i, t)| t * (w.tail)(e - 2.0 * i as f64, end))
        .sum::<f64>()
        * k;
    Ok(Norm::Finite(body + tail))
}
