//! Even, compactly supported test functions `φ(t) = (1 − (t/T)²)₊^p`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use libm::{cos, exp, fabs, log, pow, sin, sqrt};

use crate::error::{invalid, Error, Result};
use crate::integrate::quad::GaussLegendre;
use crate::specfun::{eval_g, factorial, GOrder, GKernel};

/// Weights `w(t)` that trace functionals can be integrated against.
pub trait EvenWeight: Sync {
    fn value(&self, t: f64) -> f64;
    /// `w(t)` is zero (or below 1e−14 of its maximum) for `|t| ≥ support`.
    fn support(&self) -> f64;
    /// `((t⁻¹∂_t)^j w)(t)`.
    fn radial_derivative(&self, j: u32, t: f64) -> Result<f64>;
    fn label(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenTestFunction {
    support: f64,
    order: u32,
}

impl EvenTestFunction {
    pub fn poly_cutoff(support: f64, order: u32) -> Result<Self> {
        if !(support > 0.0) || !support.is_finite() {
            return Err(invalid("support radius T must be positive"));
        }
        if order < 2 {
            return Err(invalid("smoothness order p must be at least 2"));
        }
        Ok(Self { support, order })
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Rejects functions with `p < required`.
    pub fn require_order(&self, required: u32) -> Result<()> {
        if self.order < required {
            return Err(Error::Smoothness { required, available: self.order });
        }
        Ok(())
    }

    /// Coefficients of `φ` as a polynomial in `u = t²` on `|t| < T`.
    pub fn u_coefficients(&self) -> Vec<f64> {
        let p = self.order;
        let inv = 1.0 / (self.support * self.support);
        let mut c = Vec::with_capacity(p as usize + 1);
        let mut binom = 1.0;
        for m in 0..=p {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            c.push(sign * binom * pow(inv, m as f64));
            binom = binom * (p - m) as f64 / (m + 1) as f64;
        }
        c
    }

    /// u-coefficients of `(t⁻¹∂_t)^j φ` on `|t| < T`. The result is
    /// continuous across `T` for `j < p`; `j = p` gives the constant piece.
    pub fn radial_coefficients(&self, j: u32) -> Result<Vec<f64>> {
        if j > self.order {
            return Err(Error::Smoothness { required: j, available: self.order });
        }
        let mut c = self.u_coefficients();
        for _ in 0..j {
            c = (1..c.len()).map(|m| 2.0 * m as f64 * c[m]).collect();
        }
        Ok(c)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let r = t / self.support;
        if fabs(r) >= 1.0 {
            return 0.0;
        }
        pow(1.0 - r * r, self.order as f64)
    }

    /// `φ^{(j)}(t)` for `j ≤ p − 1`.
    pub fn derivative(&self, j: u32, t: f64) -> Result<f64> {
        if j >= self.order {
            return Err(Error::Smoothness { required: j + 1, available: self.order });
        }
        if fabs(t) >= self.support {
            return Ok(0.0);
        }
        let c = self.u_coefficients();
        let mut total = 0.0;
        for (m, cm) in c.iter().enumerate() {
            let deg = 2 * m as u32;
            if deg < j {
                continue;
            }
            let falling = factorial(deg) / factorial(deg - j);
            total += cm * falling * pow(t, (deg - j) as f64);
        }
        Ok(total)
    }

    /// `((t⁻¹∂_t)^j φ)(t)` for `j ≤ p`.
    pub fn radial_derivative(&self, j: u32, t: f64) -> Result<f64> {
        let c = self.radial_coefficients(j)?;
        if fabs(t) >= self.support {
            return Ok(0.0);
        }
        Ok(horner(&c, t * t))
    }

    /// `φ̂(τ) = 2∫₀^T φ(t) cos(τt) dt` by Gauss–Legendre with `2⌈Tτ/π⌉ + 64` nodes.
    pub fn phi_hat(&self, tau: f64) -> f64 {
        let t = self.support;
        let nodes = 2 * libm::ceil(t * fabs(tau) / core::f64::consts::PI) as usize + 64;
        let rule = GaussLegendre::new(nodes);
        2.0 * rule.integrate(0.0, t, |x| self.eval(x) * cos(tau * x))
    }

    /// `φ̂` as a function of `τ²`: `T 2^{2p+1} p! G_{p+1/2}(T²τ²)`. Valid for
    /// negative `τ²` as well (imaginary frequencies).
    pub fn phi_hat_sq(&self, tau2: f64) -> f64 {
        let p = self.order;
        let nu = GOrder::new(p as f64 + 0.5).expect("positive order");
        let t = self.support;
        t * pow(2.0, (2 * p + 1) as f64) * factorial(p) * eval_g(nu, t * t * tau2).unwrap_or(f64::NAN)
    }

    /// Fast repeated evaluation of [`Self::phi_hat_sq`].
    pub fn phi_hat_kernel(&self) -> PhiHatKernel {
        let p = self.order;
        let nu = GOrder::new(p as f64 + 0.5).expect("positive order");
        let t = self.support;
        PhiHatKernel {
            scale: t * pow(2.0, (2 * p + 1) as f64) * factorial(p),
            t2: t * t,
            g: GKernel::new(nu),
        }
    }

    /// Imaginary part of `ψ̂(τ)` for `ψ(s) = sφ(s)`: `−2∫₀^T tφ(t) sin(τt) dt`.
    pub fn psi_hat_imag(&self, tau: f64) -> f64 {
        let t = self.support;
        let nodes = 2 * libm::ceil(t * fabs(tau) / core::f64::consts::PI) as usize + 64;
        let rule = GaussLegendre::new(nodes);
        -2.0 * rule.integrate(0.0, t, |x| x * self.eval(x) * sin(tau * x))
    }

    /// `∫₀^T t^n ((t⁻¹∂_t)^j φ)(t) dt`, exactly.
    pub fn radial_moment(&self, j: u32, n: u32) -> Result<f64> {
        let c = self.radial_coefficients(j)?;
        let t = self.support;
        Ok(c.iter()
            .enumerate()
            .map(|(m, cm)| {
                let deg = (2 * m) as u32 + n + 1;
                cm * pow(t, deg as f64) / deg as f64
            })
            .sum())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PhiHatKernel {
    scale: f64,
    t2: f64,
    g: GKernel,
}

impl PhiHatKernel {
    #[inline]
    pub fn eval_sq(&self, tau2: f64) -> f64 {
        self.scale * self.g.eval(self.t2 * tau2)
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &cm| acc * u + cm)
}

impl EvenWeight for EvenTestFunction {
    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    fn support(&self) -> f64 {
        self.support
    }

    fn radial_derivative(&self, j: u32, t: f64) -> Result<f64> {
        EvenTestFunction::radial_derivative(self, j, t)
    }

    fn label(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for EvenTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "polycut:T={},p={}", self.support, self.order)
    }
}

impl FromStr for EvenTestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("missing family in {s:?}")))?;
        if family.trim() != "polycut" {
            return Err(Error::Parse(format!("unknown test function family {family:?}")));
        }
        let mut support = None;
        let mut order = None;
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            match k.trim() {
                "T" => support = Some(parse_f64(v)?),
                "p" => order = Some(v.trim().parse::<u32>().map_err(|e| Error::Parse(format!("p: {e}")))?),
                other => return Err(Error::Parse(format!("unknown key {other:?} for polycut"))),
            }
        }
        let support = support.ok_or_else(|| Error::Parse("polycut needs T".into()))?;
        let order = order.ok_or_else(|| Error::Parse("polycut needs p".into()))?;
        Self::poly_cutoff(support, order)
    }
}

pub(crate) fn parse_f64(v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|e| Error::Parse(format!("{v:?}: {e}")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("{v:?} is not finite")));
    }
    Ok(x)
}

/// The heat weight `g_t(s) = e^{−s²/4t} / (4√(πt))`, cut where
/// `e^{−s²/4t} < 1e−14`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWeight {
    time: f64,
}

impl GaussianWeight {
    pub fn new(time: f64) -> Result<Self> {
        if !(time > 0.0) || !time.is_finite() {
            return Err(invalid("heat time must be positive"));
        }
        Ok(Self { time })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Mass of the weight beyond the cut, relative to the total: erfc-type
    /// bound `e^{−S²/4t}`.
    pub fn truncation_bound(&self) -> f64 {
        let s = self.support();
        exp(-s * s / (4.0 * self.time))
    }
}

impl EvenWeight for GaussianWeight {
    fn value(&self, s: f64) -> f64 {
        if fabs(s) >= self.support() {
            return 0.0;
        }
        exp(-s * s / (4.0 * self.time)) / (4.0 * sqrt(core::f64::consts::PI * self.time))
    }

    fn support(&self) -> f64 {
        sqrt(4.0 * self.time * (-log(1e-14)))
    }

    fn radial_derivative(&self, j: u32, s: f64) -> Result<f64> {
        Ok(pow(-0.5 / self.time, j as f64) * self.value(s))
    }

    fn label(&self) -> String {
        format!("heat:t={}", self.time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn u_coefficients_are_binomial() {
        let phi = EvenTestFunction::poly_cutoff(2.0, 3).unwrap();
        let c = phi.u_coefficients();
        let want = [1.0, -3.0 / 4.0, 3.0 / 16.0, -1.0 / 64.0];
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn display_round_trips() {
        let phi: EvenTestFunction = "polycut:T=1.5,p=6".parse().unwrap();
        assert_eq!(phi.to_string(), "polycut:T=1.5,p=6");
        assert!("polycut:T=1".parse::<EvenTestFunction>().is_err());
        assert!("polycut:T=1,p=3,q=2".parse::<EvenTestFunction>().is_err());
    }
}
