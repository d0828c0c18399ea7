//! Concrete radial potentials: evaluation, Fourier transforms, norms and
//! samplers for `|V|` and `|V̂|`.

mod radial;
mod sampler;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;
use libm::{acos, cos, exp, fabs, pow, sin, sqrt};

use crate::error::{invalid, Error, Result};
use crate::integrate::quad::{adaptive_quad_with, QuadOptions};
use crate::specfun::{gamma, GKernel, GOrder, SQRT_PI};
use crate::testfn::parse_f64;

pub use radial::{BesselFactor, Weight};
pub use sampler::RadialSampler;

/// Largest dimension accepted by the catalog.
pub const MAX_DIM: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `amp·e^{−|x|²/2σ²}`, treated as supported in `|x| ≤ 12σ`.
    Gaussian { sigma: f64, amp: f64 },
    /// `amp·1_{|x|<r}`.
    Ball { radius: f64, amp: f64 },
    /// The ball indicator convolved with the normalized indicator of `B_h`.
    MollBall { radius: f64, amp: f64, h: f64 },
    /// `amp·(1 − |x|²/r²)₊^p`.
    Bump { radius: f64, amp: f64, p: u32 },
}

/// A norm that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    Finite(f64),
    Infinite,
}

impl Norm {
    pub fn value(self) -> Option<f64> {
        match self {
            Norm::Finite(v) => Some(v),
            Norm::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Norm::Finite(_))
    }

    /// The finite value or an [`Error::InfiniteNorm`] naming the quantity.
    pub fn require(self, what: &str) -> Result<f64> {
        self.value().ok_or_else(|| Error::InfiniteNorm(what.into()))
    }

    fn map(self, f: impl FnOnce(f64) -> f64) -> Norm {
        match self {
            Norm::Finite(v) => Norm::Finite(f(v)),
            Norm::Infinite => Norm::Infinite,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Finite(v) => write!(f, "{v}"),
            Norm::Infinite => f.write_str("inf"),
        }
    }
}

/// All norms used by the trace bounds. `hm[m]` is the inhomogeneous
/// `⟨ξ⟩^{2m}`-weighted Sobolev norm, `hdot[j] = ‖|D|^j V‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub l2: f64,
    pub linf: f64,
    pub hm: Vec<Norm>,
    pub hdot: Vec<Norm>,
    pub lhat1: Norm,
    pub integral_v: f64,
}

impl NormReport {
    pub fn hm(&self, m: usize) -> Option<Norm> {
        self.hm.get(m).copied()
    }

    pub fn hdot(&self, j: usize) -> Option<Norm> {
        self.hdot.get(j).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    d: u32,
    family: Family,
}

/// `ω_d = 2π^{d/2}/Γ(d/2)`, the area of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: u32) -> f64 {
    2.0 * pow(PI, d as f64 / 2.0) / gamma(d as f64 / 2.0)
}

/// Volume of the unit ball in `ℝ^d` (`d = 0` gives 1).
pub fn ball_volume(d: u32) -> f64 {
    pow(PI, d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

impl Potential {
    pub fn new(d: u32, family: Family) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(invalid(format!("dimension must be in 1..={MAX_DIM}, got {d}")));
        }
        let amp = match family {
            Family::Gaussian { sigma, amp } => {
                positive("sigma", sigma)?;
                amp
            }
            Family::Ball { radius, amp } => {
                positive("r", radius)?;
                amp
            }
            Family::MollBall { radius, amp, h } => {
                positive("r", radius)?;
                positive("h", h)?;
                amp
            }
            Family::Bump { radius, amp, p } => {
                positive("r", radius)?;
                if p == 0 {
                    return Err(invalid("bump needs p >= 1"));
                }
                amp
            }
        };
        if !amp.is_finite() {
            return Err(invalid("amp must be finite"));
        }
        Ok(Self { d, family })
    }

    pub fn gaussian(d: u32, sigma: f64, amp: f64) -> Result<Self> {
        Self::new(d, Family::Gaussian { sigma, amp })
    }

    pub fn ball(d: u32, radius: f64, amp: f64) -> Result<Self> {
        Self::new(d, Family::Ball { radius, amp })
    }

    pub fn mollball(d: u32, radius: f64, amp: f64, h: f64) -> Result<Self> {
        Self::new(d, Family::MollBall { radius, amp, h })
    }

    pub fn bump(d: u32, radius: f64, amp: f64, p: u32) -> Result<Self> {
        Self::new(d, Family::Bump { radius, amp, p })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn amp(&self) -> f64 {
        match self.family {
            Family::Gaussian { amp, .. }
            | Family::Ball { amp, .. }
            | Family::MollBall { amp, .. }
            | Family::Bump { amp, .. } => amp,
        }
    }

    /// Same potential with a different amplitude.
    pub fn with_amp(&self, amp: f64) -> Result<Self> {
        let family = match self.family {
            Family::Gaussian { sigma, .. } => Family::Gaussian { sigma, amp },
            Family::Ball { radius, .. } => Family::Ball { radius, amp },
            Family::MollBall { radius, h, .. } => Family::MollBall { radius, amp, h },
            Family::Bump { radius, p, .. } => Family::Bump { radius, amp, p },
        };
        Self::new(self.d, family)
    }

    /// `R_eff`: exact support radius, or `12σ` for the Gaussian (where
    /// `e^{−72}` is below 1e−30).
    pub fn support_radius(&self) -> f64 {
        match self.family {
            Family::Gaussian { sigma, .. } => 12.0 * sigma,
            Family::Ball { radius, .. } | Family::Bump { radius, .. } => radius,
            Family::MollBall { radius, h, .. } => radius + h,
        }
    }

    /// Smallest length scale; sets frequency cutoffs.
    pub fn min_length(&self) -> f64 {
        match self.family {
            Family::Gaussian { sigma, .. } => sigma,
            Family::Ball { radius, .. } | Family::Bump { radius, .. } => radius,
            Family::MollBall { radius, h, .. } => radius.min(h),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_radial(sqrt(x.iter().map(|v| v * v).sum()))
    }

    /// `V` as a function of `|x|`.
    pub fn eval_radial(&self, rho: f64) -> f64 {
        let rho = fabs(rho);
        match self.family {
            Family::Gaussian { sigma, amp } => amp * exp(-rho * rho / (2.0 * sigma * sigma)),
            Family::Ball { radius, amp } => {
                if rho < radius {
                    amp
                } else {
                    0.0
                }
            }
            Family::Bump { radius, amp, p } => {
                if rho >= radius {
                    return 0.0;
                }
                let u = rho / radius;
                amp * pow(1.0 - u * u, p as f64)
            }
            Family::MollBall { radius, amp, h } => amp * lens_fraction(self.d, radius, h, rho),
        }
    }

    /// `dV/d|x|`; only available for the Lipschitz families.
    pub fn eval_radial_derivative(&self, rho: f64) -> Result<f64> {
        let rho = fabs(rho);
        match self.family {
            Family::Gaussian { sigma, amp } => {
                Ok(-amp * rho / (sigma * sigma) * exp(-rho * rho / (2.0 * sigma * sigma)))
            }
            Family::Bump { radius, amp, p } => {
                if rho >= radius {
                    return Ok(0.0);
                }
                let u = rho / radius;
                Ok(-amp * 2.0 * p as f64 * u / radius * pow(1.0 - u * u, p as f64 - 1.0))
            }
            Family::MollBall { radius, amp, h } => Ok(amp * lens_slope(self.d, radius, h, rho)),
            Family::Ball { .. } => Err(Error::Unsupported("the ball indicator is not differentiable".into())),
        }
    }

    pub fn fourier(&self, xi: &[f64]) -> f64 {
        self.fourier_radial(sqrt(xi.iter().map(|v| v * v).sum()))
    }

    /// `V̂(ξ) = ∫V(x)e^{−i⟨x,ξ⟩}dx` as a function of `|ξ|`, in closed form.
    pub fn fourier_radial(&self, rho: f64) -> f64 {
        let d = self.d as f64;
        match self.family {
            Family::Gaussian { sigma, amp } => {
                amp * pow(2.0 * PI * sigma * sigma, d / 2.0) * exp(-0.5 * sigma * sigma * rho * rho)
            }
            _ => {
                let (c, factors) = self.bessel_form();
                factors.iter().fold(c, |acc, f| acc * f.eval(rho))
            }
        }
    }

    /// `V̂ = C·∏ G_{ν_i}(ℓ_i²|ξ|²)` for the non-Gaussian families.
    pub fn bessel_form(&self) -> (f64, Vec<BesselFactor>) {
        let d = self.d as f64;
        let ball = |r: f64| (pow(4.0 * PI, d / 2.0) * pow(r, d) / SQRT_PI, BesselFactor::new(d / 2.0, r));
        match self.family {
            Family::Gaussian { .. } => (0.0, Vec::new()),
            Family::Ball { radius, amp } => {
                let (c, f) = ball(radius);
                (amp * c, alloc::vec![f])
            }
            Family::MollBall { radius, amp, h } => {
                let (c1, f1) = ball(radius);
                let (c2, f2) = ball(h);
                (amp * c1 * c2 / (ball_volume(self.d) * pow(h, d)), alloc::vec![f1, f2])
            }
            Family::Bump { radius, amp, p } => {
                let nu = p as f64 + d / 2.0;
                let c = amp * pow(radius, d) * pow(PI, d / 2.0) * gamma(p as f64 + 1.0) * pow(4.0, nu) / SQRT_PI;
                (c, alloc::vec![BesselFactor::new(nu, radius)])
            }
        }
    }

    /// `V̂(ρ) = 2^{d−1}π^{(d−1)/2}∫₀^∞ V(s)s^{d−1}G_{d/2−1}(ρ²s²)ds` by adaptive
    /// quadrature; an independent check on [`Self::fourier_radial`].
    pub fn fourier_radial_quadrature(&self, rho: f64) -> Result<f64> {
        let d = self.d;
        let g = GKernel::new(GOrder::new(d as f64 / 2.0 - 1.0)?);
        let pre = pow(2.0, d as f64 - 1.0) * pow(PI, (d as f64 - 1.0) / 2.0);
        let integrand = |s: f64| self.eval_radial(s) * pow(s, d as f64 - 1.0) * g.eval(rho * rho * s * s);
        let scale = fabs(self.amp()) * pow(self.support_radius(), d as f64);
        let opts = |panels: usize| QuadOptions {
            abs_tol: 1e-13 * scale,
            rel_tol: 0.0,
            max_intervals: 20_000,
            initial_panels: panels,
        };
        let panels = 4 + libm::ceil(rho * self.support_radius() / PI) as usize;
        let mut total = 0.0;
        for (a, b) in self.profile_pieces() {
            total += adaptive_quad_with(integrand, a, b, opts(panels))?.value;
        }
        Ok(pre * total)
    }

    /// Intervals of `|x|` on which the radial profile is smooth.
    pub(crate) fn profile_pieces(&self) -> Vec<(f64, f64)> {
        match self.family {
            Family::Gaussian { sigma, .. } => alloc::vec![(0.0, 12.0 * sigma)],
            Family::Ball { radius, .. } | Family::Bump { radius, .. } => alloc::vec![(0.0, radius)],
            Family::MollBall { radius, h, .. } => {
                let inner = fabs(radius - h);
                alloc::vec![(0.0, inner), (inner, radius + h)]
            }
        }
    }

    pub fn integral(&self) -> f64 {
        self.fourier_radial(0.0)
    }

    pub fn linf(&self) -> f64 {
        match self.family {
            Family::MollBall { radius, amp, h } => fabs(amp) * pow((radius / h).min(1.0), self.d as f64),
            _ => fabs(self.amp()),
        }
    }

    /// `‖V‖₂²`.
    pub fn l2_sq(&self) -> Result<f64> {
        let d = self.d as f64;
        let amp = self.amp();
        Ok(match self.family {
            Family::Gaussian { sigma, .. } => amp * amp * pow(PI * sigma * sigma, d / 2.0),
            Family::Ball { radius, .. } => amp * amp * ball_volume(self.d) * pow(radius, d),
            Family::Bump { radius, p, .. } => {
                amp * amp * pow(radius, d) * pow(PI, d / 2.0) * gamma(2.0 * p as f64 + 1.0)
                    / gamma(2.0 * p as f64 + d / 2.0 + 1.0)
            }
            Family::MollBall { radius, h, .. } => {
                let omega = sphere_area(self.d);
                let inner = fabs(radius - h);
                let v0 = self.eval_radial(0.0);
                let core = v0 * v0 * ball_volume(self.d) * pow(inner, d);
                let opts = QuadOptions { abs_tol: 1e-15 * amp * amp, rel_tol: 1e-13, max_intervals: 4000, initial_panels: 8 };
                let lens = adaptive_quad_with(
                    |s| {
                        let v = self.eval_radial(s);
                        omega * pow(s, d - 1.0) * v * v
                    },
                    inner,
                    radius + h,
                    opts,
                )?;
                core + lens.value
            }
        })
    }

    /// `‖|D|^j V‖₂²`.
    pub fn hdot_sq(&self, j: u32) -> Result<Norm> {
        let d = self.d as f64;
        let amp = self.amp();
        match self.family {
            Family::Gaussian { sigma, .. } => {
                let omega = sphere_area(self.d);
                Ok(Norm::Finite(
                    amp * amp * pow(sigma, 2.0 * d) * omega * gamma(j as f64 + d / 2.0)
                        / (2.0 * pow(sigma, 2.0 * j as f64 + d)),
                ))
            }
            Family::Ball { .. } if j == 0 => Ok(Norm::Finite(self.l2_sq()?)),
            Family::Ball { .. } => Ok(Norm::Infinite),
            Family::Bump { radius, p, .. } => {
                if j > p {
                    return Ok(Norm::Infinite);
                }
                Ok(Norm::Finite(amp * amp * bump_hdot_sq(self.d, radius, p, j)))
            }
            Family::MollBall { radius, h, .. } => match j {
                0 => Ok(Norm::Finite(self.l2_sq()?)),
                1 => {
                    let omega = sphere_area(self.d);
                    let lo = fabs(radius - h);
                    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 4000, initial_panels: 8 };
                    let r = adaptive_quad_with(
                        |s| {
                            let v = amp * lens_slope(self.d, radius, h, s);
                            omega * pow(s, d - 1.0) * v * v
                        },
                        lo,
                        radius + h,
                        opts,
                    )?;
                    Ok(Norm::Finite(r.value))
                }
                _ => self.fourier_moment(2, j),
            },
        }
    }

    /// `(2π)^{−d}∫|ξ|^{2j}|V̂(ξ)|^q dξ` by radial quadrature between the zeros
    /// of `V̂` up to `10⁴/ℓ_min`, plus the Bessel-envelope tail. Infinite when
    /// the envelope is not integrable.
    pub fn fourier_moment(&self, q: u32, j: u32) -> Result<Norm> {
        if q == 0 || q > 2 {
            return Err(invalid("fourier_moment supports |V̂| and |V̂|²"));
        }
        if let Family::Gaussian { sigma, amp } = self.family {
            let d = self.d as f64;
            let c = fabs(amp) * pow(2.0 * PI * sigma * sigma, d / 2.0);
            let a = 0.5 * q as f64 * sigma * sigma;
            // ∫ρ^{d−1+2j} e^{−aρ²} dρ = Γ(j + d/2)/(2a^{j+d/2})
            let s = j as f64 + d / 2.0;
            let integral = gamma(s) / (2.0 * pow(a, s));
            return Ok(Norm::Finite(
                pow(c, q as f64) * sphere_area(self.d) * integral / pow(2.0 * PI, d),
            ));
        }
        radial::fourier_moment(self, q, j)
    }

    /// `‖V‖_{H^m}² = Σ_i C(m,i)‖|D|^i V‖²`.
    /// `∫₀^∞ ρ^{d−1} K(ρ)|V̂(ρ)|² dρ` for a bounded radial weight `K`.
    pub fn weighted_fourier_sq(&self, w: &Weight<'_>) -> Result<f64> {
        let d = self.d as f64;
        if self.amp() == 0.0 {
            return Ok(0.0);
        }
        match self.family {
            Family::Gaussian { sigma, .. } => {
                let scale = self.fourier_radial(0.0);
                let end = 10.0 / sigma;
                let opts = QuadOptions {
                    abs_tol: 1e-14 * scale * scale / pow(sigma, d),
                    initial_panels: 4 + (w.freq * end / PI) as usize,
                    ..Default::default()
                };
                let f = |rho: f64| {
                    let v = self.fourier_radial(rho);
                    pow(rho, d - 1.0) * v * v * (w.eval)(rho)
                };
                Ok(adaptive_quad_with(f, 0.0, end, opts)?.value)
            }
            _ => radial::radial_integral(self, 2, d - 1.0, w)?.require("weighted |V̂|² integral"),
        }
    }

    pub fn hm_sq(&self, m: u32) -> Result<Norm> {
        let mut total = 0.0;
        let mut binom = 1.0;
        for i in 0..=m {
            match self.hdot_sq(i)? {
                Norm::Finite(v) => total += binom * v,
                Norm::Infinite => return Ok(Norm::Infinite),
            }
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        Ok(Norm::Finite(total))
    }

    /// `‖V‖_{L̂¹} = (2π)^{−d}∫|V̂|`.
    pub fn lhat1(&self) -> Result<Norm> {
        if let Family::Gaussian { amp, .. } = self.family {
            return Ok(Norm::Finite(fabs(amp)));
        }
        self.fourier_moment(1, 0)
    }

    /// `‖V‖_{X_d}`: `L^∞` for `d ≤ 3`, `L̂¹` above.
    pub fn x_norm(&self) -> Result<Norm> {
        if self.d <= 3 {
            Ok(Norm::Finite(self.linf()))
        } else {
            self.lhat1()
        }
    }

    pub fn norms(&self, m_max: u32) -> Result<NormReport> {
        if m_max > 6 {
            return Err(invalid("m_max must be at most 6"));
        }
        let mut hdot = Vec::new();
        let mut hm = Vec::new();
        for m in 0..=m_max {
            hdot.push(self.hdot_sq(m)?.map(sqrt));
            hm.push(self.hm_sq(m)?.map(sqrt));
        }
        Ok(NormReport {
            l2: sqrt(self.l2_sq()?),
            linf: self.linf(),
            hm,
            hdot,
            lhat1: self.lhat1()?,
            integral_v: self.integral(),
        })
    }

    /// Sampler for points with density `|V|/‖V‖₁`.
    pub fn spatial_sampler(&self) -> Result<RadialSampler> {
        RadialSampler::spatial(self)
    }

    /// Sampler for frequencies with density `|V̂|/‖V̂‖₁`.
    pub fn frequency_sampler(&self) -> Result<RadialSampler> {
        RadialSampler::frequency(self)
    }
}

/// `∫₀^θ sin^d t dt` by the reduction formula.
fn sin_power_integral(d: u32, theta: f64) -> f64 {
    let (s, c) = (sin(theta), cos(theta));
    let half = sin(0.5 * theta);
    let (mut n, mut acc) = if d % 2 == 0 { (0, theta) } else { (1, 2.0 * half * half) };
    while n < d {
        n += 2;
        let nf = n as f64;
        acc = -pow(s, nf - 1.0) * c / nf + (nf - 1.0) / nf * acc;
    }
    acc
}

/// Volume of the cap `{y ∈ B_a : y₁ > a cos θ}`.
fn cap_volume(d: u32, a: f64, theta: f64) -> f64 {
    ball_volume(d - 1) * pow(a, d as f64) * sin_power_integral(d, theta)
}

/// Plane of intersection of `∂B_r(0)` and `∂B_h(ρe)`: distance from 0 and
/// the radius of the intersection disc.
fn lens_plane(r: f64, h: f64, rho: f64) -> (f64, f64) {
    let x1 = (rho * rho + r * r - h * h) / (2.0 * rho);
    let a2 = (r * r - x1 * x1).max(0.0);
    (x1, sqrt(a2))
}

/// `|B_r ∩ B_h(ρe)| / |B_h|`.
fn lens_fraction(d: u32, r: f64, h: f64, rho: f64) -> f64 {
    if rho >= r + h {
        return 0.0;
    }
    let vh = ball_volume(d) * pow(h, d as f64);
    if rho <= r - h {
        return 1.0;
    }
    if rho <= h - r {
        return ball_volume(d) * pow(r, d as f64) / vh;
    }
    let (x1, _) = lens_plane(r, h, rho);
    let t1 = acos((x1 / r).clamp(-1.0, 1.0));
    let t2 = acos(((rho - x1) / h).clamp(-1.0, 1.0));
    (cap_volume(d, r, t1) + cap_volume(d, h, t2)) / vh
}

/// `d/dρ` of [`lens_fraction`]: minus the intersection disc area over `|B_h|`.
fn lens_slope(d: u32, r: f64, h: f64, rho: f64) -> f64 {
    if rho >= r + h || rho <= fabs(r - h) {
        return 0.0;
    }
    let (_, a) = lens_plane(r, h, rho);
    -ball_volume(d - 1) * pow(a, d as f64 - 1.0) / (ball_volume(d) * pow(h, d as f64))
}

/// `‖|D|^j f‖²` for `f = (1 − |x|²/r²)^p`, `j ≤ p`, integrating the
/// polynomial pieces exactly in `u = |x|²`.
fn bump_hdot_sq(d: u32, r: f64, p: u32, j: u32) -> f64 {
    // coefficients of f in u
    let mut c: Vec<f64> = Vec::with_capacity(p as usize + 1);
    let mut binom = 1.0;
    for m in 0..=p {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        c.push(sign * binom * pow(r, -2.0 * m as f64));
        binom = binom * (p - m) as f64 / (m + 1) as f64;
    }
    let df = |c: &[f64]| -> Vec<f64> { (1..c.len()).map(|m| m as f64 * c[m]).collect() };
    // Δg(u) = 4u g'' + 2d g'
    let laplacian = |c: &[f64]| -> Vec<f64> {
        let g1 = df(c);
        let g2 = df(&g1);
        let mut out = alloc::vec![0.0; g1.len()];
        for (m, v) in g1.iter().enumerate() {
            out[m] += 2.0 * d as f64 * v;
        }
        for (m, v) in g2.iter().enumerate() {
            out[m + 1] += 4.0 * v;
        }
        out
    };
    for _ in 0..j / 2 {
        c = laplacian(&c);
    }
    // density in u: (ω_d/2) u^{d/2−1} × (g² or 4u g'²)
    let (sq, shift) = if j % 2 == 0 {
        (poly_square(&c), 0)
    } else {
        (poly_square(&df(&c)).iter().map(|v| 4.0 * v).collect(), 1)
    };
    let big_u = r * r;
    let half_d = d as f64 / 2.0;
    let integral: f64 = sq
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let e = (m + shift) as f64 + half_d;
            v * pow(big_u, e) / e
        })
        .sum();
    0.5 * sphere_area(d) * integral
}

fn poly_square(c: &[f64]) -> Vec<f64> {
    if c.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![0.0; 2 * c.len() - 1];
    for (i, a) in c.iter().enumerate() {
        for (j, b) in c.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d;
        match self.family {
            Family::Gaussian { sigma, amp } => write!(f, "gaussian:d={d},sigma={sigma},amp={amp}"),
            Family::Ball { radius, amp } => write!(f, "ball:d={d},r={radius},amp={amp}"),
            Family::MollBall { radius, amp, h } => write!(f, "mollball:d={d},r={radius},amp={amp},h={h}"),
            Family::Bump { radius, amp, p } => write!(f, "bump:d={d},r={radius},amp={amp},p={p}"),
        }
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("missing family in {s:?}")))?;
        let family = family.trim();
        let allowed: &[&str] = match family {
            "gaussian" => &["d", "sigma", "amp"],
            "ball" => &["d", "r", "amp"],
            "mollball" => &["d", "r", "amp", "h"],
            "bump" => &["d", "r", "amp", "p"],
            other => return Err(Error::Parse(format!("unknown potential family {other:?}"))),
        };
        let mut vals: Vec<(String, String)> = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(Error::Parse(format!("unknown key {k:?} for {family}")));
            }
            if vals.iter().any(|(kk, _)| kk == k) {
                return Err(Error::Parse(format!("duplicate key {k:?}")));
            }
            vals.push((k.into(), v.trim().into()));
        }
        let get = |k: &str| vals.iter().find(|(kk, _)| kk == k).map(|(_, v)| v.as_str());
        let need = |k: &str| get(k).ok_or_else(|| Error::Parse(format!("{family} needs {k}")));
        let d: u32 = need("d")?.parse().map_err(|e| Error::Parse(format!("d: {e}")))?;
        let amp = get("amp").map(parse_f64).transpose()?.unwrap_or(1.0);
        let fam = match family {
            "gaussian" => Family::Gaussian { sigma: parse_f64(need("sigma")?)?, amp },
            "ball" => Family::Ball { radius: parse_f64(need("r")?)?, amp },
            "mollball" => Family::MollBall { radius: parse_f64(need("r")?)?, amp, h: parse_f64(need("h")?)? },
            _ => Family::Bump {
                radius: parse_f64(need("r")?)?,
                amp,
                p: need("p")?.parse().map_err(|e| Error::Parse(format!("p: {e}")))?,
            },
        };
        Potential::new(d, fam)
    }
}
