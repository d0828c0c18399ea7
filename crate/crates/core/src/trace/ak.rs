//! Monte Carlo for the multilinear coefficients `a_{k,V}(t)`, `k ≥ 2`.
//!
//! Both forms integrate a kernel of `t²Q_{k,s}(η')` against
//! `V̂(η₂)V̂(η₃−η₂)⋯V̂(−η_k)` over `Δ^{k−1} × ℝ^{d(k−1)}`. The increments
//! `η_{j+1} − η_j` are drawn i.i.d. from the `|V̂|` sampler, `s` uniformly on
//! the simplex, and the closing factor `V̂(−η_k)` is evaluated directly.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cos, pow, sqrt};

use crate::error::{invalid, Error, Result};
use crate::geometry::{q_form_eta_prime, simplex_volume};
use crate::integrate::quad::adaptive_quad;
use crate::integrate::{mc_integrate, mc_integrate_vec, Executor, McConfig, McEstimate, McVecEstimate, Stream};
use crate::potential::{sphere_area, Family, Potential, RadialSampler};
use crate::specfun::{bessel_j0, GKernel, GOrder};

use super::sign;

const MAX_K: usize = 16;
const MAX_D: usize = 12;

/// Which representation of `a_{k,V}` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkForm {
    /// `2k ≥ d`: kernel `G_{k−(d+1)/2}(t²Q)`.
    Fourier,
    /// `2k < d`, `d` even: kernel `cos(t√Q)`.
    SmallEven,
    /// `2k < d`, `d` odd: kernel `J₀(t√Q)`.
    SmallOdd,
}

impl AkForm {
    pub fn for_kd(k: u32, d: u32) -> Self {
        if 2 * k >= d {
            AkForm::Fourier
        } else if d % 2 == 0 {
            AkForm::SmallEven
        } else {
            AkForm::SmallOdd
        }
    }
}

struct AkSampler {
    d: usize,
    k: usize,
    pot: Potential,
    sampler: RadialSampler,
    /// Prefactor times the simplex volume.
    pre: f64,
    form: AkForm,
    g: Option<GKernel>,
}

impl AkSampler {
    fn new(v: &Potential, k: u32, form: AkForm) -> Result<Self> {
        let d = v.d();
        if k < 2 || k as usize > MAX_K {
            return Err(invalid(format!("k must be in 2..={MAX_K}, got {k}")));
        }
        if d as usize > MAX_D {
            return Err(invalid("dimension too large"));
        }
        if AkForm::for_kd(k, d) != form {
            return Err(Error::Domain(format!("k = {k}, d = {d} needs the {:?} form", AkForm::for_kd(k, d))));
        }
        let (df, kf) = (d as f64, k as f64);
        let pre = match form {
            AkForm::Fourier => 4.0 * pow(PI, df / 2.0) / (kf * pow(2.0 * PI, df * kf)),
            AkForm::SmallEven => {
                8.0 * sign(((d - 2 * k) / 2) as i64) / (kf * pow(2.0, kf) * pow(2.0 * PI, (kf - 0.5) * df))
            }
            AkForm::SmallOdd => {
                4.0 * sign(((d - 2 * k + 1) / 2) as i64)
                    / (kf * pow(2.0, kf) * pow(2.0 * PI, (kf - 0.5) * df - 0.5))
            }
        };
        let g = match form {
            AkForm::Fourier => Some(GKernel::new(GOrder::new(kf - (df + 1.0) / 2.0)?)),
            _ => None,
        };
        Ok(Self {
            d: d as usize,
            k: k as usize,
            pot: *v,
            sampler: v.frequency_sampler()?,
            pre: pre * simplex_volume(k as usize),
            form,
            g,
        })
    }

    /// One draw: `(weight, Q)`; the estimator of `a_{k,V}(t)` is
    /// `weight · kernel(t, Q)`.
    #[inline]
    fn draw(&self, rng: &mut Stream) -> (f64, f64) {
        let (d, k) = (self.d, self.k);
        let mut s = [0.0f64; MAX_K];
        let s = &mut s[..k];
        rng.simplex(s);
        let mut eta = [0.0f64; MAX_K * MAX_D];
        let mut theta = [0.0f64; MAX_D];
        let theta = &mut theta[..d];
        let mut w = self.pre;
        for j in 0..k - 1 {
            w *= self.sampler.sample(rng, theta);
            for c in 0..d {
                let prev = if j == 0 { 0.0 } else { eta[(j - 1) * d + c] };
                eta[j * d + c] = prev + theta[c];
            }
        }
        w *= self.pot.fourier(&eta[(k - 2) * d..(k - 1) * d]);
        (w, q_form_eta_prime(s, &eta[..(k - 1) * d], d))
    }

    #[inline]
    fn kernel(&self, t: f64, q: f64) -> f64 {
        match self.form {
            AkForm::Fourier => self.g.as_ref().expect("Fourier kernel").eval(t * t * q),
            AkForm::SmallEven => cos(t * sqrt(q)),
            AkForm::SmallOdd => bessel_j0(t * sqrt(q)),
        }
    }
}

fn grid(v: &Potential, k: u32, form: AkForm, t: &[f64], cfg: McConfig, exec: &dyn Executor) -> Result<McVecEstimate> {
    super::check_grid_unordered(t)?;
    if v.amp() == 0.0 {
        return Ok(McVecEstimate {
            values: alloc::vec![0.0; t.len()],
            stderr: alloc::vec![0.0; t.len()],
            n: cfg.samples,
            seed: cfg.seed,
            strata: cfg.strata,
            nonfinite: 0,
        });
    }
    let ak = AkSampler::new(v, k, form)?;
    mc_integrate_vec(cfg, t.len(), exec, |rng, out| {
        let (w, q) = ak.draw(rng);
        for (o, &ti) in out.iter_mut().zip(t) {
            *o = w * ak.kernel(ti, q);
        }
    })
}

/// `a_{k,V}` for `2k ≥ d` on a grid of `t`, with common random numbers.
pub fn ak_fourier_grid(v: &Potential, k: u32, t: &[f64], cfg: McConfig, exec: &dyn Executor) -> Result<McVecEstimate> {
    grid(v, k, AkForm::Fourier, t, cfg, exec)
}

/// `a_{k,V}(t)` for `2k ≥ d`.
pub fn ak_fourier(v: &Potential, k: u32, t: f64, cfg: McConfig, exec: &dyn Executor) -> Result<McEstimate> {
    Ok(ak_fourier_grid(v, k, &[t], cfg, exec)?.component(0))
}

/// `a_{k,V}` for `2k < d` on a grid of `t`.
pub fn ak_small_k_grid(v: &Potential, k: u32, t: &[f64], cfg: McConfig, exec: &dyn Executor) -> Result<McVecEstimate> {
    let form = AkForm::for_kd(k, v.d());
    if form == AkForm::Fourier {
        return Err(Error::Domain(format!("k = {k} has 2k >= d = {}; use ak_fourier", v.d())));
    }
    grid(v, k, form, t, cfg, exec)
}

/// `a_{k,V}(t)` for `2k < d`.
pub fn ak_small_k(v: &Potential, k: u32, t: f64, cfg: McConfig, exec: &dyn Executor) -> Result<McEstimate> {
    Ok(ak_small_k_grid(v, k, &[t], cfg, exec)?.component(0))
}

/// `Σ_i w_i a_{k,V}(t_i)` estimated sample by sample, so the standard error
/// is that of the functional. The form is chosen from `(k, d)`.
pub fn ak_functional(
    v: &Potential,
    k: u32,
    nodes: &[f64],
    weights: &[f64],
    cfg: McConfig,
    exec: &dyn Executor,
) -> Result<McEstimate> {
    if nodes.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: nodes.len(), got: weights.len() });
    }
    super::check_grid_unordered(nodes)?;
    if v.amp() == 0.0 {
        return Ok(McEstimate { value: 0.0, stderr: 0.0, n: cfg.samples, seed: cfg.seed, strata: cfg.strata, nonfinite: 0 });
    }
    let ak = AkSampler::new(v, k, AkForm::for_kd(k, v.d()))?;
    mc_integrate(cfg, exec, |rng| {
        let (w, q) = ak.draw(rng);
        nodes.iter().zip(weights).map(|(&t, &c)| c * ak.kernel(t, q)).sum::<f64>() * w
    })
}

/// `a_{k,V}(0)` in closed form: the kernel is constant at `t = 0`, and
/// `∫V̂(η₂)⋯V̂(−η_k)dη' = (2π)^{d(k−1)}∫V^k`.
pub fn ak_at_zero(v: &Potential, k: u32) -> Result<f64> {
    let d = v.d();
    let form = AkForm::for_kd(k, d);
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    let (df, kf) = (d as f64, k as f64);
    let pre = match form {
        AkForm::Fourier => {
            let g0 = crate::specfun::g_at_zero(GOrder::new(kf - (df + 1.0) / 2.0)?);
            4.0 * pow(PI, df / 2.0) / (kf * pow(2.0 * PI, df * kf)) * g0
        }
        AkForm::SmallEven => {
            8.0 * sign(((d - 2 * k) / 2) as i64) / (kf * pow(2.0, kf) * pow(2.0 * PI, (kf - 0.5) * df))
        }
        AkForm::SmallOdd => {
            4.0 * sign(((d - 2 * k + 1) / 2) as i64) / (kf * pow(2.0, kf) * pow(2.0 * PI, (kf - 0.5) * df - 0.5))
        }
    };
    Ok(pre * simplex_volume(k as usize) * pow(2.0 * PI, df * (kf - 1.0)) * power_integral(v, k)?)
}

/// `∫V^k dx`.
pub(crate) fn power_integral(v: &Potential, k: u32) -> Result<f64> {
    let d = v.d();
    let df = d as f64;
    if let Family::Gaussian { sigma, amp } = v.family() {
        return Ok(pow(amp, k as f64) * pow(2.0 * PI * sigma * sigma / k as f64, df / 2.0));
    }
    let scale = pow(v.linf(), k as f64) * pow(v.support_radius(), df);
    let mut total = 0.0;
    let pieces: Vec<(f64, f64)> = v.profile_pieces();
    for (a, b) in pieces {
        if b > a {
            let r = adaptive_quad(|rho| pow(rho, df - 1.0) * pow(v.eval_radial(rho), k as f64), a, b, 1e-15 * scale)?;
            total += r.value;
        }
    }
    Ok(sphere_area(d) * total)
}
