//! Spatial side for `d ≤ 3`: the closed path length `f(u')`, the measures
//! `dσ_k`, their masses and Fourier transforms, and trace functionals that
//! avoid the Fourier representation.
//!
//! `dσ_k = (4/k)∫_Δ ∏_j S(s_j, θ_j) ds` with `θ_1 = u_2`,
//! `θ_j = u_{j+1} − u_j`, `θ_k = −u_k` and `S` the wave kernel whose Fourier
//! transform is `sin(s|ξ|)/|ξ|`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, fabs, pow, sqrt};

use crate::error::{domain, invalid, Result};
use crate::geometry::{q_form_eta_prime, simplex_volume};
use crate::integrate::quad::GaussLegendre;
use crate::integrate::{mc_integrate, mc_integrate_vec, Executor, McConfig, McEstimate, McVecEstimate, Stream};
use crate::potential::Potential;
use crate::specfun::{factorial, gamma, g_at_zero, GKernel, GOrder};
use crate::testfn::EvenWeight;

const MAX_K: usize = 16;

fn check_k(k: u32) -> Result<usize> {
    if k < 2 || k as usize > MAX_K {
        return Err(invalid(format!("k must be in 2..={MAX_K}, got {k}")));
    }
    Ok(k as usize)
}

fn check_d(d: u32, allowed: &[u32]) -> Result<usize> {
    if !allowed.contains(&d) {
        return Err(domain(format!("dimension {d} not supported here")));
    }
    Ok(d as usize)
}

fn norm(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|c| c * c).sum())
}

/// Segment lengths `|θ_1|, …, |θ_k|` of the closed path `0, u_2, …, u_k, 0`.
fn segments(u_prime: &[f64], d: usize, out: &mut Vec<f64>) {
    out.clear();
    let m = u_prime.len() / d;
    let mut prev = [0.0f64; 3];
    for j in 0..m {
        let p = &u_prime[j * d..(j + 1) * d];
        let diff: Vec<f64> = (0..d).map(|c| p[c] - prev[c]).collect();
        out.push(norm(&diff));
        prev[..d].copy_from_slice(p);
    }
    out.push(norm(&prev[..d]));
}

/// Length of the closed polygon through `0, u_2, …, u_k, 0`. `u_prime` is
/// flat, `k − 1` points of dimension `d`.
pub fn f_path(u_prime: &[f64], d: u32) -> Result<f64> {
    let d = check_d(d, &[1, 2, 3])?;
    if u_prime.is_empty() || u_prime.len() % d != 0 {
        return Err(invalid("u' must hold k − 1 >= 1 points of dimension d"));
    }
    if u_prime.iter().any(|x| !x.is_finite()) {
        return Err(invalid("u' must be finite"));
    }
    let mut seg = Vec::new();
    segments(u_prime, d, &mut seg);
    Ok(seg.iter().sum())
}

/// `ρ_k(u') = (1 − f(u'))₊^{k−1} / (2^{k−2} k!)` in one dimension.
pub fn rho_k_d1(k: u32, u_prime: &[f64]) -> Result<f64> {
    check_k(k)?;
    if u_prime.len() != k as usize - 1 {
        return Err(invalid(format!("need k − 1 = {} coordinates", k - 1)));
    }
    let f = f_path(u_prime, 1)?;
    if f >= 1.0 {
        return Ok(0.0);
    }
    Ok(pow(1.0 - f, (k - 1) as f64) / (pow(2.0, k as f64 - 2.0) * factorial(k)))
}

/// `ρ_k(u')` for `d = 2`.
///
/// With `s_j = ℓ_j + (1 − f)w_j` the simplex integral becomes
/// `(1 − f)^{−1} ∫_Δ ∏ w_j^{−1/2}(w_j + 2a_j)^{−1/2} dw`, `a_j = ℓ_j/(1 − f)`,
/// and the `w^{−1/2}` singularities are absorbed by drawing `w` from
/// Dirichlet(1/2), leaving a bounded integrand.
pub fn rho_k_d2(k: u32, u_prime: &[f64], cfg: McConfig, exec: &dyn Executor) -> Result<McEstimate> {
    let ku = check_k(k)?;
    if u_prime.len() != 2 * (ku - 1) {
        return Err(invalid(format!("need k − 1 = {} points in the plane", ku - 1)));
    }
    let f = f_path(u_prime, 2)?;
    if f >= 1.0 {
        return Ok(McEstimate { value: 0.0, stderr: 0.0, n: cfg.samples, seed: cfg.seed, strata: cfg.strata, nonfinite: 0 });
    }
    let mut seg = Vec::new();
    segments(u_prime, 2, &mut seg);
    if seg.iter().any(|&l| l == 0.0) {
        return Err(domain("ρ_k is infinite where a segment has zero length"));
    }
    let a: Vec<f64> = seg.iter().map(|l| l / (1.0 - f)).collect();
    let pre = d2_prefactor(ku) / (1.0 - f);
    mc_integrate(cfg, exec, |rng| pre * dirichlet_factor(rng, &a))
}

/// `(4/(k(2π)^k)) · π^{k/2}/Γ(k/2)`.
fn d2_prefactor(k: usize) -> f64 {
    let kf = k as f64;
    4.0 / (kf * pow(2.0 * PI, kf)) * pow(PI, kf / 2.0) / gamma(kf / 2.0)
}

fn dirichlet_factor(rng: &mut Stream, a: &[f64]) -> f64 {
    let mut w = [0.0f64; MAX_K];
    let w = &mut w[..a.len()];
    rng.dirichlet_half(w);
    w.iter().zip(a).map(|(w, a)| 1.0 / sqrt(w + 2.0 * a)).product()
}

/// `∫dσ_k` for `d = 1` by integrating the polynomial density exactly.
///
/// `{f ≤ r}` is `r` times `{f ≤ 1}`, and in the increments `θ_1..θ_{k−1}`
/// one has `f = 2max(P, N)` with `P`, `N` the sums of the positive and
/// negative parts, so each sign orthant with `p` positive coordinates has
/// volume `2^{−(k−1)}/(p!(k−1−p)!)`. Then
/// `∫(1 − f)₊^{k−1} = Vol · (k−1)B(k−1, k)`.
fn mass_d1(k: u32) -> f64 {
    let n = k - 1;
    let vol: f64 = (0..=n)
        .map(|p| {
            let binom = factorial(n) / (factorial(p) * factorial(n - p));
            binom * pow(0.5, n as f64) / (factorial(p) * factorial(n - p))
        })
        .sum();
    let radial = n as f64 * factorial(n - 1) * factorial(n) / factorial(2 * n);
    vol * radial / (pow(2.0, k as f64 - 2.0) * factorial(k))
}

/// `∫dσ_k` for `d = 2`: `θ_1..θ_{k−1}` uniform on discs of radius 1/2 (the
/// support forces `|θ_j| ≤ 1/2`) and one Dirichlet draw per point for the
/// density.
fn mass_d2(k: usize, cfg: McConfig, exec: &dyn Executor) -> Result<McEstimate> {
    let pre = d2_prefactor(k) * pow(PI / 4.0, (k - 1) as f64);
    mc_integrate(cfg, exec, |rng| {
        let mut seg = [0.0f64; MAX_K];
        let (mut cx, mut cy, mut f) = (0.0, 0.0, 0.0);
        for s in seg.iter_mut().take(k - 1) {
            let r = 0.5 * sqrt(rng.uniform());
            let mut dir = [0.0; 2];
            rng.unit_vector(&mut dir);
            cx += r * dir[0];
            cy += r * dir[1];
            *s = r;
            f += r;
        }
        seg[k - 1] = sqrt(cx * cx + cy * cy);
        f += seg[k - 1];
        if f >= 1.0 {
            return 0.0;
        }
        let mut a = [0.0f64; MAX_K];
        for j in 0..k {
            a[j] = seg[j] / (1.0 - f);
        }
        pre / (1.0 - f) * dirichlet_factor(rng, &a[..k])
    })
}

/// One draw on `{f = 1}` for `d = 3`: `θ_j = ŝ_j ω_j` for `j < k`. Returns the
/// weight; `u` receives `u_2, …, u_k`.
///
/// `s_j ~ Gamma(2)` and `ω_j` uniform, projected by `ŝ = s/F(s)` with
/// `F = Σs_j + |Σ s_j ω_j|`. Integrating out the scale gives the density
/// `Γ(2k−2)∏ŝ_j / S^{2k−2}` on the cone section, `S = Σŝ_j`, so the weight is
/// `(4/k) S^{2k−2} / (Γ(2k−2) 4π|X̂|)`.
fn draw_d3(rng: &mut Stream, k: usize, u: &mut [f64]) -> f64 {
    let mut s = [0.0f64; MAX_K];
    let mut x = [0.0f64; 3];
    let mut sum = 0.0;
    for j in 0..k - 1 {
        s[j] = rng.gamma2();
        let mut w = [0.0; 3];
        rng.unit_vector(&mut w);
        for c in 0..3 {
            x[c] += s[j] * w[c];
            u[j * 3 + c] = x[c];
        }
        sum += s[j];
    }
    let closing = norm(&x);
    let f = sum + closing;
    u.iter_mut().for_each(|c| *c /= f);
    let big_s = sum / f;
    let xhat = closing / f;
    4.0 / k as f64 * pow(big_s, (2 * k - 2) as f64) / (factorial(2 * k as u32 - 3) * 4.0 * PI * xhat)
}

/// One draw of `dσ_k` for `d = 1`; `u` receives `u_2, …, u_k`. Zero weight
/// outside the closing constraint.
fn draw_d1(rng: &mut Stream, k: usize, u: &mut [f64]) -> f64 {
    let mut s = [0.0f64; MAX_K];
    rng.simplex(&mut s[..k]);
    let mut x = 0.0;
    let mut w = 4.0 / k as f64 * simplex_volume(k) * 0.5;
    for j in 0..k - 1 {
        x += s[j] * (2.0 * rng.uniform() - 1.0);
        u[j] = x;
        w *= s[j];
    }
    if fabs(x) < s[k - 1] {
        w
    } else {
        0.0
    }
}

/// `∫dσ_k(u')`: exact for `d = 1`, Monte Carlo for `d = 2` and, through the
/// cone parametrization of `{f = 1}`, for `d = 3`.
pub fn sigma_mass(k: u32, d: u32, cfg: McConfig, exec: &dyn Executor) -> Result<McEstimate> {
    let ku = check_k(k)?;
    match check_d(d, &[1, 2, 3])? {
        1 => Ok(McEstimate::exact(mass_d1(k))),
        2 => mass_d2(ku, cfg, exec),
        _ => mc_integrate(cfg, exec, |rng| {
            let mut u = [0.0f64; 3 * MAX_K];
            draw_d3(rng, ku, &mut u)
        }),
    }
}

/// The Fourier relation at `η' = 0`:
/// `(4π^{d/2}/(k(2π)^d)) G_{k−(d+1)/2}(0) / (k−1)!`.
pub fn sigma_mass_fourier(k: u32, d: u32) -> Result<f64> {
    check_k(k)?;
    check_d(d, &[1, 2, 3])?;
    let df = d as f64;
    let g0 = g_at_zero(GOrder::new(k as f64 - (df + 1.0) / 2.0)?);
    Ok(4.0 * pow(PI, df / 2.0) / (k as f64 * pow(2.0 * PI, df)) * g0 * simplex_volume(k as usize))
}

/// Both sides of the Fourier relation for `dσ_k` at each `η'` (flat, `k − 1`
/// vectors of dimension `d`): the transform of the sampled measure and the
/// simplex integral of `G_{k−(d+1)/2}(Q_{k,s}(η̃))`, `η̃` the cumulative sums.
pub fn ftsigma_check(
    k: u32,
    d: u32,
    eta_primes: &[Vec<f64>],
    cfg: McConfig,
    exec: &dyn Executor,
) -> Result<Vec<(McEstimate, McEstimate)>> {
    let ku = check_k(k)?;
    let du = check_d(d, &[1, 3])?;
    let m = (ku - 1) * du;
    if eta_primes.is_empty() {
        return Err(invalid("no η' given"));
    }
    if let Some(bad) = eta_primes.iter().find(|e| e.len() != m) {
        return Err(invalid(format!("η' needs {m} coordinates, got {}", bad.len())));
    }
    let n = eta_primes.len();
    let lhs = mc_integrate_vec(cfg.child(1), n, exec, |rng, out| {
        let mut u = [0.0f64; 3 * MAX_K];
        let w = if du == 1 { draw_d1(rng, ku, &mut u) } else { draw_d3(rng, ku, &mut u) };
        for (o, eta) in out.iter_mut().zip(eta_primes) {
            let phase: f64 = eta.iter().zip(&u[..m]).map(|(a, b)| a * b).sum();
            *o = w * libm::cos(phase);
        }
    })?;
    let df = d as f64;
    let kernel = GKernel::new(GOrder::new(k as f64 - (df + 1.0) / 2.0)?);
    let pre = 4.0 * pow(PI, df / 2.0) / (k as f64 * pow(2.0 * PI, df)) * simplex_volume(ku);
    let tilde: Vec<Vec<f64>> = eta_primes
        .iter()
        .map(|eta| {
            let mut acc = alloc::vec![0.0; m];
            for j in 0..ku - 1 {
                for c in 0..du {
                    let prev = if j == 0 { 0.0 } else { acc[(j - 1) * du + c] };
                    acc[j * du + c] = prev + eta[j * du + c];
                }
            }
            acc
        })
        .collect();
    let rhs = mc_integrate_vec(cfg.child(2), n, exec, |rng, out| {
        let mut s = [0.0f64; MAX_K];
        rng.simplex(&mut s[..ku]);
        for (o, e) in out.iter_mut().zip(&tilde) {
            *o = pre * kernel.eval(q_form_eta_prime(&s[..ku], e, du));
        }
    })?;
    Ok((0..n).map(|i| (lhs.component(i), rhs.component(i))).collect())
}

/// Pointwise `d = 1` sampler for `a_{k,V}(t)` over `dσ_k`: `u_1` from `|V|`,
/// `u'` from [`draw_d1`], with the antithetic reflection `u' → −u'`.
struct D1Sampler {
    k: usize,
    pot: Potential,
    sampler: crate::potential::RadialSampler,
}

impl D1Sampler {
    fn new(v: &Potential, k: u32) -> Result<Self> {
        check_d(v.d(), &[1])?;
        let k = check_k(k)?;
        Ok(Self { k, pot: *v, sampler: v.spatial_sampler()? })
    }

    /// `(weight, u_1, u')`.
    fn draw(&self, rng: &mut Stream, u: &mut [f64]) -> (f64, f64) {
        let mut x = [0.0];
        let w1 = self.sampler.sample(rng, &mut x);
        let w = draw_d1(rng, self.k, u);
        (w1 * w, x[0])
    }

    fn value(&self, u1: f64, u: &[f64], t: f64) -> f64 {
        let mut plus = 1.0;
        let mut minus = 1.0;
        for &uj in &u[..self.k - 1] {
            plus *= self.pot.eval(&[u1 + t * uj]);
            minus *= self.pot.eval(&[u1 - t * uj]);
        }
        0.5 * (plus + minus)
    }
}

/// `a_{k,V}(t)` in one dimension from the spatial measure; needs no Fourier
/// norms, so it also covers potentials with `‖V̂‖₁ = ∞`.
pub fn ak_d1_grid(v: &Potential, k: u32, t: &[f64], cfg: McConfig, exec: &dyn Executor) -> Result<McVecEstimate> {
    if t.is_empty() || t.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(invalid("t values must be finite and nonnegative"));
    }
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
    let s = D1Sampler::new(v, k)?;
    mc_integrate_vec(cfg, t.len(), exec, |rng, out| {
        let mut u = [0.0f64; MAX_K];
        let (w, u1) = s.draw(rng, &mut u);
        for (o, &ti) in out.iter_mut().zip(t) {
            *o = if w == 0.0 { 0.0 } else { w * s.value(u1, &u, ti) };
        }
    })
}

/// `Σ_i c_i a_{k,V}(t_i)` in one dimension from the spatial measure.
pub fn ak_d1_functional(
    v: &Potential,
    k: u32,
    nodes: &[f64],
    weights: &[f64],
    cfg: McConfig,
    exec: &dyn Executor,
) -> Result<McEstimate> {
    if nodes.len() != weights.len() {
        return Err(crate::Error::DimensionMismatch { expected: nodes.len(), got: weights.len() });
    }
    if nodes.is_empty() || nodes.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(invalid("t values must be finite and nonnegative"));
    }
    if v.amp() == 0.0 {
        return Ok(McEstimate { value: 0.0, stderr: 0.0, n: cfg.samples, seed: cfg.seed, strata: cfg.strata, nonfinite: 0 });
    }
    let s = D1Sampler::new(v, k)?;
    mc_integrate(cfg, exec, |rng| {
        let mut u = [0.0f64; MAX_K];
        let (w, u1) = s.draw(rng, &mut u);
        if w == 0.0 {
            return 0.0;
        }
        w * nodes.iter().zip(weights).map(|(&t, &c)| c * s.value(u1, &u, t)).sum::<f64>()
    })
}

/// `trace⟨φ, W_k⟩ = ∫₀^∞ t^{2k−1} a_{k,V}(t) φ(t) dt` in one dimension, with
/// `a_{k,V}` from the spatial measure and Gauss–Legendre in `t`.
pub fn trace_spatial_d1(
    phi: &dyn EvenWeight,
    v: &Potential,
    k: u32,
    cfg: McConfig,
    exec: &dyn Executor,
) -> Result<McEstimate> {
    let (nodes, w) = GaussLegendre::new(64).mapped(0.0, phi.support());
    let weights: Vec<f64> = nodes.iter().zip(&w).map(|(&t, &c)| c * pow(t, (2 * k - 1) as f64) * phi.value(t)).collect();
    ak_d1_functional(v, k, &nodes, &weights, cfg, exec)
}

/// `trace⟨φ, W_k⟩` for `d = 3` as the path integral
/// `(4/(k(4π)^k)) ∫ ψ(Σ|x_{j+1} − x_j|) ∏ V(x_j)/|x_{j+1} − x_j| dx`,
/// `ψ(s) = sφ(s)`, cyclic in `j`.
///
/// `x_1` is drawn from `|V|` and the increments from the density
/// `∝ |y|^{−1}e^{−|y|/λ}` (radius Gamma(2, λ)), which cancels the kernel;
/// the closing factor `1/|x_1 − x_k|` is evaluated directly.
pub fn trace_spatial_d3(
    phi: &dyn EvenWeight,
    v: &Potential,
    k: u32,
    cfg: McConfig,
    exec: &dyn Executor,
) -> Result<McEstimate> {
    let ku = check_k(k)?;
    check_d(v.d(), &[3])?;
    if v.amp() == 0.0 {
        return Ok(McEstimate { value: 0.0, stderr: 0.0, n: cfg.samples, seed: cfg.seed, strata: cfg.strata, nonfinite: 0 });
    }
    let sampler = v.spatial_sampler()?;
    // loops longer than the support of φ contribute nothing
    let diameter = match v.family() {
        crate::potential::Family::Gaussian { sigma, .. } => 4.0 * sigma,
        _ => 2.0 * v.support_radius(),
    };
    let lambda = 0.25 * diameter.min(phi.support() / k as f64);
    let step = 4.0 * PI * lambda * lambda;
    let pre = 4.0 / (k as f64 * pow(4.0 * PI, k as f64));
    let pot = *v;
    mc_integrate(cfg, exec, |rng| {
        let mut x1 = [0.0; 3];
        let mut w = pre * sampler.sample(rng, &mut x1);
        let mut x = x1;
        let mut len = 0.0;
        for _ in 0..ku - 1 {
            let r = lambda * rng.gamma2();
            let mut dir = [0.0; 3];
            rng.unit_vector(&mut dir);
            for c in 0..3 {
                x[c] += r * dir[c];
            }
            len += r;
            w *= step * exp(r / lambda) * pot.eval(&x);
            if w == 0.0 {
                return 0.0;
            }
        }
        let closing = norm(&[x[0] - x1[0], x[1] - x1[1], x[2] - x1[2]]);
        len += closing;
        if len >= phi.support() {
            return 0.0;
        }
        w * len * phi.value(len) / closing
    })
}
