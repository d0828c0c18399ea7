//! `α_V`, `μ_{d,V}(φ)`, the assembled relative trace, and the Sobolev probe.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cosh, fabs, log, pow, sqrt};

use super::ak::{ak_fourier_grid, ak_functional, ak_small_k_grid, AkForm};
use super::fmn::{f_recursion, ChebFunction};
use super::{a2, check_grid, sign, Provenance, TraceCurve};
use crate::error::{invalid, Error, Result};
use crate::integrate::quad::GaussLegendre;
use crate::integrate::{Executor, McConfig, McEstimate, McVecEstimate};
use crate::potential::Potential;
use crate::specfun::factorial;
use crate::testfn::EvenWeight;

/// Hard ceiling on the number of series terms.
pub const K_BUDGET: u32 = 12;
const NODES: usize = 64;
const CHEB_POINTS: usize = 40;
const MIN_SAMPLES: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaOptions {
    /// Largest `k` that may be used (at most 12).
    pub k_max: u32,
    /// Target for the truncation bound; the smallest sufficient `k_max` is used.
    pub tol: f64,
    /// Sample budget; term `k` gets `samples/k²`.
    pub mc: McConfig,
}

impl AlphaOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { k_max: K_BUDGET, tol: 1e-10, mc: McConfig::new(samples, seed) }
    }

    fn check(&self) -> Result<()> {
        if self.k_max < 2 || self.k_max > K_BUDGET {
            return Err(invalid(format!("k_max must be in 2..={K_BUDGET}")));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        Ok(())
    }

    fn for_k(&self, k: u32) -> McConfig {
        let n = (self.mc.samples / (k as u64 * k as u64)).max(MIN_SAMPLES);
        self.mc.child(k as u64).with_samples(n)
    }
}

/// `{0} ∪ logspace(−3, 0.5, 32)`.
pub fn default_t_grid() -> Vec<f64> {
    let mut g = alloc::vec![0.0];
    for i in 0..32 {
        g.push(pow(10.0, -3.0 + 3.5 * i as f64 / 31.0));
    }
    g
}

/// `(C, ‖V‖_X)` in the truncation bound.
fn tail_constants(v: &Potential) -> Result<(f64, f64)> {
    let d = v.d();
    let l2 = v.l2_sq()?;
    let x = v.x_norm()?.require("X_d norm")?;
    let c = if d <= 3 { l2 } else { 8.0 * pow(2.0 * PI, -(d as f64) / 2.0) * l2 };
    Ok((c, x))
}

fn tail_at(c: f64, x: f64, t: f64, k_max: u32) -> f64 {
    let k = k_max as f64;
    c * pow(t * t * x, k - 1.0) / factorial(2 * k_max - 2) * cosh(t * sqrt(x))
}

/// Bound on `Σ_{k > k_max}` of the terms of `α_V(t)`:
/// `C (t²‖V‖_X)^{k_max−1}/(2k_max−2)! · cosh(t‖V‖_X^{1/2})`, with `C = ‖V‖²`
/// for `d ≤ 3` and `C = 8(2π)^{−d/2}‖V‖²` (and `X = L̂¹`) above.
pub fn tail_bound(v: &Potential, t: f64, k_max: u32) -> Result<f64> {
    let (c, x) = tail_constants(v)?;
    Ok(tail_at(c, x, t, k_max))
}

fn choose_k(budget: u32, tol: f64, bound: impl Fn(u32) -> f64) -> (u32, f64, bool) {
    for k in 2..=budget {
        let b = bound(k);
        if b <= tol {
            return (k, b, false);
        }
    }
    (budget, bound(budget), true)
}

/// `a_{k,V}` for `k ≥ 3` on a grid, falling back to the spatial form when
/// `d = 1` and `V̂ ∉ L¹`.
fn ak_grid(v: &Potential, k: u32, t: &[f64], cfg: McConfig, exec: &dyn Executor) -> Result<McVecEstimate> {
    let r = match AkForm::for_kd(k, v.d()) {
        AkForm::Fourier => ak_fourier_grid(v, k, t, cfg, exec),
        _ => ak_small_k_grid(v, k, t, cfg, exec),
    };
    match r {
        Err(Error::InfiniteNorm(_)) if v.d() == 1 => crate::spatial::ak_d1_grid(v, k, t, cfg, exec),
        other => other,
    }
}

fn ak_weighted(v: &Potential, k: u32, nodes: &[f64], w: &[f64], cfg: McConfig, exec: &dyn Executor) -> Result<McEstimate> {
    match ak_functional(v, k, nodes, w, cfg, exec) {
        Err(Error::InfiniteNorm(_)) if v.d() == 1 => crate::spatial::ak_d1_functional(v, k, nodes, w, cfg, exec),
        other => other,
    }
}

/// `(m, n)` with `ã_{k,V} = F_{m,n}` for `a_{k,V}`, `d ≥ 5`, `k ≥ 3`.
fn tilde_indices(k: u32, d: u32) -> (u32, u32) {
    let small = 2 * k < d;
    match (d % 2 == 0, small) {
        (true, true) => (k - 2, 0),
        (true, false) => ((d - 4) / 2, 2 * k - d),
        (false, true) => (k - 2, 1),
        (false, false) => ((d - 3) / 2, 2 * k - d),
    }
}

/// `α_V` on `t_grid`: `Σ_{k≥2}(−1)^k a_{k,V}(t)t^{2k−4}` for `d ≤ 4`, and
/// `a_{2,V} + Σ_{k≥3}(−1)^k t^{2k−4} ã_{k,V}(t)` for `d ≥ 5`. The `a_2` term
/// is deterministic; `k ≥ 3` are Monte Carlo with common random numbers
/// across the grid. For `d ≥ 5` the stderr of `ã_k` is propagated through
/// the absolute value of the recursion, which bounds it.
pub fn alpha(v: &Potential, t_grid: &[f64], opts: &AlphaOptions, exec: &dyn Executor) -> Result<TraceCurve> {
    check_grid(t_grid)?;
    opts.check()?;
    let d = v.d();
    if d >= 4 && !v.lhat1()?.is_finite() {
        return Err(Error::InfiniteNorm(format!("alpha in d = {d} needs a finite L̂¹ norm")));
    }
    let (c, x) = tail_constants(v)?;
    let t_max = *t_grid.last().expect("nonempty grid");
    let (k_max, tail, partial) = choose_k(opts.k_max, opts.tol, |k| tail_at(c, x, t_max, k));

    let n = t_grid.len();
    let mut values = Vec::with_capacity(n);
    for &t in t_grid {
        values.push(a2(v, t)?);
    }
    let mut var = alloc::vec![0.0; n];
    for k in 3..=k_max {
        let cfg = opts.for_k(k);
        let s = sign(k as i64);
        if d <= 4 {
            let est = ak_grid(v, k, t_grid, cfg, exec)?;
            for i in 0..n {
                let p = pow(t_grid[i], (2 * k - 4) as f64);
                values[i] += s * p * est.values[i];
                var[i] += (p * est.stderr[i]) * (p * est.stderr[i]);
            }
        } else if t_max > 0.0 {
            let cheb = ChebFunction::grid(t_max, CHEB_POINTS)?;
            let est = ak_grid(v, k, &cheb, cfg, exec)?;
            let (m, nn) = tilde_indices(k, d);
            let f = ChebFunction::from_values(t_max, est.values.clone())?;
            let tilde = f_recursion(&f, m, nn)?;
            let err = f_recursion(&ChebFunction::from_values(t_max, est.stderr.clone())?, m, nn)?;
            for i in 0..n {
                let p = pow(t_grid[i], (2 * k - 4) as f64);
                values[i] += s * p * tilde.eval(t_grid[i]);
                let e = p * fabs(err.eval(t_grid[i]));
                var[i] += e * e;
            }
        }
    }
    Ok(TraceCurve {
        t_grid: t_grid.to_vec(),
        values,
        stderr: var.into_iter().map(sqrt).collect(),
        tail_bound: tail,
        k_max,
        partial,
        provenance: Provenance { potential: format!("{v}"), seed: opts.mc.seed, n_samples: opts.mc.samples },
    })
}

/// The factor multiplying `a_{k,V}(t)` in `trace⟨φ, W_{k,V}⟩`.
fn term_weight(w: &dyn EvenWeight, d: u32, k: u32, t: f64) -> Result<f64> {
    if 2 * k >= d {
        Ok(pow(t, (2 * k) as f64 - d as f64) * w.value(t))
    } else if d % 2 == 0 {
        w.radial_derivative((d - 2 * k) / 2, t)
    } else {
        // ∂_t(t⁻¹∂_t)^j = t (t⁻¹∂_t)^{j+1}
        Ok(t * w.radial_derivative((d - 2 * k + 1) / 2, t)?)
    }
}

/// The factor multiplying `α_V(t)` in `μ_{d,V}(φ)`.
fn alpha_weight(w: &dyn EvenWeight, d: u32, t: f64) -> Result<f64> {
    if d <= 4 {
        Ok(pow(t, 4.0 - d as f64) * w.value(t))
    } else {
        term_weight(w, d, 2, t)
    }
}

/// `ν_d` for a general even weight, from the radial-derivative form
/// (and `2∫₀^∞ t w` for `d = 1`).
pub fn nu_weight(w: &dyn EvenWeight, d: u32) -> Result<f64> {
    let df = d as f64;
    let (nodes, weights) = GaussLegendre::new(NODES).mapped(0.0, w.support());
    let integrate = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let mut s = 0.0;
        for (t, c) in nodes.iter().zip(&weights) {
            s += c * f(*t)?;
        }
        Ok(s)
    };
    if d == 1 {
        return Ok(2.0 * integrate(&|t| Ok(t * w.value(t)))?);
    }
    if d % 2 == 1 {
        let g0 = w.radial_derivative((d - 3) / 2, 0.0)?;
        return Ok(-2.0 * sign(((d - 1) / 2) as i64) * pow(2.0 * PI, -(df - 1.0) / 2.0) * g0);
    }
    let m = integrate(&|t| w.radial_derivative((d - 2) / 2, t))?;
    Ok(-4.0 * sign((d / 2) as i64) * pow(2.0 * PI, -df / 2.0) * m)
}

/// One `(−1)^k trace⟨φ, W_{k,V}⟩` contribution to `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceTerm {
    pub k: u32,
    /// Signed value `(−1)^k trace⟨φ, W_{k,V}⟩`.
    pub value: f64,
    pub stderr: f64,
}

/// The assembled trace with both literal sign conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// `trace⟨φ, W_{1,V}⟩ = ν_d(φ)∫V`.
    pub nu_term: f64,
    /// `μ_{d,V}(φ) = Σ_{k≥2}(−1)^k trace⟨φ, W_{k,V}⟩`.
    pub mu: f64,
    pub mu_stderr: f64,
    /// `½(−nu_term + μ)`: the relative wave trace, calibrated against the
    /// periodic eigenvalue oracle.
    pub total: f64,
    pub total_stderr: f64,
    /// `nu_term + μ`.
    pub total_unhalved: f64,
    /// `−nu_term + μ`.
    pub total_series_convention: f64,
    pub terms: Vec<TraceTerm>,
    pub k_max: u32,
    /// Bound on the omitted `k > k_max` part of `μ`.
    pub tail_bound: f64,
    pub partial: bool,
    pub provenance: Provenance,
}

impl TraceRecord {
    pub fn signs(&self) -> &'static str {
        "total = (-nu_term + mu)/2; series sign (-1)^k on every W_k"
    }
}

/// `μ_{d,V}(φ)` and the assembled trace. Each `trace⟨φ, W_{k,V}⟩` is
/// integrated in its own form (`t^{2k−d}φ` or the radial derivative of `φ`
/// when `2k < d`), which by the `F_{m,n}` identity equals the `α_V` form.
pub fn mu_and_total(w: &dyn EvenWeight, v: &Potential, opts: &AlphaOptions, exec: &dyn Executor) -> Result<TraceRecord> {
    opts.check()?;
    let d = v.d();
    let provenance = Provenance { potential: format!("{v}"), seed: opts.mc.seed, n_samples: opts.mc.samples };
    let nu_term = nu_weight(w, d)? * v.integral();
    if v.amp() == 0.0 {
        return Ok(TraceRecord {
            nu_term: 0.0,
            mu: 0.0,
            mu_stderr: 0.0,
            total: 0.0,
            total_stderr: 0.0,
            total_unhalved: 0.0,
            total_series_convention: 0.0,
            terms: Vec::new(),
            k_max: 2,
            tail_bound: 0.0,
            partial: false,
            provenance,
        });
    }
    if d >= 4 && !v.lhat1()?.is_finite() {
        return Err(Error::InfiniteNorm(format!("mu in d = {d} needs a finite L̂¹ norm")));
    }
    let (nodes, gl) = GaussLegendre::new(NODES).mapped(0.0, w.support());
    let (c, x) = tail_constants(v)?;
    let mut alpha_w = Vec::with_capacity(NODES);
    for &t in &nodes {
        alpha_w.push(alpha_weight(w, d, t)?);
    }
    let tail_for = |k: u32| -> f64 {
        nodes.iter().zip(&gl).zip(&alpha_w).map(|((&t, &g), &a)| g * fabs(a) * tail_at(c, x, t, k)).sum()
    };
    let (k_max, tail, partial) = choose_k(opts.k_max, opts.tol, tail_for);

    let mut terms = Vec::new();
    let mut k2 = 0.0;
    for (i, &t) in nodes.iter().enumerate() {
        k2 += gl[i] * term_weight(w, d, 2, t)? * a2(v, t)?;
    }
    terms.push(TraceTerm { k: 2, value: k2, stderr: 0.0 });
    for k in 3..=k_max {
        let mut weights = Vec::with_capacity(NODES);
        for (i, &t) in nodes.iter().enumerate() {
            weights.push(gl[i] * term_weight(w, d, k, t)?);
        }
        let est = ak_weighted(v, k, &nodes, &weights, opts.for_k(k), exec)?;
        let s = sign(k as i64);
        terms.push(TraceTerm { k, value: s * est.value, stderr: est.stderr });
    }
    let mu: f64 = terms.iter().map(|t| t.value).sum();
    let mu_stderr = sqrt(terms.iter().map(|t| t.stderr * t.stderr).sum());
    Ok(TraceRecord {
        nu_term,
        mu,
        mu_stderr,
        total: 0.5 * (mu - nu_term),
        total_stderr: 0.5 * mu_stderr,
        total_unhalved: nu_term + mu,
        total_series_convention: mu - nu_term,
        terms,
        k_max,
        tail_bound: tail,
        partial,
        provenance,
    })
}

/// Result of fitting `Σ_{j<m} b_j t^{2j}` to a curve near `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorProbe {
    pub coeffs: Vec<f64>,
    /// Growth exponent of the remainder at `t → 0`.
    pub remainder_exponent: f64,
    /// `remainder_exponent ≥ 2m − 0.2`.
    pub verdict: bool,
    /// Grid points that entered the exponent fit.
    pub points_used: usize,
}

/// Probes `|f(t) − Σ_{j<m} b_j t^{2j}| ≤ C t^{2m}` on a geometric grid in
/// `(0, 1]`.
///
/// The `b_j` come from least squares with weights `t^{−2m}`. The exponent is
/// the log-log slope of `h = ∏_{j<m}(S − λ^{2j}) f`, where `S f(t) = f(λt)`
/// and `λ` is the grid ratio: `h` annihilates every even polynomial of
/// degree `< 2m` and maps `C t^γ` to a multiple of `t^γ`, so the fitted
/// polynomial's own errors do not leak into the slope. Points whose `h` is
/// below the noise floor (stderr and rounding) are dropped.
pub fn taylor_probe(curve: &TraceCurve, m: u32) -> Result<TaylorProbe> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let pts: Vec<(f64, f64, f64)> = curve
        .t_grid
        .iter()
        .zip(&curve.values)
        .zip(&curve.stderr)
        .filter(|((t, _), _)| **t > 0.0 && **t <= 1.0 + 1e-12)
        .map(|((t, v), e)| (*t, *v, *e))
        .collect();
    let mu = m as usize;
    if pts.len() < mu + 3 {
        return Err(invalid(format!("need at least {} grid points in (0, 1], got {}", mu + 3, pts.len())));
    }
    let lambda = pts[1].0 / pts[0].0;
    if pts.windows(2).any(|w| fabs(w[1].0 / w[0].0 - lambda) > 1e-6 * lambda) {
        return Err(invalid("taylor_probe needs a geometric grid"));
    }

    // weighted normal equations
    let mut a = alloc::vec![0.0; mu * mu];
    let mut rhs = alloc::vec![0.0; mu];
    for &(t, f, _) in &pts {
        let w = pow(t, -2.0 * m as f64);
        let basis: Vec<f64> = (0..mu).map(|j| pow(t, 2.0 * j as f64) * w).collect();
        for i in 0..mu {
            rhs[i] += basis[i] * f * w;
            for j in 0..mu {
                a[i * mu + j] += basis[i] * basis[j];
            }
        }
    }
    let coeffs = solve(&mut a, &mut rhs, mu)?;

    // annihilating differences
    let mut h: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let mut err: Vec<f64> = pts.iter().map(|p| p.2).collect();
    for j in 0..mu {
        let l = pow(lambda, 2.0 * j as f64);
        h = (0..h.len() - 1).map(|i| h[i + 1] - l * h[i]).collect();
        err = (0..err.len() - 1).map(|i| err[i + 1] + l * err[i]).collect();
    }
    let scale = curve.values.iter().fold(0.0f64, |s, v| s.max(fabs(*v)));
    let floor_round = 1e-12 * scale * pow(1.0 + lambda * lambda, m as f64);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, hi) in h.iter().enumerate() {
        let floor = (3.0 * err[i]).max(floor_round);
        if fabs(*hi) > 10.0 * floor {
            xs.push(log(pts[i].0));
            ys.push(log(fabs(*hi)));
        }
    }
    if xs.len() < 2 {
        // remainder below the noise floor everywhere: consistent with any order
        return Ok(TaylorProbe { coeffs, remainder_exponent: f64::INFINITY, verdict: true, points_used: xs.len() });
    }
    let nx = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nx;
    let my = ys.iter().sum::<f64>() / nx;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(TaylorProbe {
        coeffs,
        remainder_exponent: slope,
        verdict: slope >= 2.0 * m as f64 - 0.2,
        points_used: xs.len(),
    })
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve(a: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| fabs(a[i * n + col]).partial_cmp(&fabs(a[j * n + col])).expect("finite"))
            .expect("nonempty");
        if a[piv * n + col] == 0.0 {
            return Err(Error::Degenerate("singular least-squares system".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        for i in col + 1..n {
            let f = a[i * n + col] / a[col * n + col];
            for j in col..n {
                a[i * n + j] -= f * a[col * n + j];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i * n + i];
    }
    Ok(x)
}
