//! Verification suites. Each suite is a list of named checks with a measured
//! discrepancy and the tolerance it is held to; `Scale::Full` uses the pinned
//! sample counts of the acceptance run, `Scale::Quick` a cheap smoke version.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;
use wavetrace_core::geometry::FrequencyTuple;
use wavetrace_core::integrate::quad::{adaptive_quad, oscillatory_tail};
use wavetrace_core::integrate::{Executor, GaussLegendre, McConfig, Stream};
use wavetrace_core::multiplier::{m_k_divided, m_k_simplex, m_k_simplex_gm};
use wavetrace_core::spatial::{sigma_mass, sigma_mass_fourier, trace_spatial_d3};
use wavetrace_core::specfun::{
    bessel_j0, eval_g, eval_g_x_derivative, factorial, g_at_zero_closed, g_derivative_bound, gamma, GOrder, SQRT_PI,
};
use wavetrace_core::trace::{
    a2, a2_curve, ak_fourier_grid, ak_functional, alpha, c2j, mu_and_total, taylor_probe, AlphaOptions,
};
use wavetrace_core::{EvenTestFunction, Potential};

use crate::error::{Error, Result};
use crate::oracle::{build_spectrum, heat_bridge, wave_trace_rel};

pub const SUITES: &[&str] =
    &["specfun", "multiplier", "masses", "k2", "cross", "oracle", "heat", "regularity", "bounds"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Discrepancy or violation, in the units of `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: u8,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    /// `measured ≤ tolerance`.
    fn le(&mut self, name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        });
    }

    fn truth(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed: ok,
            measured: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: detail.into(),
        });
    }

    fn failed(&mut self, name: impl Into<String>, err: &Error) {
        self.truth(name, false, format!("error: {err}"));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn criterion_of(suite: &str) -> Option<u8> {
    SUITES.iter().position(|s| *s == suite).map(|i| i as u8 + 1)
}

pub fn run_suite(suite: &str, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<SuiteReport> {
    let criterion = criterion_of(suite).ok_or_else(|| Error::Usage(format!("unknown suite {suite:?}")))?;
    let start = Instant::now();
    let mut c = Checks(Vec::new());
    match suite {
        "specfun" => specfun(&mut c),
        "multiplier" => multiplier(&mut c, scale, seed, exec),
        "masses" => masses(&mut c, scale, seed, exec),
        "k2" => k2(&mut c),
        "cross" => cross(&mut c, scale, seed, exec),
        "oracle" => oracle(&mut c, scale, seed, exec),
        "heat" => heat(&mut c, scale, seed, exec),
        "regularity" => regularity(&mut c, scale, seed, exec),
        "bounds" => bounds(&mut c, scale, seed, exec),
        _ => unreachable!("suite list checked above"),
    }
    let passed = c.0.iter().all(|x| x.passed);
    Ok(SuiteReport { suite: suite.to_string(), criterion, passed, seconds: start.elapsed().as_secs_f64(), checks: c.0 })
}

fn g(nu: f64, w: f64) -> Result<f64> {
    Ok(eval_g(GOrder::new(nu)?, w)?)
}

// ---- 1: special functions ----

fn specfun(c: &mut Checks) {
    if let Err(e) = specfun_inner(c) {
        c.failed("specfun", &e);
    }
}

fn specfun_inner(c: &mut Checks) -> Result<()> {
    // derivative relation dG_ν/dw = −G_{ν+1}, central differences
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for nu in [-0.5, 0.0, 0.5, 1.0, 1.5] {
        for i in 0..=300 {
            let w = -10.0 + 110.0 * i as f64 / 300.0;
            let fd = (g(nu, w + h)? - g(nu, w - h)?) / (2.0 * h);
            worst = worst.max((fd + g(nu + 1.0, w)?).abs());
        }
    }
    c.le("derivative relation", worst, 1e-8, "max |ΔG/Δw + G_{ν+1}| over ν ∈ {−½,0,½,1,3/2}, w ∈ [−10,100]");

    // integral relation ∫₀^∞ G_{ν+½}(r² + z) dr = (√π/2) G_ν(z)
    let mut worst: f64 = 0.0;
    for nu in [0.0, 0.5, 1.0] {
        for z in [0.0, 1.0, 10.0] {
            let f = |r: f64| g(nu + 0.5, r * r + z).unwrap_or(f64::NAN);
            let head = adaptive_quad(f, 0.0, 20.0, 1e-12)?.value;
            let tail = oscillatory_tail(f, 20.0, PI, 1e-11, 4000)?.value;
            worst = worst.max((head + tail - 0.5 * SQRT_PI * g(nu, z)?).abs());
        }
    }
    c.le("integral relation", worst, 1e-8, "quadrature of ∫G_{ν+½}(r²+z)dr against (√π/2)G_ν(z)");

    // closed forms
    let mut worst: f64 = 0.0;
    worst = worst.max((g(0.5, 0.0)? - 1.0).abs());
    worst = worst.max((g(-0.5, PI * PI)? + 2.0).abs());
    worst = worst.max((g(0.0, 0.0)? - SQRT_PI).abs());
    for z in [0.1, 1.0, 3.7, 12.0, 40.0] {
        worst = worst.max((g(-0.5, z * z)? - 2.0 * z.cos()).abs());
        worst = worst.max((g(0.5, z * z)? - z.sin() / z).abs());
        worst = worst.max((g(0.0, z * z)? - SQRT_PI * bessel_j0(z)).abs());
    }
    for nu in [-0.7, -0.5, 0.0, 0.3, 1.0, 2.5, 6.0] {
        let want = 4f64.powf(-nu) * SQRT_PI / gamma(nu + 1.0);
        worst = worst.max(rel(g(nu, 0.0)?, want));
    }
    c.le("closed forms", worst, 1e-12, "2cos z, sin z/z, √πJ₀(z) and the value at 0");

    // derivative bound, equality at zero for even j
    let mut excess: f64 = 0.0;
    let mut at_zero: f64 = 0.0;
    for nu in [0.0, 0.25, 0.5, 1.0, 1.5] {
        let o = GOrder::new(nu)?;
        for j in 0..=4u32 {
            let bound = g_derivative_bound(o, j);
            for i in 0..=800 {
                let x = 0.25 * i as f64;
                excess = excess.max(eval_g_x_derivative(o, x, j)?.abs() - bound);
            }
            if j % 2 == 0 {
                at_zero = at_zero.max((eval_g_x_derivative(o, 0.0, j)?.abs() - bound).abs());
            }
        }
    }
    c.le("derivative bound", excess, 1e-10, "sup over x ∈ [0,200] of |∂_x^j G_ν(x²)| − bound");
    c.le("derivative bound equality at zero", at_zero, 1e-12, "even j");

    let mut worst: f64 = 0.0;
    for k in 1..=8u32 {
        for d in 1..=8u32 {
            if 2 * k < d {
                continue;
            }
            let want = g(k as f64 - (d as f64 + 1.0) / 2.0, 0.0)?;
            worst = worst.max(rel(g_at_zero_closed(k, d)?, want));
        }
    }
    c.le("closed form at zero", worst, 1e-12, "k ≤ 8, d ≤ 8, 2k ≥ d");
    Ok(())
}

// ---- 2: multiplier ----

fn multiplier(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) {
    if let Err(e) = multiplier_inner(c, scale, seed, exec) {
        c.failed("multiplier", &e);
    }
}

fn multiplier_inner(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<()> {
    let samples = match scale {
        Scale::Full => 1_000_000,
        Scale::Quick => 20_000,
    };
    let mut rng = Stream::new(seed, 0x6d75_6c74);
    let (mut worst, mut worst_gm, mut n, mut misses, mut skipped) = (0.0f64, 0.0f64, 0, 0, 0);
    while n < 100 {
        let k = 2 + (n % 4);
        let d = 1 + (rng.next_u64() % 3) as usize;
        let x: Vec<f64> = (0..k * d).map(|_| 1.5 * rng.normal()).collect();
        let xi = FrequencyTuple::new(d, x)?;
        let Ok(exact) = m_k_divided(&xi) else {
            skipped += 1;
            continue;
        };
        let mc = m_k_simplex(&xi, McConfig::new(samples, seed.wrapping_add(1000 + n as u64)), exec)?;
        let tol = (1e-6f64).max(3.0 * mc.stderr);
        let gap = (exact - mc.value).abs();
        worst = worst.max(gap / tol);
        misses += usize::from(gap > tol);
        worst_gm = worst_gm.max((m_k_simplex_gm(&xi, 8)? - exact).abs());
        n += 1;
    }
    c.le(
        "divided difference vs simplex integral",
        worst,
        1.0,
        format!("100 tuples, k = 2..5, {samples} samples each; worst |Δ|/max(1e−6, 3σ), {misses} outside; {skipped} near-degenerate draws redrawn"),
    );
    // stderr comes from 16 strata, so |Δ|/σ has t₁₅ tails: P(> 3) ≈ 0.009
    // per tuple, and 5 or more misses in 100 has probability ≈ 0.002
    c.le("3σ misses consistent with t-tails", misses as f64, 4.0, format!("{misses} of 100 outside 3σ"));
    c.le("deterministic cubature vs divided difference", worst_gm, 1e-8, "Grundmann–Möller degree 17 on the same 100 tuples");
    Ok(())
}

// ---- 3: masses ----

fn masses(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) {
    if let Err(e) = masses_inner(c, scale, seed, exec) {
        c.failed("masses", &e);
    }
}

fn masses_inner(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<()> {
    let samples = match scale {
        Scale::Full => 10_000_000,
        Scale::Quick => 100_000,
    };
    let mut worst: f64 = 0.0;
    for k in 2..=5u32 {
        let exact = sigma_mass(k, 1, McConfig::new(1, seed), exec)?.value;
        worst = worst.max(rel(exact, sigma_mass_fourier(k, 1)?));
    }
    c.le("d=1 exact mass, k ≤ 5", worst, 1e-12, "against the Fourier-side mass");
    for k in [2u32, 3] {
        let want = sigma_mass_fourier(k, 3)?;
        let m = sigma_mass(k, 3, McConfig::new(samples, seed.wrapping_add(k as u64)), exec)?;
        let gap = (m.value - want).abs();
        let sigma_tol = (3.0 * m.stderr).max(1e-12 * want);
        c.le(format!("d=3 mass k={k} (3σ)"), gap / sigma_tol, 1.0, format!("{} ± {} vs {want}", m.value, m.stderr));
        c.le(format!("d=3 mass k={k} (1%)"), gap / want, 0.01, format!("{} vs {want}", m.value));
    }
    let want = sigma_mass_fourier(2, 2)?;
    let m = sigma_mass(2, 2, McConfig::new(samples, seed.wrapping_add(22)), exec)?;
    c.le(
        "d=2 mass k=2 (3σ)",
        (m.value - want).abs() / (3.0 * m.stderr),
        1.0,
        format!("{} ± {} vs {want}", m.value, m.stderr),
    );
    Ok(())
}

// ---- 4: k = 2 constants ----

/// Checks that fail for a documented reason: the d = 1 constant in the
/// acceptance text is twice what the d = 1 kernel integrates to, and a
/// per-tuple 3σ rule over 100 tuples misses at least once with probability
/// about 0.6 even for an unbiased estimator.
pub const KNOWN_RED: &[&str] = &["a2(V,0) constant d=1", "divided difference vs simplex integral"];

fn k2(c: &mut Checks) {
    if let Err(e) = k2_inner(c) {
        c.failed("k2", &e);
    }
}

/// `Σ_{i} (−1)^{2j−i} C(2j,i) f(|i − j|h)/h^{2j}`, with two Richardson steps.
pub fn even_derivative(f: &dyn Fn(f64) -> f64, j: u32, h: f64) -> f64 {
    let n = 2 * j;
    let diff = |h: f64| {
        let mut s = 0.0;
        for i in 0..=n {
            let c = factorial(n) / (factorial(i) * factorial(n - i));
            let x = (i as f64 - j as f64) * h;
            let sg = if (n - i) % 2 == 0 { 1.0 } else { -1.0 };
            s += sg * c * f(x.abs());
        }
        s / h.powi(n as i32)
    };
    let r1 = |h: f64| (4.0 * diff(h / 2.0) - diff(h)) / 3.0;
    (16.0 * r1(h / 2.0) - r1(h)) / 15.0
}

fn k2_inner(c: &mut Checks) -> Result<()> {
    for d in 1..=5u32 {
        let v = Potential::gaussian(d, 1.0, 1.0)?;
        let l2 = v.l2_sq()?;
        let df = d as f64;
        let want = if d % 2 == 1 { l2 / (2.0 * (2.0 * PI).powf((df - 1.0) / 2.0)) } else { l2 / (2.0 * PI).powf(df / 2.0) };
        let got = a2(&v, 0.0)?;
        c.le(format!("a2(V,0) constant d={d}"), rel(got.abs(), want), 1e-8, format!("|a2(V,0)| = {} vs {want}", got.abs()));
    }
    for d in [1u32, 3, 4] {
        let v = Potential::gaussian(d, 1.0, 1.0)?;
        let f = |t: f64| a2(&v, t).unwrap_or(f64::NAN);
        let mut worst: f64 = 0.0;
        for j in 0..=3 {
            let got = even_derivative(&f, j, 0.8);
            worst = worst.max(rel(got, factorial(2 * j) * c2j(&v, j)?));
        }
        c.le(format!("even derivatives at 0, d={d}"), worst, 1e-4, "Richardson differences vs (2j)!·c2j, j ≤ 3");
    }
    Ok(())
}

// ---- 5: spatial vs Fourier trace ----

fn cross(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) {
    if let Err(e) = cross_inner(c, scale, seed, exec) {
        c.failed("cross", &e);
    }
}

/// `∫₀^T t^{2k−3} φ(t) a_{k,V}(t) dt` in `d = 3` through the Fourier form.
pub fn fourier_trace_d3(phi: &EvenTestFunction, v: &Potential, k: u32, cfg: McConfig, exec: &dyn Executor) -> Result<(f64, f64)> {
    let (n, w) = GaussLegendre::new(64).mapped(0.0, phi.support_radius());
    let power = 2 * k as i32 - 3;
    let wts: Vec<f64> = n.iter().zip(&w).map(|(&t, &c)| c * t.powi(power) * phi.eval(t)).collect();
    if k == 2 {
        let mut s = 0.0;
        for (t, c) in n.iter().zip(&wts) {
            s += c * a2(v, *t)?;
        }
        return Ok((s, 0.0));
    }
    let e = ak_functional(v, k, &n, &wts, cfg, exec)?;
    Ok((e.value, e.stderr))
}

fn cross_inner(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<()> {
    let samples = match scale {
        Scale::Full => 10_000_000,
        Scale::Quick => 200_000,
    };
    let phi = EvenTestFunction::poly_cutoff(1.0, 4)?;
    let v = Potential::gaussian(3, 0.3, 1.0)?;
    for k in [2u32, 3] {
        let s = trace_spatial_d3(&phi, &v, k, McConfig::new(samples, seed.wrapping_add(50 + k as u64)), exec)?;
        let (f, fe) = fourier_trace_d3(&phi, &v, k, McConfig::new(samples, seed.wrapping_add(60 + k as u64)), exec)?;
        let se = s.stderr.hypot(fe);
        c.le(
            format!("spatial vs Fourier trace k={k}"),
            (s.value - f).abs() / (3.0 * se),
            1.0,
            format!("spatial {} ± {}, Fourier {f} ± {fe}", s.value, s.stderr),
        );
    }
    Ok(())
}

// ---- 6: end-to-end oracle ----

pub const ORACLE_PERIOD: f64 = 60.0;
pub const ORACLE_GRID: usize = 1024;

fn oracle(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) {
    if let Err(e) = oracle_inner(c, scale, seed, exec) {
        c.failed("oracle", &e);
    }
}

fn oracle_inner(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<()> {
    let samples = match scale {
        Scale::Full => 1_000_000,
        Scale::Quick => 100_000,
    };
    let cases = [(0.5, 0.8, 4u32), (1.0, 1.0, 4), (0.3, -0.6, 6)];
    for (sigma, amp, p) in cases {
        let v = Potential::gaussian(1, sigma, amp)?;
        let phi = EvenTestFunction::poly_cutoff(1.0, p)?;
        let spec = build_spectrum(&v, ORACLE_PERIOD, ORACLE_GRID)?;
        let want = wave_trace_rel(&spec, &phi, v.support_radius())?;
        let opts = AlphaOptions { k_max: 8, ..AlphaOptions::new(samples, seed) };
        let r = mu_and_total(&phi, &v, &opts, exec)?;
        c.le(
            format!("trace vs torus oracle ({v}, {phi})"),
            rel(r.total, want),
            1e-3,
            format!("engine {} ± {} (k_max {}), oracle {want}", r.total, r.total_stderr, r.k_max),
        );
    }
    Ok(())
}

// ---- 7: heat bridge ----

fn heat(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) {
    if let Err(e) = heat_inner(c, scale, seed, exec) {
        c.failed("heat", &e);
    }
}

fn heat_inner(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<()> {
    let samples = match scale {
        Scale::Full => 1_000_000,
        Scale::Quick => 100_000,
    };
    let v = Potential::gaussian(1, 0.5, 0.8)?;
    let spec = build_spectrum(&v, ORACLE_PERIOD, ORACLE_GRID)?;
    for t in [0.05, 0.1, 0.3] {
        let hb = heat_bridge(&spec, &v, t, &AlphaOptions::new(samples, seed), exec)?;
        c.le(
            format!("heat bridge t={t}"),
            hb.relative_gap(),
            1e-3,
            format!("eigenvalues {}, wave side {} ± {}", hb.left, hb.right, hb.right_stderr),
        );
    }
    Ok(())
}

// ---- 8: regularity ----

fn regularity(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) {
    if let Err(e) = regularity_inner(c, scale, seed, exec) {
        c.failed("regularity", &e);
    }
}

fn probe_grid() -> Vec<f64> {
    (0..25).map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / 24.0)).collect()
}

/// Fourth-order one-sided `(f'(0), f''(0))` from samples at `0, h, …, 5h`.
fn one_sided(f: &[f64], h: f64) -> [f64; 2] {
    let d1 = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    let d2 = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / (12.0 * h * h);
    [d1, d2]
}

fn regularity_inner(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<()> {
    let samples = match scale {
        Scale::Full => 400_000,
        Scale::Quick => 50_000,
    };
    // odd one-sided derivatives of α_V at 0 against the neighbouring even ones
    for d in [1u32, 3] {
        let v = Potential::gaussian(d, 0.5, 1.0)?;
        let h = 0.02;
        let grid: Vec<f64> = (0..6).map(|i| i as f64 * h).collect();
        let curve = alpha(&v, &grid, &AlphaOptions::new(samples, seed.wrapping_add(d as u64)), exec)?;
        let [d1, d2] = one_sided(&curve.values, h);
        let even = d2.abs().min(curve.values[0].abs());
        c.le(
            format!("odd derivative of alpha at 0, d={d}"),
            d1.abs() / even,
            1e-3,
            format!("α'(0) ≈ {d1:e}, α(0) = {:e}, α''(0) ≈ {d2:e}", curve.values[0]),
        );
    }
    let gauss = Potential::gaussian(1, 1.0, 1.0)?;
    let p = taylor_probe(&a2_curve(&gauss, &probe_grid())?, 2)?;
    c.truth("Sobolev probe gaussian m=2", p.verdict, format!("remainder exponent {}", p.remainder_exponent));
    let ball = Potential::ball(1, 1.0, 1.0)?;
    let p = taylor_probe(&a2_curve(&ball, &probe_grid())?, 1)?;
    c.truth("Sobolev probe ball m=1 rejects", !p.verdict, format!("remainder exponent {}", p.remainder_exponent));

    // mollified indicators: ∂²a2(0) against 2c_{2,1}, and the Ḣ¹ blow-up rate
    for d in [1u32, 3] {
        let hs = [0.2, 0.1, 0.05, 0.025];
        let mut worst: f64 = 0.0;
        let mut logs = Vec::new();
        for &h in &hs {
            let v = Potential::mollball(d, 1.0, 1.0, h)?;
            let f = |t: f64| a2(&v, t).unwrap_or(f64::NAN);
            let second = even_derivative(&f, 1, 0.2 * h);
            let want = 2.0 * c2j(&v, 1)?;
            worst = worst.max(rel(second, want));
            let n1 = v.hdot_sq(1)?.require("Ḣ¹ norm")?;
            logs.push((h.ln(), n1.ln()));
        }
        c.le(format!("mollified ∂²a2(0) vs 2c2j(1), d={d}"), worst, 0.05, "h ∈ {0.2, 0.1, 0.05, 0.025}");
        let slope = fit_slope(&logs[logs.len() - 2..]);
        c.le(format!("mollified Ḣ¹ growth slope, d={d}"), (slope + 1.0).abs(), 0.1, format!("slope {slope}"));
    }
    Ok(())
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

// ---- 9: global bounds ----

fn bounds(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) {
    if let Err(e) = bounds_inner(c, scale, seed, exec) {
        c.failed("bounds", &e);
    }
}

fn bounds_inner(c: &mut Checks, scale: Scale, seed: u64, exec: &dyn Executor) -> Result<()> {
    let samples = match scale {
        Scale::Full => 200_000,
        Scale::Quick => 20_000,
    };
    let grid = wavetrace_core::trace::default_t_grid();
    for d in 1..=5u32 {
        for (sigma, amp) in [(0.5, 0.8), (1.0, -1.5)] {
            let v = Potential::gaussian(d, sigma, amp)?;
            let curve = alpha(&v, &grid, &AlphaOptions::new(samples, seed.wrapping_add(d as u64)), exec)?;
            let l2 = v.l2_sq()?;
            let x = v.x_norm()?.require("X norm")?;
            let mut worst = f64::NEG_INFINITY;
            for (i, t) in grid.iter().enumerate() {
                let lhs = curve.values[i].abs() - 3.0 * curve.stderr[i] - curve.tail_bound;
                worst = worst.max(lhs - l2 * (t * x.sqrt()).cosh());
            }
            c.le(format!("cosh bound on alpha ({v})"), worst, 0.0, "max of |α| − 3σ − tail − bound");
        }
    }
    let t = [0.0, 0.25, 0.5, 1.0, 2.0, 3.0];
    for d in 1..=3u32 {
        let v = Potential::gaussian(d, 0.5, 1.5)?;
        let l2 = v.l2_sq()?;
        let mut worst = f64::NEG_INFINITY;
        for k in 2..=5u32 {
            let est = ak_fourier_grid(&v, k, &t, McConfig::new(samples, seed.wrapping_add(100 + k as u64)), exec)?;
            let bound = v.linf().powi(k as i32 - 2) * l2 / factorial(2 * k - 2);
            for i in 0..t.len() {
                worst = worst.max(est.values[i].abs() - 3.0 * est.stderr[i] - bound);
            }
        }
        c.le(format!("a_k bound, k ≤ 5 ({v})"), worst, 0.0, "max of |a_k| − 3σ − bound");
    }
    Ok(())
}
