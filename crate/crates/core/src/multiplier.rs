//! The multiplier `M_k(ξ) = ∫_Δ ∏ sin(s_j|ξ_j|)/|ξ_j| ds` as a divided
//! difference of `sin√x/√x` and as a simplex integral of `G_{k−1/2}`.

use alloc::format;
use alloc::vec::Vec;
use libm::{fabs, pow};

use crate::error::{invalid, Error, Result};
use crate::geometry::{simplex_volume, FrequencyTuple};
use crate::integrate::{mc_integrate, Executor, McConfig, McEstimate};
use crate::specfun::{factorial, GKernel, GOrder};

fn sinc_sqrt() -> GKernel {
    GKernel::new(GOrder::new(0.5).expect("valid order"))
}

/// `Σ_j ∏_{i≠j} (|ξ_i|² − |ξ_j|²)^{-1} · sin|ξ_j|/|ξ_j|`. Fails when two
/// squared norms are closer than `1e−4·(1 + max|ξ_j|²)`.
pub fn m_k_divided(xi: &FrequencyTuple) -> Result<f64> {
    let x: Vec<f64> = (0..xi.k()).map(|j| xi.norm_sq(j)).collect();
    let gap = 1e-4 * (1.0 + x.iter().cloned().fold(0.0, f64::max));
    let g = sinc_sqrt();
    divided_difference(&x, gap, |w| g.eval(w))
}

fn divided_difference(x: &[f64], gap: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let k = x.len();
    let mut total = 0.0;
    for j in 0..k {
        let mut prod = 1.0;
        for i in 0..k {
            if i == j {
                continue;
            }
            let diff = x[i] - x[j];
            if fabs(diff) < gap {
                return Err(Error::Degenerate(format!("|ξ_{i}|² and |ξ_{j}|² closer than {gap:e}")));
            }
            prod /= diff;
        }
        total += prod * f(x[j]);
    }
    Ok(total)
}

/// Monte Carlo of `∫_Δ G_{k−1/2}(|ξ|_s²) ds`.
pub fn m_k_simplex(xi: &FrequencyTuple, cfg: McConfig, exec: &dyn Executor) -> Result<McEstimate> {
    let k = xi.k();
    let x: Vec<f64> = (0..k).map(|j| xi.norm_sq(j)).collect();
    if k == 1 {
        return Ok(McEstimate::exact(sinc_sqrt().eval(x[0])));
    }
    if k > 16 {
        return Err(Error::Unsupported(format!("m_k_simplex supports k <= 16, got {k}")));
    }
    let g = GKernel::new(GOrder::new(k as f64 - 0.5)?);
    let vol = simplex_volume(k);
    mc_integrate(cfg, exec, |rng| {
        let mut e = [0.0f64; 16];
        let e = &mut e[..k];
        rng.simplex(e);
        let w: f64 = e.iter().zip(&x).map(|(s, xj)| s * xj).sum();
        vol * g.eval(w)
    })
}

/// Deterministic version with a Grundmann–Möller rule of degree `2·level+1`.
pub fn m_k_simplex_gm(xi: &FrequencyTuple, level: u32) -> Result<f64> {
    let k = xi.k();
    let x: Vec<f64> = (0..k).map(|j| xi.norm_sq(j)).collect();
    if k == 1 {
        return Ok(sinc_sqrt().eval(x[0]));
    }
    let g = GKernel::new(GOrder::new(k as f64 - 0.5)?);
    grundmann_moller(k, level, |s| g.eval(s.iter().zip(&x).map(|(a, b)| a * b).sum()))
}

/// Grundmann–Möller rule of degree `2·level+1` on `Δ^{k−1}` in barycentric
/// coordinates, normalized to the Lebesgue volume `1/(k−1)!`.
pub fn grundmann_moller(k: usize, level: u32, mut f: impl FnMut(&[f64]) -> f64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("simplex needs at least one vertex"));
    }
    let n = (k - 1) as u32;
    let s = level;
    let d = 2 * s + 1;
    let mut total = 0.0;
    let mut beta = alloc::vec![0u32; k];
    let mut point = alloc::vec![0.0; k];
    for i in 0..=s {
        let denom = (d + n - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * pow(2.0, -2.0 * s as f64) * pow(denom, d as f64)
            / (factorial(i) * factorial(d + n - i));
        let mut inner = 0.0;
        compositions(s - i, &mut beta, 0, &mut |b| {
            for (p, &bj) in point.iter_mut().zip(b) {
                *p = (2 * bj + 1) as f64 / denom;
            }
            inner += f(&point);
        });
        total += weight * inner;
    }
    Ok(total)
}

fn compositions(m: u32, beta: &mut [u32], pos: usize, visit: &mut dyn FnMut(&[u32])) {
    if pos == beta.len() - 1 {
        beta[pos] = m;
        visit(beta);
        return;
    }
    for v in 0..=m {
        beta[pos] = v;
        compositions(m - v, beta, pos + 1, visit);
    }
}

/// Dense polynomial with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(Vec<f64>);

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() > 13 {
            return Err(invalid("polynomial degree must be at most 12"));
        }
        Ok(Self(coeffs))
    }

    pub fn monomial(degree: u32) -> Result<Self> {
        let mut c = alloc::vec![0.0; degree as usize + 1];
        c[degree as usize] = 1.0;
        Self::new(c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self, m: u32) -> Self {
        let m = m as usize;
        if m >= self.0.len() {
            return Self(Vec::new());
        }
        let c = (m..self.0.len())
            .map(|i| self.0[i] * factorial(i as u32) / factorial((i - m) as u32))
            .collect();
        Self(c)
    }
}

/// Both sides of the Hermite–Genocchi formula
/// `Σ_j f(x_j) ∏_{i≠j} (x_i − x_j)^{-1} = (−1)^{k−1} ∫_Δ f^{(k−1)}(s·x) ds`.
pub fn hermite_genocchi_check(
    f: &Polynomial,
    x: &[f64],
    cfg: McConfig,
    exec: &dyn Executor,
) -> Result<(f64, McEstimate)> {
    let k = x.len();
    if k == 0 {
        return Err(invalid("need at least one node"));
    }
    for i in 0..k {
        for j in i + 1..k {
            if x[i] == x[j] {
                return Err(Error::Degenerate(format!("repeated node {}", x[i])));
            }
        }
    }
    let lhs = divided_difference(x, 0.0, |v| f.eval(v))?;
    let df = f.derivative((k - 1) as u32);
    let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let vol = simplex_volume(k);
    let rhs = mc_integrate(cfg, exec, |rng| {
        let mut s = alloc::vec![0.0; k];
        rng.simplex(&mut s);
        let w: f64 = s.iter().zip(x).map(|(a, b)| a * b).sum();
        sign * vol * df.eval(w)
    })?;
    Ok((lhs, rhs))
}
