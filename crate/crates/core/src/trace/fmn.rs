//! Functions sampled on a Chebyshev grid of `[0, T]` and the recursion
//! `F_{m+1,n}(t) = −∫₀¹ s^{n+2m} F_{m,n}(st) ds`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cos, fabs, pow};

use crate::error::{invalid, Result};
use crate::integrate::quad::GaussLegendre;

/// Values at the Chebyshev points of the second kind on `[0, T]`,
/// evaluated by barycentric interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebFunction {
    end: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl ChebFunction {
    /// The grid `t_i = T(1 − cos(iπ/(n−1)))/2`, increasing.
    pub fn grid(end: f64, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(invalid("Chebyshev grid needs at least two points"));
        }
        if !(end > 0.0) || !end.is_finite() {
            return Err(invalid("grid end must be positive"));
        }
        Ok((0..n).map(|i| 0.5 * end * (1.0 - cos(PI * i as f64 / (n - 1) as f64))).collect())
    }

    pub fn from_fn(end: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = Self::grid(end, n)?;
        let values = nodes.iter().map(|&t| f(t)).collect();
        Ok(Self { end, nodes, values })
    }

    /// Wraps values previously computed on [`Self::grid`]`(end, values.len())`.
    pub fn from_values(end: f64, values: Vec<f64>) -> Result<Self> {
        let nodes = Self::grid(end, values.len())?;
        Ok(Self { end, nodes, values })
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(fabs(*v)))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.nodes.len();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            let diff = t - self.nodes[i];
            if diff == 0.0 {
                return self.values[i];
            }
            let mut w = if i % 2 == 0 { 1.0 } else { -1.0 };
            if i == 0 || i == n - 1 {
                w *= 0.5;
            }
            let c = w / diff;
            num += c * self.values[i];
            den += c;
        }
        num / den
    }

    /// Derivative `∂_t^j` at `t = 0` from the Chebyshev coefficients.
    pub fn derivative_at_zero(&self, j: u32) -> f64 {
        let n = self.nodes.len();
        let m = n - 1;
        // coefficients of Σ a_k T_k(x), x = 2t/T − 1
        let mut a = alloc::vec![0.0; n];
        for (k, ak) in a.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..n {
                // node i sits at x = −cos(iπ/m)
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                s += w * self.values[i] * cos(PI * (k * i) as f64 / m as f64) * if k % 2 == 0 { 1.0 } else { -1.0 };
            }
            *ak = s * 2.0 / m as f64 * if k == 0 || k == m { 0.5 } else { 1.0 };
        }
        // T_k^{(j)}(−1) = (−1)^{k+j} ∏_{l<j} (k² − l²)/(2l + 1)
        let mut total = 0.0;
        for (k, ak) in a.iter().enumerate() {
            let mut p = 1.0;
            for l in 0..j {
                p *= ((k * k) as f64 - (l * l) as f64) / (2 * l + 1) as f64;
            }
            let s = if (k as u32 + j) % 2 == 0 { 1.0 } else { -1.0 };
            total += ak * s * p;
        }
        total * pow(2.0 / self.end, j as f64)
    }
}

/// `F_{m,n}` from `F_{0,n} = F` by `m` steps of the recursion, each step by
/// Gauss–Legendre in `s` against the interpolant.
pub fn f_recursion(f: &ChebFunction, m: u32, n: u32) -> Result<ChebFunction> {
    if f.nodes.is_empty() {
        return Err(invalid("empty grid"));
    }
    let rule = GaussLegendre::new(f.nodes.len().max(16) + 8);
    let mut cur = f.clone();
    for step in 0..m {
        let e = (n + 2 * step) as f64;
        let values = cur
            .nodes
            .iter()
            .map(|&t| -rule.integrate(0.0, 1.0, |s| pow(s, e) * cur.eval(s * t)))
            .collect();
        cur = ChebFunction { end: cur.end, nodes: cur.nodes.clone(), values };
    }
    Ok(cur)
}

/// The factor `(−1)^m Γ(a)/(2^m Γ(m + a))`, `a = (n + j + 1)/2`, relating
/// `∂_t^j F_{m,n}(0)` to `∂_t^j F(0)`.
pub fn derivative_factor(m: u32, n: u32, j: u32) -> f64 {
    let a = (n + j + 1) as f64 / 2.0;
    let mut r = 1.0;
    for i in 0..m {
        r *= -1.0 / (2.0 * (a + i as f64));
    }
    r
}
