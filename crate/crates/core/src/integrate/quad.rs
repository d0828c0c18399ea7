//! Deterministic one-dimensional quadrature.

use alloc::vec::Vec;
use libm::{cos, fabs};

use crate::error::{invalid, Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let x = self.nodes.iter().map(|&u| c + h * u).collect();
        let w = self.weights.iter().map(|&w| h * w).collect();
        (x, w)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut s = 0.0;
        for (u, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * u);
        }
        h * s
    }

    /// Composite rule with `panels` equal panels.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + h * p as f64;
            total += self.integrate(lo, lo + h, &mut f);
        }
        total
    }

    /// Composite rule with panels shrinking geometrically towards `a`, for
    /// integrands with an algebraic endpoint singularity at `a`. Keep `a`
    /// at an exactly representable point (normally 0) so the distances to
    /// the singularity are resolved.
    pub fn graded_towards_start<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        uniform_panels: usize,
        mut f: F,
    ) -> f64 {
        let len = b - a;
        let split = a + 0.25 * len;
        let mut total = self.composite(split, b, uniform_panels.max(1), &mut f);
        let mut hi = split;
        let mut width = split - a;
        for _ in 0..60 {
            width *= 0.2;
            let lo = a + width;
            total += self.integrate(lo, hi, &mut f);
            hi = lo;
        }
        total + self.integrate(a, hi, &mut f)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208977211570,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[10] * fc;
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, fabs((kron - gauss) * h))
}

/// Result of a deterministic quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Initial number of equal panels before refinement.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 0.0, max_intervals: 4000, initial_panels: 1 }
    }
}

/// Globally adaptive Gauss–Kronrod (10/21) integration of `f` over `[a, b]`
/// to absolute tolerance `tol`.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    adaptive_quad_with(f, a, b, QuadOptions { abs_tol: tol, ..QuadOptions::default() })
}

pub fn adaptive_quad_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(a < b) {
        if a == b {
            return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
        }
        return Err(invalid("adaptive_quad needs a < b"));
    }
    let n0 = opts.initial_panels.max(1);
    let h = (b - a) / n0 as f64;
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(n0 + 64);
    for i in 0..n0 {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + h };
        let (v, e) = gk21(&mut f, lo, hi);
        intervals.push((lo, hi, v, e));
    }
    let mut evals = 21 * n0;
    loop {
        let (value, error) = totals(&intervals);
        if !value.is_finite() {
            return Err(Error::QuadratureBudget { value, error });
        }
        let target = opts.abs_tol.max(opts.rel_tol * fabs(value));
        if error <= target {
            return Ok(QuadResult { value, error, evaluations: evals });
        }
        if intervals.len() >= opts.max_intervals {
            return Err(Error::QuadratureBudget { value, error });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc });
        let (lo, hi, _, _) = intervals[idx];
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::QuadratureBudget { value, error });
        }
        let (v1, e1) = gk21(&mut f, lo, mid);
        let (v2, e2) = gk21(&mut f, mid, hi);
        evals += 42;
        intervals[idx] = (lo, mid, v1, e1);
        intervals.push((mid, hi, v2, e2));
    }
}

fn totals(intervals: &[(f64, f64, f64, f64)]) -> (f64, f64) {
    let mut v = Vec::with_capacity(intervals.len());
    let mut e = 0.0;
    for iv in intervals {
        v.push(iv.2);
        e += iv.3;
    }
    (pairwise_sum(&v), e)
}

/// `∫_a^∞ f` through the map `x = a + u/(1−u)`.
pub fn semi_infinite<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: f64) -> Result<QuadResult> {
    adaptive_quad(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - u;
            let x = a + u / one_minus;
            let v = f(x) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Wynn's epsilon algorithm on a sequence of partial sums. Returns the last
/// extrapolated value and the difference to the previous one.
pub fn wynn_epsilon(partial: &[f64]) -> (f64, f64) {
    let n = partial.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    if n < 3 {
        let last = partial[n - 1];
        let prev = if n > 1 { partial[n - 2] } else { f64::INFINITY };
        return (last, fabs(last - prev));
    }
    let mut prev_col: Vec<f64> = alloc::vec![0.0; n + 1];
    let mut col: Vec<f64> = partial.to_vec();
    let mut best = partial[n - 1];
    let mut best_err = fabs(partial[n - 1] - partial[n - 2]);
    let mut k = 0;
    while col.len() > 1 {
        let mut next = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            let diff = col[i + 1] - col[i];
            let inv = if diff == 0.0 { f64::INFINITY } else { 1.0 / diff };
            next.push(prev_col[i + 1] + inv);
        }
        k += 1;
        if k % 2 == 0 && next.len() >= 2 {
            let m = next.len();
            let (a, b) = (next[m - 1], next[m - 2]);
            if a.is_finite() && b.is_finite() {
                let err = fabs(a - b);
                if err < best_err {
                    best = a;
                    best_err = err;
                }
            }
        }
        prev_col = col;
        col = next;
    }
    (best, best_err)
}

/// `∫_a^∞ f` for an oscillatory, slowly decaying integrand: Gauss–Legendre on
/// panels of width `panel`, then Wynn acceleration of the partial sums.
pub fn oscillatory_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    panel: f64,
    tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    let rule = GaussLegendre::new(24);
    let mut partial = Vec::new();
    let mut sum = 0.0;
    let mut last = f64::NAN;
    let mut stable = 0;
    for i in 0..max_panels {
        let lo = a + panel * i as f64;
        sum += rule.composite(lo, lo + panel, 2, &mut f);
        partial.push(sum);
        if partial.len() >= 8 {
            let window = &partial[partial.len().saturating_sub(40)..];
            let (v, err) = wynn_epsilon(window);
            if fabs(v - last) <= tol && err <= tol {
                stable += 1;
                if stable >= 3 {
                    return Ok(QuadResult { value: v, error: fabs(v - last).max(err), evaluations: 48 * (i + 1) });
                }
            } else {
                stable = 0;
            }
            last = v;
        }
    }
    Err(Error::QuadratureBudget { value: last, error: f64::NAN })
}

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        n if n <= 8 => {
            let mut s = 0.0;
            for v in x {
                s += v;
            }
            s
        }
        n => {
            let (l, r) = x.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Chebyshev–Gauss–Lobatto points on `[a, b]`, increasing.
pub fn chebyshev_points(n: usize, a: f64, b: f64) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|i| {
            let x = -cos(core::f64::consts::PI * i as f64 / (n - 1) as f64);
            0.5 * (a + b) + 0.5 * (b - a) * x
        })
        .collect()
}

/// Barycentric interpolation weights at `x` for data on the Chebyshev–Lobatto
/// points produced by [`chebyshev_points`].
pub fn chebyshev_basis(nodes: &[f64], x: f64, out: &mut [f64]) {
    let n = nodes.len();
    for (i, &xi) in nodes.iter().enumerate() {
        if x == xi {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[i] = 1.0;
            return;
        }
    }
    let mut denom = 0.0;
    for i in 0..n {
        let mut w = if i % 2 == 0 { 1.0 } else { -1.0 };
        if i == 0 || i == n - 1 {
            w *= 0.5;
        }
        let c = w / (x - nodes[i]);
        out[i] = c;
        denom += c;
    }
    for o in out.iter_mut() {
        *o /= denom;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::{exp, sqrt};

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let r = GaussLegendre::new(7);
        let v = r.integrate(0.0, 2.0, |x| x.powi(13));
        assert!((v - 2f64.powi(14) / 14.0).abs() < 1e-10);
        let total: f64 = r.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_polynomial_and_mapped() {
        let r = adaptive_quad(|t| t * t, 0.0, 1.0, 1e-13).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        let r = semi_infinite(|x| exp(-x * x), 0.0, 1e-12).unwrap();
        assert!((r.value - sqrt(core::f64::consts::PI) / 2.0).abs() < 1e-11);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        let mut s = 0.0;
        let partial: Vec<f64> = (0..20)
            .map(|k| {
                s += if k % 2 == 0 { 1.0 } else { -1.0 } / (k as f64 + 1.0);
                s
            })
            .collect();
        let (v, _) = wynn_epsilon(&partial);
        assert!((v - core::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_tail_sine_over_x() {
        let r = oscillatory_tail(|x| libm::sin(x) / x, 1.0, core::f64::consts::PI, 1e-10, 2000).unwrap();
        let si1 = 0.946083070367183;
        assert!((r.value - (core::f64::consts::FRAC_PI_2 - si1)).abs() < 1e-9);
    }

    #[test]
    fn chebyshev_interpolation_reproduces_polynomials() {
        let nodes = chebyshev_points(9, 0.0, 2.0);
        let vals: Vec<f64> = nodes.iter().map(|x| x.powi(5) - 3.0 * x).collect();
        let mut b = alloc::vec![0.0; 9];
        chebyshev_basis(&nodes, 1.3, &mut b);
        let v: f64 = b.iter().zip(&vals).map(|(a, c)| a * c).sum();
        assert!((v - (1.3f64.powi(5) - 3.9)).abs() < 1e-12);
    }
}
