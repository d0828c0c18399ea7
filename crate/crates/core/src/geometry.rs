//! Simplex points, frequency tuples and the quadratic forms `|ξ|_s²`,
//! `Q_{k,s}` and `q_{k,s}(i,j)`.

use alloc::format;
use alloc::vec::Vec;
use libm::fabs;

use crate::error::{invalid, Error, Result};
use crate::integrate::Stream;
use crate::specfun::factorial;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(invalid("simplex point needs k >= 1"));
        }
        if s.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(invalid("simplex coordinates must be finite and nonnegative"));
        }
        let total: f64 = s.iter().sum();
        if fabs(total - 1.0) > 1e-14 * s.len() as f64 {
            return Err(invalid(format!("simplex coordinates sum to {total}, not 1")));
        }
        Ok(Self(s))
    }

    /// The vertex `e_m` (0-based).
    pub fn vertex(k: usize, m: usize) -> Self {
        let mut s = alloc::vec![0.0; k];
        s[m] = 1.0;
        Self(s)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Lebesgue volume `1/(k−1)!` of `Δ^{k−1}` in its first `k−1` coordinates.
pub fn simplex_volume(k: usize) -> f64 {
    1.0 / factorial(k.saturating_sub(1) as u32)
}

/// Uniform point of `Δ^{k−1}` from normalized exponentials.
pub fn sample_simplex(k: usize, rng: &mut Stream) -> SimplexPoint {
    let mut s = alloc::vec![0.0; k.max(1)];
    rng.simplex(&mut s);
    SimplexPoint(s)
}

/// `k` vectors in `ℝ^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTuple {
    d: usize,
    xi: Vec<f64>,
}

impl FrequencyTuple {
    pub fn new(d: usize, xi: Vec<f64>) -> Result<Self> {
        if d == 0 || xi.is_empty() || xi.len() % d != 0 {
            return Err(invalid("frequency tuple needs d >= 1 and k >= 1 whole vectors"));
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(invalid("frequency tuple entries must be finite"));
        }
        Ok(Self { d, xi })
    }

    pub fn from_vectors(vectors: &[&[f64]]) -> Result<Self> {
        let d = vectors.first().map(|v| v.len()).unwrap_or(0);
        if vectors.iter().any(|v| v.len() != d) {
            return Err(invalid("all vectors must have the same dimension"));
        }
        Self::new(d, vectors.iter().flat_map(|v| v.iter().copied()).collect())
    }

    /// `(0, η₂, …, η_k)` from the `k−1` vectors of `η'`.
    pub fn from_eta_prime(d: usize, eta_prime: &[f64]) -> Result<Self> {
        let mut xi = alloc::vec![0.0; d];
        xi.extend_from_slice(eta_prime);
        Self::new(d, xi)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.xi.len() / self.d
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        &self.xi[j * self.d..(j + 1) * self.d]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.xi
    }

    pub fn norm_sq(&self, j: usize) -> f64 {
        self.vector(j).iter().map(|x| x * x).sum()
    }

    /// Increments `θ_j = ξ_{j+1} − ξ_j` around the closed chain (`ξ_{k+1} = ξ_1`).
    pub fn cyclic_increments(&self) -> Self {
        let (k, d) = (self.k(), self.d);
        let mut theta = alloc::vec![0.0; k * d];
        for j in 0..k {
            let next = (j + 1) % k;
            for c in 0..d {
                theta[j * d + c] = self.xi[next * d + c] - self.xi[j * d + c];
            }
        }
        Self { d, xi: theta }
    }

    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: v.len() });
        }
        let xi = self.xi.iter().enumerate().map(|(i, x)| x + v[i % self.d]).collect();
        Ok(Self { d: self.d, xi })
    }
}

fn check_k(s: &SimplexPoint, xi: &FrequencyTuple) -> Result<()> {
    if s.k() != xi.k() {
        return Err(Error::DimensionMismatch { expected: s.k(), got: xi.k() });
    }
    Ok(())
}

/// `|ξ|_s² = Σ s_j |ξ_j|²`.
pub fn xi_norm_s(s: &SimplexPoint, xi: &FrequencyTuple) -> Result<f64> {
    check_k(s, xi)?;
    Ok(s.0.iter().enumerate().map(|(j, sj)| sj * xi.norm_sq(j)).sum())
}

/// `Q_{k,s}(ξ) = |ξ|_s² − |s·ξ|²`.
pub fn q_form(s: &SimplexPoint, xi: &FrequencyTuple) -> Result<f64> {
    check_k(s, xi)?;
    Ok(q_form_raw(&s.0, &xi.xi, xi.d))
}

/// `Q_{k,s}` as `Σ_{a<b} s_a s_b |ξ_a − ξ_b|²`, the same quantity written
/// without cancellation. Nonnegative and translation invariant by
/// construction.
#[inline]
pub fn q_form_raw(s: &[f64], xi: &[f64], d: usize) -> f64 {
    let k = s.len();
    let mut total = 0.0;
    for a in 0..k {
        let xa = &xi[a * d..(a + 1) * d];
        let mut inner = 0.0;
        for b in a + 1..k {
            let xb = &xi[b * d..(b + 1) * d];
            let mut dist = 0.0;
            for c in 0..d {
                let diff = xa[c] - xb[c];
                dist += diff * diff;
            }
            inner += s[b] * dist;
        }
        total += s[a] * inner;
    }
    total
}

/// `Q_{k,s}` of `(0, η₂, …, η_k)` given the `k−1` vectors of `η'`.
#[inline]
pub fn q_form_eta_prime(s: &[f64], eta_prime: &[f64], d: usize) -> f64 {
    let k = s.len();
    let mut total = 0.0;
    // pairs (1, b): |η_b|²
    for b in 1..k {
        let eb = &eta_prime[(b - 1) * d..b * d];
        let n2: f64 = eb.iter().map(|x| x * x).sum();
        total += s[0] * s[b] * n2;
    }
    for a in 1..k {
        let ea = &eta_prime[(a - 1) * d..a * d];
        let mut inner = 0.0;
        for b in a + 1..k {
            let eb = &eta_prime[(b - 1) * d..b * d];
            let mut dist = 0.0;
            for c in 0..d {
                let diff = ea[c] - eb[c];
                dist += diff * diff;
            }
            inner += s[b] * dist;
        }
        total += s[a] * inner;
    }
    total
}

/// `q_{k,s}(i,j) = Σ_{i<ℓ≤j}(s_ℓ − s_ℓ²) − 2Σ_{i<ℓ<m≤j} s_ℓ s_m` with
/// 1-based `1 ≤ i < j ≤ k`.
pub fn q_coeff(s: &SimplexPoint, i: usize, j: usize) -> Result<f64> {
    let k = s.k();
    if !(1 <= i && i < j && j <= k) {
        return Err(Error::Index(format!("need 1 <= i < j <= {k}, got ({i}, {j})")));
    }
    let sl = &s.0;
    let mut total = 0.0;
    let mut running = 0.0;
    for l in i + 1..=j {
        let x = sl[l - 1];
        total += x - x * x - 2.0 * x * running;
        running += x;
    }
    Ok(total)
}

/// `Q_{k,s}(η')` rebuilt from the chain increments `θ_j = η_{j+1} − η_j`
/// (`η_1 = η_{k+1} = 0`) as `−Σ_{i<j} q_{k,s}(i,j)⟨θ_i, θ_j⟩`.
pub fn q_from_increments(s: &SimplexPoint, theta: &FrequencyTuple) -> Result<f64> {
    check_k(s, theta)?;
    let k = s.k();
    let mut total = 0.0;
    for i in 1..=k {
        for j in i + 1..=k {
            let dot: f64 = theta.vector(i - 1).iter().zip(theta.vector(j - 1)).map(|(a, b)| a * b).sum();
            total -= q_coeff(s, i, j)? * dot;
        }
    }
    Ok(total)
}
