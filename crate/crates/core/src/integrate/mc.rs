//! Stratified-stream Monte Carlo with deterministic reduction.

use alloc::vec::Vec;
use libm::sqrt;

use super::quad::pairwise_sum;
use super::rng::Stream;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub strata: u32,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, strata: 16.min(samples.max(1) as u32) }
    }

    pub fn with_strata(self, strata: u32) -> Self {
        Self { strata, ..self }
    }

    /// Same seed and strata with a different sample count.
    pub fn with_samples(self, samples: u64) -> Self {
        Self { samples, strata: self.strata.min(samples.max(1) as u32), ..self }
    }

    /// Derived configuration for an independent sub-computation.
    pub fn child(self, tag: u64) -> Self {
        let mixed = self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
        Self { seed: mixed, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("n_samples must be positive"));
        }
        if self.strata == 0 || self.strata as u64 > self.samples {
            return Err(invalid("need 1 <= strata <= n_samples"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub strata: u32,
    pub nonfinite: u64,
}

impl McEstimate {
    /// A deterministic value carried in the same shape.
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0, n: 0, seed: 0, strata: 0, nonfinite: 0 }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self { value: self.value * c, stderr: self.stderr * libm::fabs(c), ..self }
    }

    /// Whether `other` lies within `k` combined standard errors.
    pub fn agrees_with(&self, other: f64, other_stderr: f64, k: f64) -> bool {
        let s = sqrt(self.stderr * self.stderr + other_stderr * other_stderr);
        libm::fabs(self.value - other) <= k * s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McVecEstimate {
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n: u64,
    pub seed: u64,
    pub strata: u32,
    pub nonfinite: u64,
}

impl McVecEstimate {
    pub fn component(&self, i: usize) -> McEstimate {
        McEstimate {
            value: self.values[i],
            stderr: self.stderr[i],
            n: self.n,
            seed: self.seed,
            strata: self.strata,
            nonfinite: self.nonfinite,
        }
    }
}

/// Per-stratum running moments (Welford).
#[derive(Debug, Clone, PartialEq)]
pub struct StratumAcc {
    pub n: u64,
    pub bad: u64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

/// Runs one job per stratum. Implementations must return results in job
/// order; scheduling must not influence the values.
pub trait Executor: Sync {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> StratumAcc + Sync)) -> Vec<StratumAcc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> StratumAcc + Sync)) -> Vec<StratumAcc> {
        (0..jobs).map(job).collect()
    }
}

/// Vector-valued Monte Carlo: `f` fills one sample of all components from
/// the stream. Components share random numbers.
pub fn mc_integrate_vec<F>(cfg: McConfig, dim: usize, exec: &dyn Executor, f: F) -> Result<McVecEstimate>
where
    F: Fn(&mut Stream, &mut [f64]) + Sync,
{
    cfg.validate()?;
    let strata = cfg.strata as u64;
    let base = cfg.samples / strata;
    let extra = cfg.samples % strata;
    let job = |s: usize| {
        let n_s = base + u64::from((s as u64) < extra);
        let mut rng = Stream::new(cfg.seed, s as u64);
        let mut buf = alloc::vec![0.0; dim];
        let mut acc = StratumAcc { n: 0, bad: 0, mean: alloc::vec![0.0; dim], m2: alloc::vec![0.0; dim] };
        for _ in 0..n_s {
            f(&mut rng, &mut buf);
            if buf.iter().any(|v| !v.is_finite()) {
                acc.bad += 1;
                continue;
            }
            acc.n += 1;
            let inv = 1.0 / acc.n as f64;
            for i in 0..dim {
                let delta = buf[i] - acc.mean[i];
                acc.mean[i] += delta * inv;
                acc.m2[i] += delta * (buf[i] - acc.mean[i]);
            }
        }
        acc
    };
    let parts = exec.run(cfg.strata as usize, &job);
    reduce(cfg, dim, &parts)
}

fn reduce(cfg: McConfig, dim: usize, parts: &[StratumAcc]) -> Result<McVecEstimate> {
    let n: u64 = parts.iter().map(|p| p.n).sum();
    let bad: u64 = parts.iter().map(|p| p.bad).sum();
    if bad * 1000 > cfg.samples || n == 0 {
        return Err(Error::NonFinite { bad: bad as usize, total: cfg.samples as usize });
    }
    let nf = n as f64;
    let mut values = Vec::with_capacity(dim);
    let mut stderr = Vec::with_capacity(dim);
    let mut scratch = Vec::with_capacity(parts.len());
    for i in 0..dim {
        scratch.clear();
        scratch.extend(parts.iter().map(|p| p.n as f64 * p.mean[i]));
        let mean = pairwise_sum(&scratch) / nf;
        let se = if parts.len() >= 8 {
            scratch.clear();
            scratch.extend(parts.iter().map(|p| {
                let d = p.mean[i] - mean;
                d * d
            }));
            let s = parts.len() as f64;
            sqrt(pairwise_sum(&scratch) / (s - 1.0) / s)
        } else {
            scratch.clear();
            scratch.extend(parts.iter().map(|p| {
                let d = p.mean[i] - mean;
                p.m2[i] + p.n as f64 * d * d
            }));
            if n > 1 {
                sqrt(pairwise_sum(&scratch) / (nf - 1.0) / nf)
            } else {
                0.0
            }
        };
        values.push(mean);
        stderr.push(se);
    }
    Ok(McVecEstimate { values, stderr, n, seed: cfg.seed, strata: cfg.strata, nonfinite: bad })
}

/// Scalar Monte Carlo.
pub fn mc_integrate<F>(cfg: McConfig, exec: &dyn Executor, f: F) -> Result<McEstimate>
where
    F: Fn(&mut Stream) -> f64 + Sync,
{
    let est = mc_integrate_vec(cfg, 1, exec, |rng, out| out[0] = f(rng))?;
    Ok(est.component(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand_has_zero_error() {
        let est = mc_integrate(McConfig::new(1000, 3), &Sequential, |_| 2.5).unwrap();
        assert_eq!(est.value, 2.5);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn uniform_square_mean() {
        let est = mc_integrate(McConfig::new(100_000, 11), &Sequential, |r| {
            let u = r.uniform();
            u * u
        })
        .unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 3.0 * est.stderr);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(mc_integrate(McConfig { samples: 0, seed: 1, strata: 1 }, &Sequential, |_| 1.0).is_err());
        assert!(mc_integrate(McConfig { samples: 4, seed: 1, strata: 8 }, &Sequential, |_| 1.0).is_err());
    }

    #[test]
    fn nonfinite_samples_abort() {
        let r = mc_integrate(McConfig::new(10_000, 1), &Sequential, |r| {
            if r.uniform() < 0.01 {
                f64::NAN
            } else {
                1.0
            }
        });
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }
}
