//! Counter-based random streams.
//!
//! A run is keyed by a 64-bit seed. Stratum `s` draws from ChaCha8 with the
//! key expanded from the seed by `SeedableRng::seed_from_u64` and the ChaCha
//! stream id set to `s`. Streams never overlap and do not depend on how
//! strata are scheduled across workers.

use libm::{cos, log, sin, sqrt};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Stream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal by Box–Muller; the second variate is cached.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = sqrt(-2.0 * log(self.uniform()));
        let a = core::f64::consts::TAU * self.uniform();
        self.spare = Some(r * sin(a));
        r * cos(a)
    }

    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -log(self.uniform())
    }

    /// Gamma(1/2, 1), as half a squared normal.
    #[inline]
    pub fn gamma_half(&mut self) -> f64 {
        let z = self.normal();
        0.5 * z * z
    }

    /// Gamma(2, 1).
    #[inline]
    pub fn gamma2(&mut self) -> f64 {
        -log(self.uniform() * self.uniform())
    }

    /// Uniform direction on the unit sphere of `out.len()` dimensions.
    pub fn unit_vector(&mut self, out: &mut [f64]) {
        match out.len() {
            0 => {}
            1 => out[0] = if self.next_u64() & 1 == 0 { 1.0 } else { -1.0 },
            _ => loop {
                let mut n2 = 0.0;
                for o in out.iter_mut() {
                    *o = self.normal();
                    n2 += *o * *o;
                }
                if n2 > 1e-300 {
                    let inv = 1.0 / sqrt(n2);
                    out.iter_mut().for_each(|o| *o *= inv);
                    return;
                }
            },
        }
    }

    /// Uniform point of the probability simplex.
    pub fn simplex(&mut self, out: &mut [f64]) {
        let mut total = 0.0;
        for o in out.iter_mut() {
            *o = self.exponential();
            total += *o;
        }
        let inv = 1.0 / total;
        out.iter_mut().for_each(|o| *o *= inv);
    }

    /// Dirichlet(1/2, ..., 1/2).
    pub fn dirichlet_half(&mut self, out: &mut [f64]) {
        let mut total = 0.0;
        for o in out.iter_mut() {
            *o = self.gamma_half();
            total += *o;
        }
        let inv = 1.0 / total;
        out.iter_mut().for_each(|o| *o *= inv);
    }
}
