//! Importance samplers for `|V|` and `|V̂|`.
//!
//! `sample` draws a point `x` from a proposal `q` and returns `h(x)/q(x)`,
//! where `h` is `V` or `V̂`; averaging `w·g(x)` estimates `∫h g` without bias.
//! The Gaussian family is sampled exactly, so the weight is the constant
//! `±∫|h|`. Other families use a piecewise radial table: panel `i` is picked
//! with a probability close to its share of `∫|h|`, and the radius inside the
//! panel has density `∝ ρ^{d−1}`. Frequency tables end in a Pareto tail that
//! matches the Bessel envelope.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{fabs, pow};

use super::{sphere_area, Family, Potential};
use crate::error::{Error, Result};
use crate::integrate::quad::GaussLegendre;
use crate::integrate::Stream;

const SPATIAL_PANELS: usize = 4096;
const FREQ_CUTOFF: f64 = 200.0;
const MAX_FREQ_PANELS: usize = 60_000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    Space,
    Frequency,
}

#[derive(Debug, Clone)]
enum Kind {
    Gaussian { sd: f64, weight: f64 },
    Table { edges: Vec<f64>, cdf: Vec<f64>, probs: Vec<f64>, tail: Option<Tail> },
}

#[derive(Debug, Clone, Copy)]
struct Tail {
    start: f64,
    alpha: f64,
    prob: f64,
}

#[derive(Debug, Clone)]
pub struct RadialSampler {
    pot: Potential,
    side: Side,
    omega: f64,
    kind: Kind,
    mass: f64,
}

impl RadialSampler {
    pub(super) fn spatial(pot: &Potential) -> Result<Self> {
        if pot.amp() == 0.0 {
            return Err(Error::Degenerate("V vanishes identically".into()));
        }
        let d = pot.d() as f64;
        if let Family::Gaussian { sigma, amp } = pot.family() {
            let weight = amp * pow(2.0 * PI * sigma * sigma, d / 2.0);
            return Ok(Self::exact(pot, Side::Space, sigma, weight));
        }
        let pieces = pot.profile_pieces();
        let total_len: f64 = pieces.iter().map(|(a, b)| b - a).sum();
        let mut edges = alloc::vec![0.0];
        for (a, b) in pieces {
            if b <= a {
                continue;
            }
            let n = ((SPATIAL_PANELS as f64 * (b - a) / total_len) as usize).max(8);
            for i in 1..=n {
                edges.push(a + (b - a) * i as f64 / n as f64);
            }
        }
        Self::table(pot, Side::Space, edges, None)
    }

    pub(super) fn frequency(pot: &Potential) -> Result<Self> {
        if pot.amp() == 0.0 {
            return Err(Error::Degenerate("V vanishes identically".into()));
        }
        let d = pot.d() as f64;
        if let Family::Gaussian { sigma, amp } = pot.family() {
            return Ok(Self::exact(pot, Side::Frequency, 1.0 / sigma, amp * pow(2.0 * PI, d)));
        }
        let (_, factors) = pot.bessel_form();
        let e = d - 1.0 - factors.iter().map(|f| f.nu + 0.5).sum::<f64>();
        if e >= -1.0 {
            return Err(Error::InfiniteNorm("L̂¹ norm of V is infinite; |V̂| cannot be sampled".into()));
        }
        let ell_max = factors.iter().map(|f| f.ell).fold(0.0, f64::max);
        let width = PI / (8.0 * ell_max);
        let cutoff = FREQ_CUTOFF / pot.min_length();
        let n = ((cutoff / width) as usize).clamp(64, MAX_FREQ_PANELS);
        let cutoff = n as f64 * width;
        let edges = (0..=n).map(|i| i as f64 * width).collect();
        Self::table(pot, Side::Frequency, edges, Some((cutoff, -e - 1.0)))
    }

    fn exact(pot: &Potential, side: Side, sd: f64, weight: f64) -> Self {
        Self {
            pot: *pot,
            side,
            omega: sphere_area(pot.d()),
            kind: Kind::Gaussian { sd, weight },
            mass: fabs(weight),
        }
    }

    fn table(pot: &Potential, side: Side, edges: Vec<f64>, tail: Option<(f64, f64)>) -> Result<Self> {
        let d = pot.d() as f64;
        let omega = sphere_area(pot.d());
        let rule = GaussLegendre::new(4);
        let h = |rho: f64| match side {
            Side::Space => pot.eval_radial(rho),
            Side::Frequency => pot.fourier_radial(rho),
        };
        let mut masses: Vec<f64> = edges
            .windows(2)
            .map(|w| omega * rule.integrate(w[0], w[1], |r| fabs(h(r)) * pow(r, d - 1.0)))
            .collect();
        let body: f64 = masses.iter().sum();
        if !(body > 0.0) || !body.is_finite() {
            return Err(Error::Degenerate("radial table has no mass".into()));
        }
        let tail = tail.map(|(start, alpha)| {
            // Fit A·ρ^{e} on the last tenth of the table.
            let from = masses.len() - masses.len() / 10;
            let (mut num, mut den) = (0.0, 0.0);
            for i in from..masses.len() {
                num += masses[i];
                let (a, b) = (edges[i], edges[i + 1]);
                den += (pow(b, -alpha) - pow(a, -alpha)) / -alpha;
            }
            let est = num / den * pow(start, -alpha) / alpha;
            (start, alpha, est.max(1e-3 * body))
        });
        let floor = 1e-12 * masses.iter().cloned().fold(0.0, f64::max);
        masses.iter_mut().for_each(|m| *m = m.max(floor));
        let tail_mass = tail.map(|t| t.2).unwrap_or(0.0);
        let total = masses.iter().sum::<f64>() + tail_mass;
        let probs: Vec<f64> = masses.iter().map(|m| m / total).collect();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        let tail = tail.map(|(start, alpha, m)| Tail { start, alpha, prob: m / total });
        Ok(Self {
            pot: *pot,
            side,
            omega,
            kind: Kind::Table { edges, cdf, probs, tail },
            mass: body + tail_mass,
        })
    }

    pub fn d(&self) -> u32 {
        self.pot.d()
    }

    /// `∫|h|`: exact for Gaussians, a quadrature estimate otherwise.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn h(&self, rho: f64) -> f64 {
        match self.side {
            Side::Space => self.pot.eval_radial(rho),
            Side::Frequency => self.pot.fourier_radial(rho),
        }
    }

    /// Fills `out` (length `d`) with a sample and returns `h(x)/q(x)`.
    pub fn sample(&self, rng: &mut Stream, out: &mut [f64]) -> f64 {
        let d = self.pot.d() as f64;
        match &self.kind {
            Kind::Gaussian { sd, weight } => {
                for o in out.iter_mut() {
                    *o = sd * rng.normal();
                }
                *weight
            }
            Kind::Table { edges, cdf, probs, tail } => {
                let u = rng.uniform();
                let i = cdf.partition_point(|&c| c < u);
                let (rho, w) = if i < probs.len() {
                    let (a, b) = (edges[i], edges[i + 1]);
                    let (ad, bd) = (pow(a, d), pow(b, d));
                    let rho = pow(ad + rng.uniform() * (bd - ad), 1.0 / d).clamp(a, b);
                    (rho, self.h(rho) * self.omega * (bd - ad) / (d * probs[i]))
                } else {
                    let t = tail.expect("cdf below one only with a tail");
                    let rho = t.start * pow(rng.uniform(), -1.0 / t.alpha);
                    let q = t.prob * t.alpha * pow(t.start, t.alpha) * pow(rho, -t.alpha - 1.0);
                    (rho, self.h(rho) * self.omega * pow(rho, d - 1.0) / q)
                };
                rng.unit_vector(out);
                out.iter_mut().for_each(|o| *o *= rho);
                w
            }
        }
    }
}
