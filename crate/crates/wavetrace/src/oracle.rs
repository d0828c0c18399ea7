//! Brute-force ground truth in one dimension: the periodic Schrödinger
//! operator `−∂² + V` on `[−L/2, L/2)`, discretized by Fourier collocation and
//! diagonalized densely.

use std::f64::consts::PI;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};
use wavetrace_core::integrate::Executor;
use wavetrace_core::trace::{mu_and_total, AlphaOptions, TraceRecord};
use wavetrace_core::{EvenTestFunction, EvenWeight, Potential};

use crate::error::{Error, Result};

pub const MAX_GRID: usize = 4096;
const MAGIC: &[u8; 8] = b"WTSPEC01";

#[derive(Debug, Clone, PartialEq)]
pub struct TorusSpectrum {
    pub period: f64,
    pub grid: usize,
    /// `(2πm/L)²`, `−N/2 < m ≤ N/2`, ascending.
    pub eigenvalues_free: Vec<f64>,
    pub eigenvalues_v: Vec<f64>,
    pub potential: String,
}

/// `(2πm/L)²` for `−N/2 < m ≤ N/2`, ascending.
pub fn free_eigenvalues(period: f64, grid: usize) -> Vec<f64> {
    let h = (grid / 2) as i64;
    let mut ev: Vec<f64> = (1 - h..=h).map(|m| (2.0 * PI * m as f64 / period).powi(2)).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// The collocation matrix of `−∂²` on the periodic grid `x_j = −L/2 + jL/N`:
/// the second derivative of the trigonometric interpolant, with the
/// Nyquist mode kept as `cos(Nx/2)`.
pub fn laplacian_matrix(period: f64, grid: usize) -> DMatrix<f64> {
    let h = 2.0 * PI / grid as f64;
    let scale = (2.0 * PI / period).powi(2);
    let diag = PI * PI / (3.0 * h * h) + 1.0 / 6.0;
    DMatrix::from_fn(grid, grid, |i, j| {
        if i == j {
            return scale * diag;
        }
        let m = i as i64 - j as i64;
        let s = (m as f64 * h / 2.0).sin();
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        scale * sign / (2.0 * s * s)
    })
}

fn check_grid(period: f64, grid: usize) -> Result<()> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::Oracle("period must be positive".into()));
    }
    if grid < 4 || !grid.is_power_of_two() {
        return Err(Error::Oracle(format!("grid size {grid} must be a power of two >= 4")));
    }
    if grid > MAX_GRID {
        return Err(Error::Oracle(format!("grid size {grid} exceeds the budget {MAX_GRID}")));
    }
    Ok(())
}

pub fn build_spectrum(v: &Potential, period: f64, grid: usize) -> Result<TorusSpectrum> {
    check_grid(period, grid)?;
    if v.d() != 1 {
        return Err(Error::Oracle(format!("the torus oracle is one-dimensional, got d = {}", v.d())));
    }
    if v.support_radius() >= period / 2.0 {
        return Err(Error::Oracle(format!(
            "support radius {} does not fit in half the period {}",
            v.support_radius(),
            period / 2.0
        )));
    }
    let mut h = laplacian_matrix(period, grid);
    for j in 0..grid {
        let x = -period / 2.0 + j as f64 * period / grid as f64;
        h[(j, j)] += v.eval(&[x]);
    }
    let ht = h.transpose();
    h += ht;
    h *= 0.5;
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(TorusSpectrum {
        period,
        grid,
        eigenvalues_free: free_eigenvalues(period, grid),
        eigenvalues_v: ev,
        potential: v.to_string(),
    })
}

/// `Σ_j (e^{−tλ_j^V} − e^{−tλ_j^0})`.
pub fn heat_trace_rel(spec: &TorusSpectrum, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Oracle("heat time must be positive".into()));
    }
    Ok(paired_sum(spec, |l| (-t * l).exp()))
}

/// `2Σ_j ∫φ(t)(cos(t√λ_j^V) − cos(t√λ_j^0)) dt`, using the closed form
/// `φ̂` as an entire function of `λ` (so negative eigenvalues give `cosh`).
///
/// Refused unless `T + 2R_eff < L/2`, which keeps waves from wrapping around
/// the torus within the support of `φ`.
pub fn wave_trace_rel(spec: &TorusSpectrum, phi: &EvenTestFunction, support_radius: f64) -> Result<f64> {
    let reach = phi.support_radius() + 2.0 * support_radius;
    if reach >= spec.period / 2.0 {
        return Err(Error::Oracle(format!(
            "T + 2R = {reach} reaches half the period {}; waves would wrap around",
            spec.period / 2.0
        )));
    }
    let kernel = phi.phi_hat_kernel();
    Ok(2.0 * paired_sum(spec, |l| kernel.eval_sq(l)))
}

fn paired_sum(spec: &TorusSpectrum, f: impl Fn(f64) -> f64) -> f64 {
    let diffs: Vec<f64> = spec.eigenvalues_v.iter().zip(&spec.eigenvalues_free).map(|(a, b)| f(*a) - f(*b)).collect();
    wavetrace_core::integrate::quad::pairwise_sum(&diffs)
}

/// Both sides of the heat/wave bridge at heat time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatBridge {
    pub t: f64,
    /// Heat trace from the torus eigenvalues.
    pub left: f64,
    /// Gaussian-smeared continuum wave trace.
    pub right: f64,
    pub right_stderr: f64,
    /// Relative weight of the Gaussian cut off beyond its support.
    pub truncation: f64,
    pub record: TraceRecord,
}

impl HeatBridge {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.left.abs().max(f64::MIN_POSITIVE);
        (self.left - self.right).abs() / scale
    }
}

pub fn heat_bridge(
    spec: &TorusSpectrum,
    v: &Potential,
    t: f64,
    opts: &AlphaOptions,
    exec: &dyn Executor,
) -> Result<HeatBridge> {
    if !(0.02..=0.5).contains(&t) {
        return Err(Error::Oracle(format!("heat time {t} outside [0.02, 0.5]")));
    }
    if spec.potential != v.to_string() {
        return Err(Error::Oracle("spectrum was built for a different potential".into()));
    }
    let w = wavetrace_core::testfn::GaussianWeight::new(t)?;
    let truncation = w.truncation_bound();
    if truncation >= 1e-14 {
        return Err(Error::Oracle(format!("Gaussian truncation bound {truncation:e} is not below 1e-14")));
    }
    let s = w.support();
    if s + 2.0 * v.support_radius() >= spec.period / 2.0 {
        return Err(Error::Oracle(format!("Gaussian support {s} does not fit the period")));
    }
    let left = heat_trace_rel(spec, t)?;
    let record = mu_and_total(&w, v, opts, exec)?;
    Ok(HeatBridge { t, left, right: record.total, right_stderr: record.total_stderr, truncation, record })
}

/// `wave_trace_rel` for a weight that is not a polynomial cutoff, by direct
/// quadrature in `t` of the spectral sum.
pub fn wave_trace_rel_weight(spec: &TorusSpectrum, w: &dyn EvenWeight, nodes: usize) -> Result<f64> {
    let s = w.support();
    if s >= spec.period / 2.0 {
        return Err(Error::Oracle("weight support reaches half the period".into()));
    }
    let (ts, cs) = wavetrace_core::integrate::GaussLegendre::new(nodes).mapped(0.0, s);
    let mut total = 0.0;
    for (t, c) in ts.iter().zip(&cs) {
        let val = paired_sum(spec, |l| if l >= 0.0 { (t * l.sqrt()).cos() } else { (t * (-l).sqrt()).cosh() });
        total += c * w.value(*t) * val;
    }
    // even integrand, doubled to cover t < 0, times 2 for the operator matrix
    Ok(4.0 * total)
}

/// Cache key: potential, period, grid and library version.
pub fn cache_key(v: &Potential, period: f64, grid: usize) -> String {
    format!("{v};L={period};N={grid};v={}", wavetrace_core::VERSION)
}

pub fn cache_path(dir: &Path, key: &str) -> PathBuf {
    let digest = Sha256::digest(key.as_bytes());
    let name: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("{name}.spec"))
}

pub fn write_spectrum(path: &Path, key: &str, spec: &TorusSpectrum) -> Result<()> {
    let mut buf = Vec::with_capacity(64 + 16 * spec.grid);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(key.len() as u64).to_le_bytes());
    buf.extend_from_slice(key.as_bytes());
    buf.extend_from_slice(&spec.period.to_le_bytes());
    buf.extend_from_slice(&(spec.grid as u64).to_le_bytes());
    for x in spec.eigenvalues_free.iter().chain(&spec.eigenvalues_v) {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// Reads a cached spectrum; `Ok(None)` when the stored key differs.
pub fn read_spectrum(path: &Path, key: &str, potential: &str) -> Result<Option<TorusSpectrum>> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = buf.get(pos..pos + n).ok_or_else(|| Error::Cache("truncated".into()))?;
        pos += n;
        Ok(s)
    };
    if take(8)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let u64_at = |b: &[u8]| u64::from_le_bytes(b.try_into().expect("8 bytes"));
    let klen = u64_at(take(8)?) as usize;
    if take(klen)? != key.as_bytes() {
        return Ok(None);
    }
    let period = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
    let grid = u64_at(take(8)?) as usize;
    check_grid(period, grid).map_err(|e| Error::Cache(e.to_string()))?;
    let mut vals = Vec::with_capacity(2 * grid);
    for _ in 0..2 * grid {
        vals.push(f64::from_le_bytes(take(8)?.try_into().expect("8 bytes")));
    }
    let eigenvalues_v = vals.split_off(grid);
    Ok(Some(TorusSpectrum { period, grid, eigenvalues_free: vals, eigenvalues_v, potential: potential.to_string() }))
}

/// `build_spectrum` through an on-disk cache in `dir`.
pub fn cached_spectrum(dir: &Path, v: &Potential, period: f64, grid: usize) -> Result<TorusSpectrum> {
    let key = cache_key(v, period, grid);
    let path = cache_path(dir, &key);
    if path.exists() {
        if let Ok(Some(spec)) = read_spectrum(&path, &key, &v.to_string()) {
            return Ok(spec);
        }
    }
    let spec = build_spectrum(v, period, grid)?;
    fs::create_dir_all(dir)?;
    write_spectrum(&path, &key, &spec)?;
    Ok(spec)
}
