//! Run configuration: `key=value` pairs from a config file and from flags,
//! validated against a closed key set and rendered canonically so that a
//! record's embedded configuration reproduces the run.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use wavetrace_core::integrate::McConfig;
use wavetrace_core::trace::default_t_grid;
use wavetrace_core::{EvenTestFunction, Potential};

use crate::error::{Error, Result};

/// Every accepted key, in canonical order.
pub const KEYS: &[&str] = &[
    "command", "potential", "phi", "d", "k", "m", "t_grid", "seed", "samples", "strata", "output", "format", "suite",
    "eta", "period", "grid", "cache", "k_max", "tol",
];

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_STRATA: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Usage(format!("format must be csv or json, got {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// A grid of `t` values: an explicit list, `linspace:a,b,n`,
/// `logspace:a,b,n` (base-10 exponents, with `0` prepended when the spec
/// starts with `0+`), or `default`.
#[derive(Debug, Clone, PartialEq)]
pub enum TGrid {
    List(Vec<f64>),
    Linspace { a: f64, b: f64, n: usize },
    Logspace { a: f64, b: f64, n: usize, with_zero: bool },
    Default,
}

impl TGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            TGrid::List(ref v) => v.clone(),
            TGrid::Linspace { a, b, n } => spaced(a, b, n),
            TGrid::Logspace { a, b, n, with_zero } => {
                let mut v: Vec<f64> = spaced(a, b, n).into_iter().map(|e| 10f64.powf(e)).collect();
                if with_zero {
                    v.insert(0, 0.0);
                }
                v
            }
            TGrid::Default => default_t_grid(),
        }
    }
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    let x: f64 = s.trim().parse().map_err(|_| Error::Usage(format!("not a number: {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Usage(format!("not finite: {s:?}")));
    }
    Ok(x)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl FromStr for TGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "default" {
            return Ok(TGrid::Default);
        }
        let range = |rest: &str| -> Result<(f64, f64, usize)> {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Usage(format!("expected a,b,n in {s:?}")));
            }
            let n: usize = parts[2].trim().parse().map_err(|_| Error::Usage(format!("bad count in {s:?}")))?;
            if n == 0 {
                return Err(Error::Usage("grid needs at least one point".into()));
            }
            Ok((parse_f64(parts[0])?, parse_f64(parts[1])?, n))
        };
        if let Some(rest) = s.strip_prefix("linspace:") {
            let (a, b, n) = range(rest)?;
            return Ok(TGrid::Linspace { a, b, n });
        }
        if let Some(rest) = s.strip_prefix("logspace:") {
            let (with_zero, rest) = match rest.strip_prefix("0+") {
                Some(r) => (true, r),
                None => (false, rest),
            };
            let (a, b, n) = range(rest)?;
            return Ok(TGrid::Logspace { a, b, n, with_zero });
        }
        Ok(TGrid::List(parse_list(s)?))
    }
}

impl fmt::Display for TGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TGrid::List(v) => f.write_str(&join(v)),
            TGrid::Linspace { a, b, n } => write!(f, "linspace:{a},{b},{n}"),
            TGrid::Logspace { a, b, n, with_zero } => {
                write!(f, "logspace:{}{a},{b},{n}", if *with_zero { "0+" } else { "" })
            }
            TGrid::Default => f.write_str("default"),
        }
    }
}

/// Frequency tuples for `ftsigma`: `;`-separated lists of comma-separated
/// coordinates.
pub fn parse_etas(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(parse_list).collect()
}

fn etas_to_string(v: &[Vec<f64>]) -> String {
    v.iter().map(|e| join(e)).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub command: String,
    pub potential: Option<Potential>,
    pub phi: Option<EvenTestFunction>,
    pub d: Option<u32>,
    pub k: Option<u32>,
    pub m: Option<u32>,
    pub t_grid: Option<TGrid>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub strata: Option<u32>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub suite: Option<String>,
    pub eta: Option<Vec<Vec<f64>>>,
    pub period: Option<f64>,
    pub grid: Option<usize>,
    pub cache: Option<PathBuf>,
    pub k_max: Option<u32>,
    pub tol: Option<f64>,
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Usage(format!("{key}: expected an integer, got {v:?}")))
}

impl RunConfig {
    /// Builds a configuration from pairs; later pairs override earlier ones.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Usage(format!("unknown key {k:?}")));
            }
            map.insert(k, v.trim());
        }
        let mut c = RunConfig::default();
        for (k, v) in map {
            match k {
                "command" => c.command = v.to_string(),
                "potential" => c.potential = Some(v.parse()?),
                "phi" => c.phi = Some(v.parse()?),
                "d" => c.d = Some(parse_int(k, v)?),
                "k" => c.k = Some(parse_int(k, v)?),
                "m" => c.m = Some(parse_int(k, v)?),
                "t_grid" => c.t_grid = Some(v.parse()?),
                "seed" => c.seed = Some(parse_int(k, v)?),
                "samples" => c.samples = Some(parse_int(k, v)?),
                "strata" => c.strata = Some(parse_int(k, v)?),
                "output" => c.output = Some(PathBuf::from(v)),
                "format" => c.format = Some(v.parse()?),
                "suite" => c.suite = Some(v.to_string()),
                "eta" => c.eta = Some(parse_etas(v)?),
                "period" => c.period = Some(parse_f64(v)?),
                "grid" => c.grid = Some(parse_int(k, v)?),
                "cache" => c.cache = Some(PathBuf::from(v)),
                "k_max" => c.k_max = Some(parse_int(k, v)?),
                "tol" => c.tol = Some(parse_f64(v)?),
                _ => unreachable!("key list checked above"),
            }
        }
        Ok(c)
    }

    /// Parses `key=value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("config line {}: expected key=value", i + 1)))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    /// Set keys in canonical order, values in canonical form.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        put("command", (!self.command.is_empty()).then(|| self.command.clone()));
        put("potential", self.potential.as_ref().map(ToString::to_string));
        put("phi", self.phi.as_ref().map(ToString::to_string));
        put("d", self.d.map(|x| x.to_string()));
        put("k", self.k.map(|x| x.to_string()));
        put("m", self.m.map(|x| x.to_string()));
        put("t_grid", self.t_grid.as_ref().map(ToString::to_string));
        put("seed", self.seed.map(|x| x.to_string()));
        put("samples", self.samples.map(|x| x.to_string()));
        put("strata", self.strata.map(|x| x.to_string()));
        put("output", self.output.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.map(|f| f.to_string()));
        put("suite", self.suite.clone());
        put("eta", self.eta.as_deref().map(etas_to_string));
        put("period", self.period.map(|x| x.to_string()));
        put("grid", self.grid.map(|x| x.to_string()));
        put("cache", self.cache.as_ref().map(|p| p.display().to_string()));
        put("k_max", self.k_max.map(|x| x.to_string()));
        put("tol", self.tol.map(|x| x.to_string()));
        out
    }

    /// One `key=value` per line, in the order of [`KEYS`].
    pub fn canonical(&self) -> String {
        self.pairs().iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// SHA-256 of the canonical string, without the output destination
    /// (which does not affect values).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let digest = Sha256::digest(c.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn mc(&self) -> Result<McConfig> {
        let samples = self.samples.unwrap_or(DEFAULT_SAMPLES);
        let strata = self.strata.unwrap_or(DEFAULT_STRATA);
        if samples == 0 || strata == 0 || strata as u64 > samples {
            return Err(Error::Usage("need samples >= strata >= 1".into()));
        }
        Ok(McConfig::new(samples, self.seed.unwrap_or(DEFAULT_SEED)).with_strata(strata))
    }

    pub fn require_potential(&self) -> Result<&Potential> {
        self.potential.as_ref().ok_or_else(|| Error::Usage("--potential is required".into()))
    }

    pub fn require_phi(&self) -> Result<&EvenTestFunction> {
        self.phi.as_ref().ok_or_else(|| Error::Usage("--phi is required".into()))
    }

    pub fn require_k(&self) -> Result<u32> {
        self.k.ok_or_else(|| Error::Usage("--k is required".into()))
    }

    pub fn require_d(&self) -> Result<u32> {
        self.d.ok_or_else(|| Error::Usage("--d is required".into()))
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or(TGrid::Default).values()
    }
}
