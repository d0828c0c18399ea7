//! Output records. JSON carries `schema: 1` and the full provenance; CSV is
//! `t,value,stderr,tail_bound` rows, with the provenance written alongside.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::Result;

pub const SCHEMA: u32 = 1;
pub const CSV_HEADER: &str = "t,value,stderr,tail_bound";

/// One CSV row. `t` is empty for results that are not functions of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub t: Option<f64>,
    pub value: f64,
    pub stderr: f64,
    pub tail_bound: f64,
}

impl Row {
    pub fn scalar(value: f64, stderr: f64) -> Self {
        Self { t: None, value, stderr, tail_bound: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub samples: u64,
    pub strata: u32,
    pub library_version: &'static str,
    pub config_hash: String,
    pub config: String,
}

impl Provenance {
    pub fn of(cfg: &RunConfig) -> Result<Self> {
        let mc = cfg.mc()?;
        Ok(Self {
            seed: mc.seed,
            samples: mc.samples,
            strata: mc.strata,
            library_version: wavetrace_core::VERSION,
            config_hash: cfg.hash(),
            config: cfg.canonical(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub schema: u32,
    pub command: String,
    pub provenance: Provenance,
    pub result: Value,
}

impl Record {
    pub fn new(cfg: &RunConfig, result: Value) -> Result<Self> {
        Ok(Self { schema: SCHEMA, command: cfg.command.clone(), provenance: Provenance::of(cfg)?, result })
    }
}

pub fn csv(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let t = r.t.map(|t| t.to_string()).unwrap_or_default();
        s.push_str(&format!("{t},{},{},{}\n", r.value, r.stderr, r.tail_bound));
    }
    s
}

/// Where the provenance of a CSV file goes.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes to `cfg.output`, or to `out` (with CSV provenance on `err`).
pub fn emit(cfg: &RunConfig, record: &Record, rows: &[Row], out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let json = serde_json::to_string_pretty(record)?;
    match (cfg.format.unwrap_or_default(), &cfg.output) {
        (Format::Json, Some(path)) => fs::write(path, json + "\n")?,
        (Format::Json, None) => writeln!(out, "{json}")?,
        (Format::Csv, Some(path)) => {
            fs::write(path, csv(rows))?;
            fs::write(sidecar(path), json + "\n")?;
        }
        (Format::Csv, None) => {
            write!(out, "{}", csv(rows))?;
            writeln!(err, "{}", serde_json::to_string(&record.provenance)?)?;
        }
    }
    Ok(())
}
