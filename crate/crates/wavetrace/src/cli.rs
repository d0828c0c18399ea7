//! `wavetrace` subcommands. Flags and `--config` files feed the same
//! `key=value` validation; flags win over the file.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use wavetrace_core::integrate::{Executor, McEstimate, McVecEstimate};
use wavetrace_core::spatial::{
    ak_d1_grid, ftsigma_check, sigma_mass, trace_spatial_d1, trace_spatial_d3,
};
use wavetrace_core::trace::{
    a2_curve, ak_fourier_grid, ak_small_k_grid, alpha, c2j, mu_and_total, nu_d, taylor_probe, AkForm, AlphaOptions,
    TraceCurve, K_BUDGET,
};
use wavetrace_core::Potential;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::exec::Parallel;
use crate::oracle::{build_spectrum, cached_spectrum, heat_bridge, heat_trace_rel, wave_trace_rel};
use crate::output::{emit, Record, Row};
use crate::verify::{run_suite, Scale, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wavetrace", version, about = "Relative wave traces of Schrödinger operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// e.g. `gaussian:d=3,sigma=1,amp=1`, `ball:d=1,r=1,amp=1`
    #[arg(long)]
    pub potential: Option<String>,
    /// e.g. `polycut:T=1,p=4`
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    /// t grid: `0,0.5,1`, `linspace:0,1,11`, `logspace:0+-3,0.5,32` or `default`
    #[arg(long = "t", allow_hyphen_values = true)]
    pub t_grid: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub strata: Option<String>,
    #[arg(long)]
    pub output: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// File of `key=value` lines
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Largest series order for alpha, trace and heat-bridge
    #[arg(long = "k-max")]
    pub k_max: Option<String>,
    /// Tail tolerance for alpha, trace and heat-bridge
    #[arg(long)]
    pub tol: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites; exit 2 if any check fails
    Verify {
        #[command(flatten)]
        common: Common,
        /// One of the suite names or `all`
        #[arg(long, default_value = "all")]
        suite: String,
        /// Use the full acceptance sample counts
        #[arg(long)]
        full: bool,
    },
    /// ν_d(φ) in both forms
    Nu(CommonOnly),
    /// a_{2,V}(t) on a grid
    A2(CommonOnly),
    /// c_{2,j}(V) for j < m
    C2j(CommonOnly),
    /// a_{k,V}(t) on a grid (Monte Carlo)
    Ak(CommonOnly),
    /// α_V(t) on a grid
    Alpha(CommonOnly),
    /// μ_{d,V}(φ) and the assembled relative trace
    Trace(CommonOnly),
    /// Spatial-side trace ∫t^{2k−d}φ a_k (d = 1 or 3)
    Spatial(CommonOnly),
    /// Total mass of dσ_k
    SigmaMass(CommonOnly),
    /// Both sides of the Fourier relation for dσ_k
    Ftsigma {
        #[command(flatten)]
        common: Common,
        /// `;`-separated frequency tuples η'
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
    },
    /// Periodic eigenvalue oracle in d = 1
    Oracle(OracleArgs),
    /// Heat trace from eigenvalues against the Gaussian-smeared wave trace
    HeatBridge(OracleArgs),
    /// Taylor structure of a_{2,V} at t = 0
    ProbeSobolev(CommonOnly),
}

#[derive(Args, Debug)]
pub struct CommonOnly {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub period: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
    /// Directory for cached spectra
    #[arg(long)]
    pub cache: Option<String>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::Nu(_) => "nu",
            Command::A2(_) => "a2",
            Command::C2j(_) => "c2j",
            Command::Ak(_) => "ak",
            Command::Alpha(_) => "alpha",
            Command::Trace(_) => "trace",
            Command::Spatial(_) => "spatial",
            Command::SigmaMass(_) => "sigma-mass",
            Command::Ftsigma { .. } => "ftsigma",
            Command::Oracle(_) => "oracle",
            Command::HeatBridge(_) => "heat-bridge",
            Command::ProbeSobolev(_) => "probe-sobolev",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Verify { common, .. } | Command::Ftsigma { common, .. } => common,
            Command::Oracle(a) | Command::HeatBridge(a) => &a.common,
            Command::Nu(c)
            | Command::A2(c)
            | Command::C2j(c)
            | Command::Ak(c)
            | Command::Alpha(c)
            | Command::Trace(c)
            | Command::Spatial(c)
            | Command::SigmaMass(c)
            | Command::ProbeSobolev(c) => &c.common,
        }
    }

    /// Flag values as `key=value` pairs.
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let c = self.common();
        let mut out = vec![("command", self.name().to_string())];
        let mut put = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        put("potential", &c.potential);
        put("phi", &c.phi);
        put("d", &c.d);
        put("k", &c.k);
        put("m", &c.m);
        put("t_grid", &c.t_grid);
        put("seed", &c.seed);
        put("samples", &c.samples);
        put("strata", &c.strata);
        put("output", &c.output);
        put("format", &c.format);
        put("k_max", &c.k_max);
        put("tol", &c.tol);
        match self {
            Command::Verify { suite, .. } => out.push(("suite", suite.clone())),
            Command::Ftsigma { eta, .. } => {
                if let Some(e) = eta {
                    out.push(("eta", e.clone()));
                }
            }
            Command::Oracle(a) | Command::HeatBridge(a) => {
                for (k, v) in [("period", &a.period), ("grid", &a.grid), ("cache", &a.cache)] {
                    if let Some(v) = v {
                        out.push((k, v.clone()));
                    }
                }
            }
            _ => {}
        }
        out
    }
}

/// Merges the config file (if any) under the flags.
pub fn resolve(cmd: &Command) -> Result<RunConfig> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    if let Some(path) = &cmd.common().config {
        let text = fs::read_to_string(path)?;
        pairs.extend(RunConfig::parse_file(&text)?);
    }
    pairs.extend(cmd.pairs().into_iter().map(|(k, v)| (k.to_string(), v)));
    let cfg = RunConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
    if cfg.command != cmd.name() {
        return Err(Error::Usage(format!("config file is for {:?}, not {:?}", cfg.command, cmd.name())));
    }
    Ok(cfg)
}

/// Runs `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "wavetrace {}: {e}", cli.command.name());
            EXIT_USAGE
        }
    }
}

fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = resolve(cmd)?;
    let exec = Parallel::from_env()?;
    let (result, rows, code) = match cmd {
        Command::Verify { full, .. } => verify(&cfg, *full, &exec, err)?,
        Command::Nu(_) => nu(&cfg)?,
        Command::A2(_) => curve_result(&a2_curve(cfg.require_potential()?, &cfg.t_values())?),
        Command::C2j(_) => c2j_cmd(&cfg)?,
        Command::Ak(_) => ak(&cfg, &exec)?,
        Command::Alpha(_) => {
            let c = alpha(cfg.require_potential()?, &cfg.t_values(), &alpha_opts(&cfg)?, &exec)?;
            curve_result(&c)
        }
        Command::Trace(_) => trace(&cfg, &exec)?,
        Command::Spatial(_) => spatial(&cfg, &exec)?,
        Command::SigmaMass(_) => {
            let m = sigma_mass(cfg.require_k()?, cfg.require_d()?, cfg.mc()?, &exec)?;
            (estimate(&m), vec![Row::scalar(m.value, m.stderr)], EXIT_OK)
        }
        Command::Ftsigma { .. } => ftsigma(&cfg, &exec)?,
        Command::Oracle(_) => oracle(&cfg)?,
        Command::HeatBridge(_) => heat(&cfg, &exec)?,
        Command::ProbeSobolev(_) => probe(&cfg)?,
    };
    let record = Record::new(&cfg, result)?;
    emit(&cfg, &record, &rows, out, err)?;
    Ok(code)
}

type Outcome = (Value, Vec<Row>, i32);

fn estimate(e: &McEstimate) -> Value {
    json!({ "value": e.value, "stderr": e.stderr, "n": e.n, "nonfinite": e.nonfinite })
}

fn curve_result(c: &TraceCurve) -> Outcome {
    let rows = c
        .t_grid
        .iter()
        .zip(c.values.iter().zip(&c.stderr))
        .map(|(t, (v, s))| Row { t: Some(*t), value: *v, stderr: *s, tail_bound: c.tail_bound })
        .collect();
    let value = json!({
        "t": c.t_grid, "values": c.values, "stderr": c.stderr, "tail_bound": c.tail_bound,
        "k_max": c.k_max, "partial": c.partial, "potential": c.provenance.potential,
    });
    (value, rows, EXIT_OK)
}

fn vec_result(t: &[f64], e: &McVecEstimate) -> Outcome {
    let rows = t
        .iter()
        .zip(e.values.iter().zip(&e.stderr))
        .map(|(t, (v, s))| Row { t: Some(*t), value: *v, stderr: *s, tail_bound: 0.0 })
        .collect();
    (json!({ "t": t, "values": e.values, "stderr": e.stderr, "n": e.n }), rows, EXIT_OK)
}

fn alpha_opts(cfg: &RunConfig) -> Result<AlphaOptions> {
    let mc = cfg.mc()?;
    let mut o = AlphaOptions::new(mc.samples, mc.seed);
    o.mc = mc;
    o.k_max = cfg.k_max.unwrap_or(K_BUDGET);
    if let Some(t) = cfg.tol {
        o.tol = t;
    }
    Ok(o)
}

fn verify(cfg: &RunConfig, full: bool, exec: &dyn Executor, err: &mut dyn Write) -> Result<Outcome> {
    let suite = cfg.suite.as_deref().unwrap_or("all");
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let scale = if full { Scale::Full } else { Scale::Quick };
    let seed = cfg.mc()?.seed;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for name in names {
        let r = run_suite(name, scale, seed, exec)?;
        for c in r.failures() {
            writeln!(err, "FAIL [{}] {}: measured {:e}, tolerance {:e} ({})", r.suite, c.name, c.measured, c.tolerance, c.detail)?;
        }
        ok &= r.passed;
        rows.extend(r.checks.iter().map(|c| Row::scalar(c.measured, 0.0)));
        reports.push(r);
    }
    let value = json!({ "passed": ok, "scale": if full { "full" } else { "quick" }, "suites": reports });
    Ok((value, rows, if ok { EXIT_OK } else { EXIT_VERIFY }))
}

fn nu(cfg: &RunConfig) -> Result<Outcome> {
    let (a, b) = nu_d(cfg.require_phi()?, cfg.require_d()?)?;
    Ok((json!({ "moment_form": a, "derivative_form": b }), vec![Row::scalar(a, 0.0)], EXIT_OK))
}

fn c2j_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let v = cfg.require_potential()?;
    let m = cfg.m.unwrap_or(4);
    let mut values = Vec::new();
    for j in 0..m {
        values.push(c2j(v, j)?);
    }
    let rows = values.iter().map(|c| Row::scalar(*c, 0.0)).collect();
    Ok((json!({ "j": (0..m).collect::<Vec<_>>(), "c2j": values }), rows, EXIT_OK))
}

fn ak(cfg: &RunConfig, exec: &dyn Executor) -> Result<Outcome> {
    let v = cfg.require_potential()?;
    let k = cfg.require_k()?;
    let t = cfg.t_values();
    let mc = cfg.mc()?;
    let est = if AkForm::for_kd(k, v.d()) != AkForm::Fourier {
        ak_small_k_grid(v, k, &t, mc, exec)?
    } else if v.d() == 1 && !v.lhat1()?.is_finite() {
        ak_d1_grid(v, k, &t, mc, exec)?
    } else {
        ak_fourier_grid(v, k, &t, mc, exec)?
    };
    Ok(vec_result(&t, &est))
}

fn trace(cfg: &RunConfig, exec: &dyn Executor) -> Result<Outcome> {
    let r = mu_and_total(cfg.require_phi()?, cfg.require_potential()?, &alpha_opts(cfg)?, exec)?;
    let terms: Vec<Value> = r.terms.iter().map(|t| json!({ "k": t.k, "value": t.value, "stderr": t.stderr })).collect();
    let value = json!({
        "nu_term": r.nu_term, "mu": r.mu, "mu_stderr": r.mu_stderr,
        "total": r.total, "total_stderr": r.total_stderr,
        "total_unhalved": r.total_unhalved,
        "total_series_convention": r.total_series_convention,
        "signs": r.signs(), "terms": terms, "k_max": r.k_max,
        "tail_bound": r.tail_bound, "partial": r.partial,
    });
    Ok((value, vec![Row { t: None, value: r.total, stderr: r.total_stderr, tail_bound: r.tail_bound }], EXIT_OK))
}

fn spatial(cfg: &RunConfig, exec: &dyn Executor) -> Result<Outcome> {
    let v = cfg.require_potential()?;
    let phi = cfg.require_phi()?;
    let k = cfg.require_k()?;
    let e = match v.d() {
        1 => trace_spatial_d1(phi, v, k, cfg.mc()?, exec)?,
        3 => trace_spatial_d3(phi, v, k, cfg.mc()?, exec)?,
        d => return Err(Error::Usage(format!("the spatial trace is available for d = 1 and d = 3, not d = {d}"))),
    };
    Ok((estimate(&e), vec![Row::scalar(e.value, e.stderr)], EXIT_OK))
}

fn ftsigma(cfg: &RunConfig, exec: &dyn Executor) -> Result<Outcome> {
    let k = cfg.require_k()?;
    let d = cfg.require_d()?;
    let etas = cfg.eta.clone().ok_or_else(|| Error::Usage("--eta is required".into()))?;
    let pairs = ftsigma_check(k, d, &etas, cfg.mc()?, exec)?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for (eta, (l, r)) in etas.iter().zip(&pairs) {
        rows.push(Row::scalar(l.value, l.stderr));
        rows.push(Row::scalar(r.value, r.stderr));
        list.push(json!({ "eta": eta, "measure_side": estimate(l), "fourier_side": estimate(r) }));
    }
    Ok((json!({ "pairs": list }), rows, EXIT_OK))
}

const DEFAULT_PERIOD: f64 = 60.0;
const DEFAULT_GRID: usize = 1024;

fn spectrum(cfg: &RunConfig, v: &Potential) -> Result<crate::oracle::TorusSpectrum> {
    let period = cfg.period.unwrap_or(DEFAULT_PERIOD);
    let grid = cfg.grid.unwrap_or(DEFAULT_GRID);
    match &cfg.cache {
        Some(dir) => cached_spectrum(dir, v, period, grid),
        None => build_spectrum(v, period, grid),
    }
}

fn oracle(cfg: &RunConfig) -> Result<Outcome> {
    let v = cfg.require_potential()?;
    let spec = spectrum(cfg, v)?;
    let mut value = json!({
        "period": spec.period, "grid": spec.grid,
        "lowest_eigenvalue": spec.eigenvalues_v[0],
    });
    let mut rows = Vec::new();
    if let Some(phi) = &cfg.phi {
        let w = wave_trace_rel(&spec, phi, v.support_radius())?;
        value["wave_trace_rel"] = json!(w);
        rows.push(Row::scalar(w, 0.0));
    }
    if let Some(grid) = &cfg.t_grid {
        let t = grid.values();
        let mut heat = Vec::new();
        for &s in &t {
            let h = heat_trace_rel(&spec, s)?;
            heat.push(h);
            rows.push(Row { t: Some(s), value: h, stderr: 0.0, tail_bound: 0.0 });
        }
        value["t"] = json!(t);
        value["heat_trace_rel"] = json!(heat);
    }
    if rows.is_empty() {
        return Err(Error::Usage("oracle needs --phi (wave trace) or --t (heat trace)".into()));
    }
    Ok((value, rows, EXIT_OK))
}

fn heat(cfg: &RunConfig, exec: &dyn Executor) -> Result<Outcome> {
    let v = cfg.require_potential()?;
    let spec = spectrum(cfg, v)?;
    let t = cfg.t_grid.clone().ok_or_else(|| Error::Usage("--t is required".into()))?.values();
    let opts = alpha_opts(cfg)?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for &s in &t {
        let hb = heat_bridge(&spec, v, s, &opts, exec)?;
        rows.push(Row { t: Some(s), value: hb.right, stderr: hb.right_stderr, tail_bound: hb.record.tail_bound });
        list.push(json!({
            "t": s, "eigenvalue_side": hb.left, "wave_side": hb.right, "wave_side_stderr": hb.right_stderr,
            "relative_gap": hb.relative_gap(), "gaussian_truncation": hb.truncation, "k_max": hb.record.k_max,
        }));
    }
    Ok((json!({ "bridge": list }), rows, EXIT_OK))
}

fn probe(cfg: &RunConfig) -> Result<Outcome> {
    let v = cfg.require_potential()?;
    let m = cfg.m.ok_or_else(|| Error::Usage("--m is required".into()))?;
    let grid: Vec<f64> = match &cfg.t_grid {
        Some(g) => g.values(),
        None => (0..25).map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / 24.0)).collect(),
    };
    let p = taylor_probe(&a2_curve(v, &grid)?, m)?;
    let rows = p.coeffs.iter().map(|b| Row::scalar(*b, 0.0)).collect();
    let value = json!({
        "m": m, "coeffs": p.coeffs, "remainder_exponent": p.remainder_exponent,
        "verdict": p.verdict, "points_used": p.points_used,
    });
    Ok((value, rows, EXIT_OK))
}
