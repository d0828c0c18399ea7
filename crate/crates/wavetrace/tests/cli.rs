use std::process::Command;

use serde_json::Value;
use wavetrace::cli::{run, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wavetrace").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn a2_at_zero_in_three_dimensions() {
    let r = json(&["a2", "--potential", "gaussian:d=3,sigma=1,amp=1", "--t", "0"]);
    let v = r["result"]["values"][0].as_f64().unwrap();
    assert!((v - std::f64::consts::PI.sqrt() / 4.0).abs() < 1e-12, "{v}");
    assert_eq!(r["schema"], 1);
    assert_eq!(r["provenance"]["seed"], 1);
    assert_eq!(r["provenance"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn sigma_mass_in_one_dimension() {
    let r = json(&["sigma-mass", "--d", "1", "--k", "2"]);
    assert!((r["result"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-14);
}

#[test]
fn verify_suite_passes() {
    let (code, _, err) = call(&["verify", "--suite", "specfun", "--seed", "7"]);
    assert_eq!(code, EXIT_OK, "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["a2"]).0, EXIT_USAGE);
    assert_eq!(call(&["a2", "--potential", "gaussian:d=3"]).0, EXIT_USAGE);
    assert_eq!(call(&["verify", "--suite", "nope"]).0, EXIT_USAGE);
    let (code, _, err) = call(&["spatial", "--potential", "gaussian:d=2,sigma=1,amp=1", "--phi", "polycut:T=1,p=4", "--k", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("d = 2"), "{err}");
    assert_eq!(call(&["--help"]).0, EXIT_OK);
    assert_eq!(call(&["--version"]).0, EXIT_OK);
}

#[test]
fn csv_output_with_sidecar_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "command=a2\npotential=gaussian:d=3,sigma=1,amp=1\nt_grid=0,1\nseed=5\n").unwrap();
    let out = dir.path().join("a2.csv");
    let (code, _, err) =
        call(&["a2", "--config", conf.to_str().unwrap(), "--seed", "6", "--format", "csv", "--output", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("t,value,stderr,tail_bound\n0,"));
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a2.csv.json")).unwrap()).unwrap();
    assert_eq!(side["provenance"]["seed"], 6);
}

#[test]
fn config_file_for_another_command_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "command=nu\n").unwrap();
    assert_eq!(call(&["a2", "--config", conf.to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["ak", "--potential", "gaussian:d=3,sigma=0.5,amp=1", "--k", "3", "--t", "0,0.5", "--samples", "4000"];
    let run_with = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_wavetrace")).args(args).env("WAVETRACE_THREADS", threads).output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let r: Value = serde_json::from_slice(&o.stdout).unwrap();
        r["result"].clone()
    };
    assert_eq!(run_with("1"), run_with("3"));
    let bad = Command::new(env!("CARGO_BIN_EXE_wavetrace")).args(args).env("WAVETRACE_THREADS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}

#[test]
fn oracle_and_bridge_commands() {
    let r = json(&[
        "oracle", "--potential", "gaussian:d=1,sigma=0.5,amp=0.8", "--phi", "polycut:T=1,p=4",
        "--t", "0.1", "--period", "30", "--grid", "256",
    ]);
    assert!(r["result"]["wave_trace_rel"].as_f64().unwrap() < 0.0);
    let r = json(&[
        "heat-bridge", "--potential", "gaussian:d=1,sigma=0.5,amp=0.8", "--t", "0.1",
        "--period", "60", "--grid", "512", "--samples", "20000",
    ]);
    let gap = r["result"]["bridge"][0]["relative_gap"].as_f64().unwrap();
    assert!(gap < 1e-4, "{gap}");
}
