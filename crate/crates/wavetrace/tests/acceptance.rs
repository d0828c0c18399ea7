//! One line per acceptance criterion, at full sample counts with seed 1.
//!
//! Criteria whose only failing checks are listed in `KNOWN_RED` print FAIL
//! without failing the test; any other failing check does.

use wavetrace::verify::{run_suite, Scale, KNOWN_RED, SUITES};
use wavetrace::Parallel;

fn main() {
    let exec = Parallel::from_env().unwrap();
    let mut unexpected = Vec::new();
    for suite in SUITES {
        let r = run_suite(suite, Scale::Full, 1, &exec).unwrap();
        println!("criterion {}: {} ({}, {:.1}s)", r.criterion, if r.passed { "PASS" } else { "FAIL" }, r.suite, r.seconds);
        for c in &r.checks {
            println!(
                "    [{}] {}: measured {:e}, tolerance {:e}; {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.detail
            );
        }
        for c in r.failures() {
            if KNOWN_RED.contains(&c.name.as_str()) {
                println!("    known red: {}", c.name);
            } else {
                unexpected.push(format!("criterion {} / {}: {}", r.criterion, r.suite, c.name));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:#?}");
        std::process::exit(1);
    }
}
