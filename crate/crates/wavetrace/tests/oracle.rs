use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use wavetrace::oracle::*;
use wavetrace_core::testfn::GaussianWeight;
use wavetrace_core::{EvenTestFunction, Potential};

fn pot(s: &str) -> Potential {
    s.parse().unwrap()
}

fn phi(s: &str) -> EvenTestFunction {
    s.parse().unwrap()
}

#[test]
fn free_collocation_spectrum_is_exact() {
    for (l, n) in [(30.0, 64), (60.0, 256)] {
        let mut ev: Vec<f64> = laplacian_matrix(l, n).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let exact = free_eigenvalues(l, n);
        let top = exact[n - 1];
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12 * top, "{a} vs {b}");
        }
    }
}

#[test]
fn constant_shift_moves_every_eigenvalue() {
    let (l, n, c) = (20.0, 64, 0.7);
    let h = laplacian_matrix(l, n) + DMatrix::identity(n, n) * c;
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip(free_eigenvalues(l, n)) {
        assert!((a - b - c).abs() < 1e-9, "{a} vs {b} + {c}");
    }
}

#[test]
fn zero_potential_gives_zero_traces() {
    let spec = build_spectrum(&pot("gaussian:d=1,sigma=0.5,amp=0"), 30.0, 128).unwrap();
    assert!(heat_trace_rel(&spec, 0.1).unwrap().abs() < 1e-10);
    assert!(wave_trace_rel(&spec, &phi("polycut:T=1,p=4"), 6.0).unwrap().abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn eigenvalues_bounded_below_by_sup_norm(amp in -2.0f64..2.0, sigma in 0.2f64..0.8) {
        let v = pot(&format!("gaussian:d=1,sigma={sigma},amp={amp}"));
        let spec = build_spectrum(&v, 30.0, 64).unwrap();
        prop_assert!(spec.eigenvalues_v[0] >= -v.linf() - 1e-8);
        prop_assert!(spec.eigenvalues_v.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn wave_trace_converges_under_grid_doubling() {
    let v = pot("gaussian:d=1,sigma=0.5,amp=0.8");
    let p = phi("polycut:T=1,p=4");
    let w: Vec<f64> = [128, 256, 512, 1024]
        .iter()
        .map(|&n| wave_trace_rel(&build_spectrum(&v, 30.0, n).unwrap(), &p, v.support_radius()).unwrap())
        .collect();
    // phi-hat decays algebraically, so the gaps shrink by a power of two
    for i in 0..2 {
        let (g0, g1) = ((w[i + 1] - w[i]).abs(), (w[i + 2] - w[i + 1]).abs());
        assert!(g1 < g0 / 4.0, "{w:?}");
    }
    assert!((w[3] - w[2]).abs() < 1e-6 * w[3].abs(), "{w:?}");
}

#[test]
fn wave_trace_does_not_see_the_period() {
    let v = pot("gaussian:d=1,sigma=0.5,amp=0.8");
    let p = phi("polycut:T=1,p=4");
    let a = wave_trace_rel(&build_spectrum(&v, 30.0, 512).unwrap(), &p, v.support_radius()).unwrap();
    let b = wave_trace_rel(&build_spectrum(&v, 60.0, 1024).unwrap(), &p, v.support_radius()).unwrap();
    assert!((a - b).abs() < 1e-8 * a.abs(), "{a} vs {b}");
}

#[test]
fn small_time_heat_trace_follows_the_first_two_invariants() {
    let (amp, sigma) = (0.8, 0.5);
    let v = pot(&format!("gaussian:d=1,sigma={sigma},amp={amp}"));
    let spec = build_spectrum(&v, 20.0, 1024).unwrap();
    let int_v = amp * sigma * (2.0 * PI).sqrt();
    let int_v2 = amp * amp * sigma * PI.sqrt();
    for t in [0.005, 0.01] {
        let pref = 1.0 / (4.0 * PI * t).sqrt();
        let expect = pref * (-t * int_v + t * t / 2.0 * int_v2);
        let got = heat_trace_rel(&spec, t).unwrap();
        assert!((got - expect).abs() < 2e-3 * expect.abs(), "t={t}: {got} vs {expect}");
    }
}

#[test]
fn closed_form_and_quadrature_wave_traces_agree() {
    let v = pot("gaussian:d=1,sigma=0.3,amp=-0.6");
    let spec = build_spectrum(&v, 30.0, 256).unwrap();
    let p = phi("polycut:T=1,p=6");
    let a = wave_trace_rel(&spec, &p, v.support_radius()).unwrap();
    let b = wave_trace_rel_weight(&spec, &p, 200).unwrap();
    assert!((a - b).abs() < 1e-11, "{a} vs {b}");
}

#[test]
fn preconditions_are_enforced() {
    let v = pot("gaussian:d=1,sigma=0.5,amp=0.8");
    assert!(build_spectrum(&v, 30.0, 100).is_err());
    assert!(build_spectrum(&v, 30.0, 2 * MAX_GRID).is_err());
    assert!(build_spectrum(&v, 10.0, 64).is_err());
    assert!(build_spectrum(&pot("gaussian:d=3,sigma=0.5,amp=0.8"), 30.0, 64).is_err());
    let spec = build_spectrum(&v, 30.0, 64).unwrap();
    assert!(heat_trace_rel(&spec, 0.0).is_err());
    assert!(wave_trace_rel(&spec, &phi("polycut:T=4,p=4"), v.support_radius()).is_err());
    let opts = wavetrace_core::trace::AlphaOptions::new(1000, 1);
    let seq = wavetrace_core::Sequential;
    assert!(heat_bridge(&spec, &v, 0.01, &opts, &seq).is_err());
    assert!(heat_bridge(&spec, &pot("gaussian:d=1,sigma=0.4,amp=0.8"), 0.1, &opts, &seq).is_err());
    assert!(GaussianWeight::new(-1.0).is_err());
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let v = pot("gaussian:d=1,sigma=0.5,amp=0.8");
    let a = cached_spectrum(dir.path(), &v, 30.0, 64).unwrap();
    let path = cache_path(dir.path(), &cache_key(&v, 30.0, 64));
    assert!(path.exists());
    let b = cached_spectrum(dir.path(), &v, 30.0, 64).unwrap();
    assert_eq!(a, b);
    assert!(read_spectrum(&path, "other key", "x").unwrap().is_none());
    std::fs::write(&path, b"garbage").unwrap();
    assert!(read_spectrum(&path, &cache_key(&v, 30.0, 64), "x").is_err());
    // a corrupt entry is rebuilt
    assert_eq!(cached_spectrum(dir.path(), &v, 30.0, 64).unwrap(), a);
}
