use proptest::prelude::*;
use wavetrace_core::geometry::FrequencyTuple;
use wavetrace_core::integrate::{McConfig, Sequential, Stream};
use wavetrace_core::multiplier::*;
use wavetrace_core::specfun::{eval_g, GOrder};
use wavetrace_core::Error;

fn tuple1(norms: &[f64]) -> FrequencyTuple {
    FrequencyTuple::new(1, norms.to_vec()).unwrap()
}

#[test]
fn single_factor() {
    let xi = FrequencyTuple::new(3, vec![0.3, -1.2, 0.4]).unwrap();
    let r = (0.09f64 + 1.44 + 0.16).sqrt();
    assert!((m_k_divided(&xi).unwrap() - r.sin() / r).abs() < 1e-15);
    let mc = m_k_simplex(&xi, McConfig::new(10, 1), &Sequential).unwrap();
    assert_eq!(mc.stderr, 0.0);
    assert!((mc.value - r.sin() / r).abs() < 1e-15);
}

#[test]
fn two_factor_closed_form() {
    let xi = tuple1(&[1.0, 2.0]);
    let want = (1f64.sin() - 2f64.sin() / 2.0) / 3.0;
    assert!((m_k_divided(&xi).unwrap() - want).abs() < 1e-15);
    assert!((want - 0.128_940_7).abs() < 1e-7);
    let mc = m_k_simplex(&xi, McConfig::new(200_000, 4), &Sequential).unwrap();
    assert!((mc.value - want).abs() < 3.0 * mc.stderr, "{} ± {}", mc.value, mc.stderr);
    assert!((m_k_simplex_gm(&xi, 4).unwrap() - want).abs() < 1e-10);
}

#[test]
fn zero_frequency_limit() {
    let zero3 = FrequencyTuple::new(2, vec![0.0; 6]).unwrap();
    let mc = m_k_simplex(&zero3, McConfig::new(1000, 2), &Sequential).unwrap();
    let want = eval_g(GOrder::new(2.5).unwrap(), 0.0).unwrap() / 2.0;
    assert!((mc.value - want).abs() < 1e-15);
    assert!(mc.stderr < 1e-15);
    let zero2 = tuple1(&[0.0, 0.0]);
    let mc2 = m_k_simplex(&zero2, McConfig::new(1000, 2), &Sequential).unwrap();
    assert!((mc2.value - 1.0 / 6.0).abs() < 1e-15);
    assert!(matches!(m_k_divided(&zero2), Err(Error::Degenerate(_))));
    assert!(m_k_simplex(&zero2, McConfig { samples: 0, seed: 1, strata: 1 }, &Sequential).is_err());
}

#[test]
fn representations_agree_for_k_up_to_five() {
    let mut rng = Stream::new(21, 0);
    for k in 2..=5usize {
        for d in 1..=3usize {
            let x: Vec<f64> = (0..k * d).map(|_| 1.5 * rng.normal()).collect();
            let xi = FrequencyTuple::new(d, x).unwrap();
            let Ok(exact) = m_k_divided(&xi) else { continue };
            let mc = m_k_simplex(&xi, McConfig::new(100_000, 9 + k as u64), &Sequential).unwrap();
            assert!((exact - mc.value).abs() <= (1e-6f64).max(3.5 * mc.stderr), "k={k} d={d}: {exact} vs {} ± {}", mc.value, mc.stderr);
            if k <= 4 {
                let gm = m_k_simplex_gm(&xi, 6).unwrap();
                assert!((gm - exact).abs() < 1e-8, "k={k}: gm {gm} vs {exact}");
            }
        }
    }
}

#[test]
fn near_degenerate_continuity() {
    let r: f64 = 1.3;
    let g32 = eval_g(GOrder::new(1.5).unwrap(), r * r).unwrap();
    let equal = m_k_simplex(&tuple1(&[r, r]), McConfig::new(1000, 1), &Sequential).unwrap();
    assert!((equal.value - g32).abs() < 1e-14);
    let mut prev = equal.value;
    for eps in [1e-1, 1e-2, 1e-3, 1e-5] {
        let near = m_k_simplex(&tuple1(&[r, r + eps]), McConfig::new(50_000, 3), &Sequential).unwrap();
        assert!((near.value - g32).abs() < 2.0 * eps + 4.0 * near.stderr);
        prev = near.value;
    }
    assert!((prev - g32).abs() < 1e-4);
}

#[test]
fn grundmann_moller_integrates_dirichlet_moments() {
    // ∫_Δ s1² s2 s3³ ds = 2!·1!·3!/8!
    let v = grundmann_moller(3, 3, |s| s[0].powi(2) * s[1] * s[2].powi(3)).unwrap();
    assert!((v - 12.0 / 40320.0).abs() < 1e-16);
    let one = grundmann_moller(5, 2, |_| 1.0).unwrap();
    assert!((one - 1.0 / 24.0).abs() < 1e-15);
}

#[test]
fn hermite_genocchi_examples() {
    let sq = Polynomial::monomial(2).unwrap();
    let (lhs, rhs) = hermite_genocchi_check(&sq, &[1.0, 3.0], McConfig::new(1000, 1), &Sequential).unwrap();
    assert!((lhs + 4.0).abs() < 1e-14);
    assert!((rhs.value + 4.0).abs() < 4.0 * rhs.stderr + 1e-12);
    let c = Polynomial::new(vec![2.5]).unwrap();
    let (lhs, rhs) = hermite_genocchi_check(&c, &[0.1, 0.7, 2.0], McConfig::new(1000, 1), &Sequential).unwrap();
    assert!(lhs.abs() < 1e-13 && rhs.value == 0.0);
    let quint = Polynomial::monomial(5).unwrap();
    let x = [-0.4, 0.9, 1.7, 2.2];
    let (lhs, rhs) = hermite_genocchi_check(&quint, &x, McConfig::new(200_000, 5), &Sequential).unwrap();
    assert!((lhs - rhs.value).abs() < 3.0 * rhs.stderr, "{lhs} vs {} ± {}", rhs.value, rhs.stderr);
    assert!(hermite_genocchi_check(&quint, &[1.0, 1.0], McConfig::new(10, 1), &Sequential).is_err());
}

proptest! {
    #[test]
    fn divided_form_is_permutation_symmetric(norms in prop::collection::vec(0.0f64..6.0, 2..6), seed in 0u64..1000) {
        let xi = tuple1(&norms);
        if let Ok(a) = m_k_divided(&xi) {
            let mut perm = norms.clone();
            let mut rng = Stream::new(seed, 0);
            for i in (1..perm.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                perm.swap(i, j);
            }
            let b = m_k_divided(&tuple1(&perm)).unwrap();
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()) * 1e3);
        }
    }
}
