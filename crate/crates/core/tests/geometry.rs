use proptest::prelude::*;
use wavetrace_core::geometry::*;
use wavetrace_core::integrate::Stream;

fn naive_q(s: &[f64], xi: &FrequencyTuple) -> f64 {
    let d = xi.d();
    let mut mean = vec![0.0; d];
    let mut ns = 0.0;
    for (j, sj) in s.iter().enumerate() {
        ns += sj * xi.norm_sq(j);
        for c in 0..d {
            mean[c] += sj * xi.vector(j)[c];
        }
    }
    ns - mean.iter().map(|x| x * x).sum::<f64>()
}

fn simplex_strategy(k: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(0.01f64..10.0, k).prop_map(|w| {
        let t: f64 = w.iter().sum();
        let mut s: Vec<f64> = w.iter().map(|x| x / t).collect();
        let rest: f64 = s[1..].iter().sum();
        s[0] = 1.0 - rest;
        SimplexPoint::new(s).unwrap()
    })
}

fn tuple_strategy(k: usize, d: usize) -> impl Strategy<Value = FrequencyTuple> {
    prop::collection::vec(-5.0f64..5.0, k * d).prop_map(move |x| FrequencyTuple::new(d, x).unwrap())
}

#[test]
fn simplex_sampling() {
    let mut rng = Stream::new(5, 0);
    assert_eq!(sample_simplex(1, &mut rng).as_slice(), &[1.0]);
    for k in [2usize, 3] {
        let n = 100_000;
        let (mut m, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            let s = sample_simplex(k, &mut rng);
            let total: f64 = s.as_slice().iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
            m += s.as_slice()[0];
            m2 += s.as_slice()[0] * s.as_slice()[0];
        }
        let mean = m / n as f64;
        let sd = (m2 / n as f64 - mean * mean).sqrt() / (n as f64).sqrt();
        assert!((mean - 1.0 / k as f64).abs() < 3.0 * sd, "k={k}: {mean}");
    }
    assert!((simplex_volume(4) - 1.0 / 6.0).abs() < 1e-16);
}

#[test]
fn norm_examples() {
    let s = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
    let xi = FrequencyTuple::from_vectors(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
    assert!((xi_norm_s(&s, &xi).unwrap() - 1.0).abs() < 1e-15);
    let v = SimplexPoint::vertex(3, 0);
    let xi3 = FrequencyTuple::new(1, vec![2.0, 5.0, -1.0]).unwrap();
    assert_eq!(xi_norm_s(&v, &xi3).unwrap(), 4.0);
    let same = FrequencyTuple::new(2, vec![0.3, 0.4, 0.3, 0.4, 0.3, 0.4]).unwrap();
    let s3 = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
    assert!((xi_norm_s(&s3, &same).unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(q_form(&s3, &same).unwrap(), 0.0);
    assert!(xi_norm_s(&s, &xi3).is_err());
}

#[test]
fn q_examples() {
    let s = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
    let xi = FrequencyTuple::from_vectors(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]]).unwrap();
    assert!((q_form(&s, &xi).unwrap() - 0.25).abs() < 1e-16);
    assert!((q_coeff(&s, 1, 2).unwrap() - 0.25).abs() < 1e-16);
    assert!(q_coeff(&s, 2, 2).is_err());
    assert!(q_coeff(&s, 0, 1).is_err());
    assert!(q_coeff(&s, 1, 3).is_err());
    for m in 0..4 {
        let v = SimplexPoint::vertex(4, m);
        for i in 1..=4 {
            for j in i + 1..=4 {
                assert_eq!(q_coeff(&v, i, j).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn q_coefficients_bounded_on_random_samples() {
    let mut rng = Stream::new(99, 1);
    for _ in 0..10_000 {
        let k = 2 + (rng.next_u64() % 6) as usize;
        let s = sample_simplex(k, &mut rng);
        for i in 1..=k {
            for j in i + 1..=k {
                assert!(q_coeff(&s, i, j).unwrap().abs() <= 1.0);
            }
        }
    }
}

proptest! {
    #[test]
    fn q_matches_definition((s, xi) in (2usize..7, 1usize..4).prop_flat_map(|(k, d)| (simplex_strategy(k), tuple_strategy(k, d)))) {
        let q = q_form(&s, &xi).unwrap();
        let naive = naive_q(s.as_slice(), &xi);
        prop_assert!(q >= 0.0);
        prop_assert!((q - naive).abs() < 1e-12 * (1.0 + naive.abs()) * 10.0);
    }

    #[test]
    fn q_translation_invariant((s, xi, v) in (2usize..7, 1usize..4).prop_flat_map(|(k, d)| (simplex_strategy(k), tuple_strategy(k, d), prop::collection::vec(-3.0f64..3.0, d)))) {
        let a = q_form(&s, &xi).unwrap();
        let b = q_form(&s, &xi.translated(&v).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a));
    }

    #[test]
    fn q_rebuilt_from_increments((s, eta) in (2usize..7, 1usize..4).prop_flat_map(|(k, d)| (simplex_strategy(k), prop::collection::vec(-4.0f64..4.0, (k - 1) * d), Just(d))).prop_map(|(s, e, d)| (s, FrequencyTuple::from_eta_prime(d, &e).unwrap()))) {
        let theta = eta.cyclic_increments();
        let q = q_form(&s, &eta).unwrap();
        let rebuilt = q_from_increments(&s, &theta).unwrap();
        prop_assert!((q - rebuilt).abs() < 1e-11 * (1.0 + q), "{} vs {}", q, rebuilt);
        let path: f64 = (0..theta.k()).map(|j| theta.norm_sq(j).sqrt()).sum();
        prop_assert!(q.sqrt() <= path + 1e-12);
        let fast = q_form_eta_prime(s.as_slice(), &eta.as_flat()[eta.d()..], eta.d());
        prop_assert!((fast - q).abs() < 1e-12 * (1.0 + q));
    }

    #[test]
    fn q_vanishes_only_for_equal_vectors((s, xi) in (2usize..6, 1usize..4).prop_flat_map(|(k, d)| (simplex_strategy(k), tuple_strategy(k, d)))) {
        let q = q_form(&s, &xi).unwrap();
        let all_equal = (1..xi.k()).all(|j| xi.vector(j) == xi.vector(0));
        prop_assert_eq!(q <= 1e-10, all_equal || {
            // tiny weights can push Q under the threshold only when the
            // spread itself is tiny
            let spread: f64 = (1..xi.k()).map(|j| xi.vector(j).iter().zip(xi.vector(0)).map(|(a, b)| (a - b).abs()).sum::<f64>()).sum();
            spread < 1e-4
        });
    }
}
