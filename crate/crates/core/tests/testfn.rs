use proptest::prelude::*;
use wavetrace_core::testfn::{EvenTestFunction, EvenWeight, GaussianWeight};
use wavetrace_core::Error;

fn phi(t: f64, p: u32) -> EvenTestFunction {
    EvenTestFunction::poly_cutoff(t, p).unwrap()
}

#[test]
fn eval_examples() {
    let f = phi(1.0, 2);
    assert_eq!(f.eval(0.0), 1.0);
    assert_eq!(f.eval(1.0), 0.0);
    assert!((f.eval(0.5) - 0.5625).abs() < 1e-15);
    assert_eq!(f.eval(3.0), 0.0);
}

#[test]
fn derivative_examples() {
    let f = phi(1.0, 4);
    assert!(f.derivative(1, 0.0).unwrap().abs() < 1e-15);
    assert!((f.derivative(2, 0.0).unwrap() + 8.0).abs() < 1e-13);
    let inside = f.derivative(3, 1.0 - 1e-12).unwrap();
    let outside = f.derivative(3, 1.0 + 1e-12).unwrap();
    assert!(inside.abs() < 1e-8 && outside == 0.0);
    assert!(matches!(f.derivative(4, 0.3), Err(Error::Smoothness { .. })));
}

#[test]
fn derivatives_match_finite_differences() {
    let f = phi(1.7, 7);
    let h = 1e-4;
    for &t in &[0.0, 0.3, -0.9, 1.2, 1.65] {
        for j in 1..6 {
            let fd = (f.derivative(j - 1, t + h).unwrap() - f.derivative(j - 1, t - h).unwrap()) / (2.0 * h);
            let d = f.derivative(j, t).unwrap();
            assert!((fd - d).abs() < 1e-5 * d.abs().max(1.0), "j={j} t={t}: {d} vs {fd}");
        }
    }
}

#[test]
fn one_sided_derivatives_agree_at_support_boundary() {
    let f = phi(1.0, 5);
    for j in 0..5 {
        let left = f.derivative(j, 1.0 - 1e-9).unwrap();
        assert!(left.abs() < 1e-4, "j={j}: {left}");
        assert_eq!(f.derivative(j, 1.0 + 1e-9).unwrap(), 0.0);
    }
}

#[test]
fn radial_derivative_examples() {
    let f = phi(1.0, 5);
    assert!((f.radial_derivative(1, 0.0).unwrap() + 10.0).abs() < 1e-13);
    let g = phi(1.0, 2);
    // (t⁻¹∂_t)(1−t²)² = −4(1−t²), and (t⁻¹∂_t)² gives 8
    assert!((g.radial_coefficients(1).unwrap()[0] + 4.0).abs() < 1e-14);
    let c2 = {
        let c = g.u_coefficients();
        let c1: Vec<f64> = (1..c.len()).map(|m| 2.0 * m as f64 * c[m]).collect();
        (1..c1.len()).map(|m| 2.0 * m as f64 * c1[m]).collect::<Vec<_>>()
    };
    assert_eq!(c2, vec![8.0]);
    for t in [0.0, 0.4, 0.9] {
        assert!((g.radial_derivative(0, t).unwrap() - g.eval(t)).abs() < 1e-15);
    }
    assert!((g.radial_derivative(2, 0.3).unwrap() - 8.0).abs() < 1e-13);
    assert!(matches!(g.radial_derivative(3, 0.1), Err(Error::Smoothness { .. })));
}

#[test]
fn radial_derivative_is_derivative_over_t() {
    let f = phi(2.0, 9);
    for t in [0.1, 0.7, 1.5, 1.99] {
        let r1 = f.radial_derivative(1, t).unwrap();
        assert!((r1 - f.derivative(1, t).unwrap() / t).abs() < 1e-12);
        let r2 = f.radial_derivative(2, t).unwrap();
        let want = (f.derivative(2, t).unwrap() - f.derivative(1, t).unwrap() / t) / (t * t);
        assert!((r2 - want).abs() < 1e-9 * want.abs().max(1.0), "{r2} vs {want}");
    }
}

#[test]
fn phi_hat_examples() {
    let f = phi(1.0, 2);
    assert!((f.phi_hat(0.0) - 16.0 / 15.0).abs() < 1e-13);
    for tau in [0.5, 3.0, 17.0, 80.0] {
        assert_eq!(f.phi_hat(tau), f.phi_hat(-tau));
        assert!((f.phi_hat(tau) - f.phi_hat_sq(tau * tau)).abs() < 1e-12);
        assert!((f.phi_hat_kernel().eval_sq(tau * tau) - f.phi_hat_sq(tau * tau)).abs() < 1e-14);
    }
}

#[test]
fn phi_hat_decays_like_power_p_plus_one() {
    for p in [2u32, 3, 4] {
        let f = phi(1.0, p);
        // envelope sampled at the maxima of the leading oscillation
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 0..30 {
            let tau = 100.0 * (1.08f64).powi(i);
            let env = (0..16)
                .map(|k| f.phi_hat(tau + k as f64 * std::f64::consts::PI / 16.0).abs())
                .fold(0.0, f64::max);
            xs.push(tau.ln());
            ys.push(env.ln());
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!((slope + (p as f64 + 1.0)).abs() < 0.1, "p={p}: slope {slope}");
    }
}

#[test]
fn radial_derivative_fourier_identity() {
    let f = phi(1.3, 8);
    let rule = wavetrace_core::integrate::GaussLegendre::new(96);
    let ft_r = |s: f64| 2.0 * rule.integrate(0.0, 1.3, |t| f.radial_derivative(1, t).unwrap() * (s * t).cos());
    let h = 1e-4;
    for sigma in [0.5, 1.0, 2.0] {
        let lhs = (ft_r(sigma + h) - ft_r(sigma - h)) / (2.0 * h) / sigma;
        assert!((lhs - f.phi_hat(sigma)).abs() < 1e-6, "sigma={sigma}");
    }
}

#[test]
fn psi_transform_is_imaginary() {
    let f = phi(1.0, 4);
    let rule = wavetrace_core::integrate::GaussLegendre::new(128);
    for tau in [0.3, 2.0, 11.0] {
        let re = rule.integrate(-1.0, 1.0, |t| t * f.eval(t) * (tau * t).cos());
        let im = -rule.integrate(-1.0, 1.0, |t| t * f.eval(t) * (tau * t).sin());
        assert!(re.abs() < 1e-14);
        assert!((im - f.psi_hat_imag(tau)).abs() < 1e-12);
    }
}

#[test]
fn radial_moments_are_exact() {
    let f = phi(1.0, 2);
    assert!((f.radial_moment(0, 0).unwrap() - 8.0 / 15.0).abs() < 1e-15);
    assert!((f.radial_moment(0, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn gaussian_weight_radial_derivative() {
    let g = GaussianWeight::new(0.1).unwrap();
    let h = 1e-5;
    let s = 0.4;
    let fd = (g.value(s + h) - g.value(s - h)) / (2.0 * h) / s;
    assert!((fd - g.radial_derivative(1, s).unwrap()).abs() < 1e-6);
    assert!(g.truncation_bound() <= 1e-14 * 1.0001);
}

proptest! {
    #[test]
    fn even_and_supported(t in -5.0f64..5.0, big_t in 0.2f64..3.0, p in 2u32..12) {
        let f = phi(big_t, p);
        prop_assert_eq!(f.eval(t), f.eval(-t));
        if t.abs() >= big_t {
            prop_assert_eq!(f.eval(t), 0.0);
        }
        prop_assert!((f.phi_hat(t) - f.phi_hat(-t)).abs() == 0.0);
    }
}
