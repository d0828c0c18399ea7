use proptest::prelude::*;
use wavetrace_core::integrate::quad::{adaptive_quad, oscillatory_tail};
use wavetrace_core::specfun::*;

// G_ν(w) to 20 digits from mpmath (√π (2z)^{-ν} J_ν(z), or I_ν for w < 0).
const REFERENCE: &[(f64, f64, f64)] = &[
    (-0.5, -50.0, 1177.4054591751745277),
    (-0.5, -1.0, 3.086161269630487557),
    (-0.5, 0.3, 1.7074254004494673916),
    (-0.5, 10.0, -1.9995721457586518152),
    (-0.5, 15.9, -1.3261340135347355893),
    (-0.5, 16.1, -1.2882953277519511503),
    (-0.5, 50.0, 1.410695812616884623),
    (-0.5, 200.0, -0.0099373242651875472307),
    (-0.5, 400.0, 0.81616412362678397212),
    (-0.5, 1000.0, 1.9573653931197845566),
    (-0.5, 5000.0, -0.049681714848439074058),
    (-0.5, 10000.0, 1.7246377445753678682),
    (-0.75, -50.0, 2229.2669520968741997),
    (-0.75, -1.0, 2.908963716776682188),
    (-0.75, 0.3, 0.98022140820837080346),
    (-0.75, 10.0, -2.860824171100192993),
    (-0.75, 15.9, -0.97856422780654146408),
    (-0.75, 16.1, -0.89957390852784411307),
    (-0.75, 50.0, 1.398551146124948805),
    (-0.75, 200.0, -1.8336707912241656888),
    (-0.75, 400.0, 0.09985239981489871535),
    (-0.75, 1000.0, 4.6410057757764147384),
    (-0.75, 5000.0, -2.81079624394308626),
    (-0.75, 10000.0, 7.4510962865821018158),
    (-0.25, -50.0, 615.94391552464381942),
    (-0.25, -1.0, 2.7775789635659973196),
    (-0.25, 0.3, 1.8453218418546704272),
    (-0.25, 10.0, -1.1565819930149701714),
    (-0.25, 15.9, -1.0786985953683473108),
    (-0.25, 16.1, -1.0642826394720122365),
    (-0.25, 50.0, 0.95610906962869656612),
    (-0.25, 200.0, 0.33312076967991212388),
    (-0.25, 400.0, 0.58015960765867861805),
    (-0.25, 1000.0, 0.696569460327736986),
    (-0.25, 5000.0, 0.20927934842530264222),
    (-0.25, 10000.0, 0.32024119495698114236),
    (0.0, -50.0, 319.15006553200773944),
    (0.0, -1.0, 2.2440433405216194636),
    (0.0, 0.3, 1.64199165144418707),
    (0.0, 10.0, -0.5495400801921020156),
    (0.0, 15.9, -0.70534227366317622854),
    (0.0, 16.1, -0.70241630127995185335),
    (0.0, 50.0, 0.53112497656902359715),
    (0.0, 200.0, 0.26685318510329801378),
    (0.0, 400.0, 0.29604350950666783436),
    (0.0, 1000.0, 0.21000105987597241589),
    (0.0, 5000.0, 0.11614364871470616932),
    (0.0, 10000.0, 0.03542399733534145237),
    (0.25, -50.0, 163.78843726582696584),
    (0.25, -1.0, 1.6750451226370118746),
    (0.25, 0.3, 1.3011427424372837505),
    (0.25, 10.0, -0.18753875860929506846),
    (0.25, 15.9, -0.39407844080803681281),
    (0.25, 16.1, -0.39577918129856307247),
    (0.25, 50.0, 0.25201127921244801766),
    (0.25, 200.0, 0.15072336569889993329),
    (0.25, 400.0, 0.12566294536356387518),
    (0.25, 1000.0, 0.050099748511175068981),
    (0.25, 5000.0, 0.044604919892221681244),
    (0.25, 10000.0, -0.0052179684146102827334),
    (0.5, -50.0, 83.255018326089616307),
    (0.5, -1.0, 1.1752011936438014569),
    (0.5, 0.3, 0.95074466511781170857),
    (0.5, 10.0, -0.0065407069689386402128),
    (0.5, 15.9, -0.18772758004746049434),
    (0.5, 16.1, -0.1906304980265060803),
    (0.5, 50.0, 0.10024812527586706814),
    (0.5, 200.0, 0.07070980527467927233),
    (0.5, 400.0, 0.045647262536381382719),
    (0.5, 1000.0, 0.0064946269680604301001),
    (0.5, 5000.0, 0.014137771619335414891),
    (0.5, 10000.0, -0.0050636564110975879366),
    (1.0, -50.0, 20.904504961702030763),
    (1.0, -1.0, 0.50085921512289554209),
    (1.0, 0.3, 0.42670312398186108033),
    (1.0, 10.0, 0.077466802795256686139),
    (1.0, 15.9, -0.013616439668134535942),
    (1.0, 16.1, -0.015633356263803110928),
    (1.0, 50.0, 0.0020776106361373061254),
    (1.0, 200.0, 0.009701325977926237709),
    (1.0, 400.0, 0.0029614657078382988851),
    (1.0, 1000.0, -0.0021350909762914440885),
    (1.0, 5000.0, 0.000865892839467614728),
    (1.0, 10000.0, -0.00068368288128437350759),
    (1.5, -50.0, 5.0544771126149764754),
    (1.5, -1.0, 0.1839397205857211608),
    (1.5, 0.3, 0.16171994148846335464),
    (1.5, 10.0, 0.049662268295519363368),
    (1.5, 15.9, 0.01494778071446249372),
    (1.5, 16.1, 0.014084384032592220337),
    (1.5, 50.0, -0.0060509978103257524338),
    (1.5, 200.0, 0.00018919616851818261486),
    (1.5, 400.0, -0.00045304349909626325418),
    (1.5, 1000.0, -0.00048609403479591592409),
    (1.5, 5000.0, 0.000003897862904355495192),
    (1.5, 10000.0, -0.000043369126434939076102),
    (2.0, -50.0, 1.1776602284259980819),
    (2.0, -1.0, 0.060151620007509323806),
    (2.0, 0.3, 0.054017370402714376073),
    (2.0, 10.0, 0.021485182284328219004),
    (2.0, 15.9, 0.010233907468406259195),
    (2.0, 16.1, 0.0099360695065953324478),
    (2.0, 50.0, -0.0026140726701223718633),
    (2.0, 200.0, -0.00028505985148949132868),
    (2.0, 400.0, -0.00017762352917207164926),
    (2.0, 1000.0, -0.000054635355945284548062),
    (2.0, 5000.0, -0.0000056340038678417855203),
    (2.0, 10000.0, -0.00000095396822151197366),
    (3.5, -50.0, 0.012040346650474943013),
    (3.5, -1.0, 0.0012581363155087326396),
    (3.5, 0.3, 0.0011707696830056717767),
    (3.5, 10.0, 0.00066165777224985854343),
    (3.5, 15.9, 0.000450798967085592927),
    (3.5, 16.1, 0.00044470065066009582807),
    (3.5, 50.0, -0.0000038835389828266335162),
    (3.5, 200.0, -0.0000013235987772660122786),
    (3.5, 400.0, 0.000000094224360642356087597),
    (3.5, 1000.0, 0.00000011564151421345652749),
    (3.5, 5000.0, -0.0000000005477527562655068076),
    (3.5, 10000.0, 0.0000000011142496712015266118),
    (5.0, -50.0, 0.000091613842210009026478),
    (5.0, -1.0, 0.000015036122379840608533),
    (5.0, 0.3, 0.000014244925933733306926),
    (5.0, 10.0, 0.0000093829839202193414562),
    (5.0, 15.9, 0.0000071779533152910597122),
    (5.0, 16.1, 0.000007111573274114096929),
    (5.0, 50.0, 0.0000010686192600460650263),
    (5.0, 200.0, 0.000000021354889475174858119),
    (5.0, 400.0, 0.0000000026166155996180600851),
    (5.0, 1000.0, -0.000000000046396127714100930329),
    (5.0, 5000.0, 0.0000000000024809091738496955749),
    (5.0, 10000.0, -0.00000000000041096412407351700419),
    (7.5, -50.0, 0.000000015227285161084702644),
    (7.5, -1.0, 0.000000003969031931699845686),
    (7.5, 0.3, 0.0000000038202970544761410019),
    (7.5, 10.0, 0.0000000028585268420339422118),
    (7.5, 15.9, 0.0000000023851371696048389105),
    (7.5, 16.1, 0.0000000023703881260895672719),
    (7.5, 50.0, 0.00000000076813951166055372508),
    (7.5, 200.0, -0.0000000000047504930164350621617),
    (7.5, 400.0, -0.0000000000002656793696082459271),
    (7.5, 1000.0, 0.0000000000000036231905336177282937),
    (7.5, 5000.0, -0.0000000000000000051245767663996682666),
    (7.5, 10000.0, 0.00000000000000000075786170655455908634),
];

fn g(nu: f64, w: f64) -> f64 {
    eval_g(GOrder::new(nu).unwrap(), w).unwrap()
}

#[test]
fn matches_reference_table() {
    for &(nu, w, want) in REFERENCE {
        let got = g(nu, w);
        let mut tol = 1e-12 * want.abs().max(1.0);
        if nu < -0.5 && (2.0 * nu).fract() != 0.0 {
            tol *= (w / 1000.0).max(1.0);
        }
        assert!((got - want).abs() <= tol, "G_{nu}({w}) = {got}, want {want}");
        let fast = GKernel::new(GOrder::new(nu).unwrap()).eval(w);
        assert!((fast - want).abs() <= tol, "kernel G_{nu}({w}) = {fast}, want {want}");
    }
}

#[test]
fn special_cases() {
    assert!((g(0.5, 0.0) - 1.0).abs() < 1e-15);
    let pi = std::f64::consts::PI;
    assert!((g(-0.5, pi * pi) + 2.0).abs() < 1e-13);
    assert!((g(0.0, 0.0) - 1.772_453_850_9).abs() < 1e-10);
    for nu in [-0.7, -0.5, 0.0, 0.3, 1.0, 2.5, 6.0] {
        let want = 4f64.powf(-nu) * SQRT_PI / gamma(nu + 1.0);
        assert!((g(nu, 0.0) - want).abs() < 1e-14 * want.abs().max(1.0));
    }
    for z in [0.1, 1.0, 3.7, 12.0, 40.0] {
        assert!((g(-0.5, z * z) - 2.0 * z.cos()).abs() < 1e-12);
        assert!((g(0.5, z * z) - z.sin() / z).abs() < 1e-13);
        assert!((g(0.0, z * z) - SQRT_PI * bessel_j0(z)).abs() < 1e-13);
    }
}

#[test]
fn rejects_order_at_or_below_minus_one() {
    assert!(GOrder::new(-1.0).is_err());
    assert!(GOrder::new(-3.0).is_err());
    assert!(GOrder::new(f64::NAN).is_err());
}

#[test]
fn derivative_relation() {
    let h = 1e-4;
    for nu in [-0.5, 0.0, 0.5, 1.0, 1.5] {
        let mut w = -10.0;
        while w <= 100.0 {
            let fd = (g(nu, w + h) - g(nu, w - h)) / (2.0 * h);
            let want = -g(nu + 1.0, w);
            assert!((fd - want).abs() < 1e-8, "nu={nu} w={w}: {fd} vs {want}");
            w += 0.37;
        }
    }
}

#[test]
fn integral_relation() {
    for nu in [0.0, 0.5, 1.0] {
        for z in [0.0, 1.0, 10.0] {
            let f = |r: f64| g(nu + 0.5, r * r + z);
            let head = adaptive_quad(f, 0.0, 20.0, 1e-12).unwrap().value;
            let tail = oscillatory_tail(f, 20.0, std::f64::consts::PI, 1e-11, 4000).unwrap().value;
            let want = 0.5 * SQRT_PI * g(nu, z);
            assert!((head + tail - want).abs() < 1e-8, "nu={nu} z={z}: {} vs {want}", head + tail);
        }
    }
}

#[test]
fn x_derivative_examples() {
    let half = GOrder::new(0.5).unwrap();
    assert!((eval_g_x_derivative(half, 0.0, 0).unwrap() - 1.0).abs() < 1e-13);
    assert!(eval_g_x_derivative(half, 0.0, 1).unwrap().abs() < 1e-14);
    let zero = GOrder::new(0.0).unwrap();
    let d2 = eval_g_x_derivative(zero, 0.0, 2).unwrap();
    let h = 1e-3;
    let fd = (g(0.0, h * h) + g(0.0, h * h) - 2.0 * g(0.0, 0.0)) / (h * h);
    assert!((d2 - fd).abs() < 1e-6);
    assert!((d2 + gamma(1.5) / gamma(2.0)).abs() < 1e-13);
    assert!(eval_g_x_derivative(zero, 1.0, 13).is_err());
}

#[test]
fn x_derivative_matches_finite_differences() {
    let h = 1e-2;
    for nu in [-0.75, -0.5, 0.0, 0.25, 1.0, 2.5] {
        let o = GOrder::new(nu).unwrap();
        for x in [0.7, 3.0, 9.5, 30.0] {
            let f = |y: f64| g(nu, y * y);
            let d0 = eval_g_x_derivative(o, x, 0).unwrap();
            assert!((d0 - f(x)).abs() < 1e-12, "nu={nu} x={x}");
            let d1 = eval_g_x_derivative(o, x, 1).unwrap();
            let fd1 = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
            assert!((d1 - fd1).abs() < 1e-7, "nu={nu} x={x}: {d1} vs {fd1}");
            let d2 = eval_g_x_derivative(o, x, 2).unwrap();
            let fd2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
                / (12.0 * h * h);
            assert!((d2 - fd2).abs() < 1e-6, "nu={nu} x={x}: {d2} vs {fd2}");
        }
    }
}

#[test]
fn derivative_bound_with_equality_at_zero() {
    for nu in [0.0, 0.25, 0.5, 1.0, 1.5] {
        let o = GOrder::new(nu).unwrap();
        for j in 0..=4u32 {
            let bound = g_derivative_bound(o, j);
            let mut x = 0.0;
            while x <= 200.0 {
                let v = eval_g_x_derivative(o, x, j).unwrap();
                assert!(v.abs() <= bound + 1e-10, "nu={nu} j={j} x={x}: {v} > {bound}");
                x += 0.25;
            }
            if j % 2 == 0 {
                let at0 = eval_g_x_derivative(o, 0.0, j).unwrap();
                assert!((at0.abs() - bound).abs() < 1e-10, "nu={nu} j={j}: {at0} vs {bound}");
            }
        }
    }
}

#[test]
fn closed_form_at_zero() {
    assert!((g_at_zero_closed(2, 3).unwrap() - SQRT_PI).abs() < 1e-15);
    assert!((g_at_zero_closed(2, 4).unwrap() - 2.0).abs() < 1e-15);
    assert!((g_at_zero_closed(3, 3).unwrap() - SQRT_PI / 4.0).abs() < 1e-15);
    assert!(g_at_zero_closed(1, 3).is_err());
    for k in 1..=8u32 {
        for d in 1..=8u32 {
            if 2 * k < d {
                continue;
            }
            let nu = k as f64 - (d as f64 + 1.0) / 2.0;
            let want = g(nu, 0.0);
            let got = g_at_zero_closed(k, d).unwrap();
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "k={k} d={d}");
        }
    }
}

#[test]
fn general_order_large_argument_matches_reference() {
    // mpmath, 30 digits
    let cases = [
        (0.3, 1653.3929883179744, -0.007_884_741_771_644_069_3),
        (-0.7, 900.0, 2.066_600_780_905_715_7),
        (2.25, 4000.0, -2.478_370_733_700_025e-6),
        (-0.4862208897346026, 1653.3929883179744, -1.844_643_350_255_395_6),
    ];
    for (nu, w, want) in cases {
        let got = g(nu, w);
        assert!((got - want).abs() < 1e-13 * want.abs().max(1e-3), "nu={nu} w={w}: {got}");
    }
}

proptest! {
    #[test]
    fn bessel_recurrence_between_orders(nu in -0.9f64..6.0, w in -30.0f64..3000.0) {
        // G_ν = 4(ν+1) G_{ν+1} − 4w G_{ν+2}
        let lhs = g(nu, w);
        let rhs = 4.0 * (nu + 1.0) * g(nu + 1.0, w) - 4.0 * w * g(nu + 2.0, w);
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn kernel_agrees_with_checked_evaluation(twice in -1i32..20, w in -20.0f64..5000.0) {
        let o = GOrder::from_twice(twice).unwrap();
        let a = eval_g(o, w).unwrap();
        let b = GKernel::new(o).eval(w);
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
    }
}
