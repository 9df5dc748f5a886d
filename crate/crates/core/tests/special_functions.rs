use core::f64::consts::PI;

use proptest::prelude::*;
use sineseries_core::special::{
    euler_gamma, fresnel_limit, gamma, gamma_real, incomplete_fresnel, zeta, zeta_real, FRESNEL_CROSSOVER,
};
use sineseries_core::{Complex64, Error, PoleKind};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// Reference values from a 30-digit evaluation with mpmath.
const GAMMA_REF: [((f64, f64), (f64, f64)); 6] = [
    ((0.3, 4.0), (0.001_164_643_684_811_490_6, 0.003_352_559_888_035_202_4)),
    ((-2.5, 1.5), (0.003_412_139_564_239_149, -0.024_053_490_434_664_736)),
    ((10.0, -30.0), (-8.542_931_506_169_932e-7, 6.586_002_584_109_2e-7)),
    ((-7.3, 0.4), (3.676_646_084_142_584e-5, 1.857_626_381_618_752_7e-4)),
    ((40.0, 20.0), (7.460_747_568_884_714e43, -1.382_574_724_230_929_4e44)),
    ((0.5, 49.0), (-8.871_985_984_445_314e-34, -3.022_781_858_704_570_3e-34)),
];

const ZETA_REF: [((f64, f64), (f64, f64)); 8] = [
    ((0.5, 14.0), (0.022_241_142_609_993_59, -0.103_258_123_266_450_06)),
    ((0.5, 99.5), (1.592_291_668_004_043, 1.297_200_158_331_653_5)),
    ((2.0, 50.0), (0.773_950_933_156_690_8, 0.125_944_715_826_334_2)),
    ((-1.5, 3.0), (0.201_328_830_542_150_33, 0.097_149_743_015_620_04)),
    ((0.2, -70.0), (-0.442_499_293_289_502_1, -1.674_012_434_508_153)),
    ((1.5, 0.0), (2.612_375_348_685_488_3, 0.0)),
    ((0.0, 5.0), (0.633_078_584_036_749_8, 0.290_659_899_716_949_4)),
    ((0.0, 12.7), (0.528_427_636_502_378_7, -1.093_430_011_798_842_4)),
];

#[test]
fn gamma_classical_values() {
    assert!((gamma_real(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
    assert!((gamma_real(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((gamma_real(5.0).unwrap() - 24.0).abs() < 24.0 * 1e-14);
    assert!((gamma_real(1.0 / 3.0).unwrap() - 2.678_938_534_707_747_6).abs() < 1e-14);
}

#[test]
fn gamma_matches_reference() {
    for ((zr, zi), (vr, vi)) in GAMMA_REF {
        let got = gamma(c(zr, zi)).unwrap();
        let err = rel(got, c(vr, vi));
        assert!(err < 1e-13, "gamma({zr}+{zi}i): rel err {err:e}");
    }
}

#[test]
fn gamma_poles_report_the_integer() {
    assert_eq!(gamma(c(0.0, 0.0)), Err(Error::Pole(PoleKind::Gamma(0))));
    assert_eq!(gamma(c(-3.0, 0.0)), Err(Error::Pole(PoleKind::Gamma(-3))));
    assert!(gamma(c(-3.0, 1e-9)).is_ok());
}

#[test]
fn gamma_integer_factorials() {
    let mut f = 1.0;
    for n in 1..=30u32 {
        let g = gamma_real(n as f64).unwrap();
        assert!((g - f).abs() <= 1e-13 * f, "Gamma({n})");
        f *= n as f64;
    }
}

#[test]
fn zeta_classical_values() {
    let pi2 = PI * PI;
    let cases = [
        (2.0, pi2 / 6.0),
        (4.0, pi2 * pi2 / 90.0),
        (6.0, pi2 * pi2 * pi2 / 945.0),
        (0.0, -0.5),
        (-1.0, -1.0 / 12.0),
        (3.0, 1.202_056_903_159_594_3),
    ];
    for (s, v) in cases {
        let z = zeta_real(s).unwrap();
        assert!((z - v).abs() < 1e-12 * v.abs(), "zeta({s}) = {z}, expected {v}");
    }
    assert_eq!(zeta_real(-2.0).unwrap(), 0.0);
}

#[test]
fn zeta_matches_reference() {
    for ((sr, si), (vr, vi)) in ZETA_REF {
        let got = zeta(c(sr, si)).unwrap();
        let err = rel(got, c(vr, vi));
        assert!(err < 1e-12, "zeta({sr}+{si}i): rel err {err:e}");
    }
}

#[test]
fn zeta_pole() {
    assert_eq!(zeta(c(1.0, 0.0)), Err(Error::Pole(PoleKind::Zeta)));
    // zeta(1 + h) = 1/h + gamma + O(h); h is a power of two so 1 + h is exact
    let h = 2f64.powi(-27);
    let near = zeta_real(1.0 + h).unwrap();
    assert!((near - (1.0 / h + euler_gamma())).abs() < 1e-6);
}

#[test]
fn euler_constant() {
    let g = euler_gamma();
    assert_eq!(g, 0.577_215_664_901_532_9);
    assert!(((-g).exp() - 0.561_459_483_566_885_2).abs() < 1e-15);
    assert!((g / 2.0 + (2.0 * PI).ln() - 2.126_484_898_860_112).abs() < 1e-14);
}

/// Euler-Maclaurin evaluation of zeta, independent of the library's method.
fn zeta_em(s: Complex64) -> Complex64 {
    const B: [f64; 10] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
        43867.0 / 798.0,
        -174611.0 / 330.0,
    ];
    let n = 10 + s.im.abs() as usize;
    let nf = n as f64;
    let mut sum = c(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let n_s = (-s * nf.ln()).exp();
    sum += n_s * nf / (s - 1.0) + n_s * 0.5;
    let mut fact = 1.0;
    let mut poch = s;
    let mut npow = n_s / nf;
    for (k, b) in B.iter().enumerate() {
        let m = 2 * k + 2;
        fact *= ((m - 1) * m) as f64;
        sum += poch * npow * (*b / fact);
        poch = poch * (s + m as f64 - 1.0) * (s + m as f64);
        npow /= nf * nf;
    }
    sum
}

#[test]
fn bernoulli_table_of_the_oracle_is_consistent() {
    // B_2k / (2k)! = (-1)^(k+1) 2 zeta(2k) / (2 pi)^(2k)
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut fact = 1.0;
    for (k, bk) in b.iter().enumerate() {
        let m = 2 * k + 2;
        fact *= ((m - 1) * m) as f64;
        let z = zeta_real(m as f64).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let expect = sign * 2.0 * z / (2.0 * PI).powi(m as i32);
        assert!((bk / fact - expect).abs() < 1e-14 * expect.abs());
    }
}

#[test]
fn fresnel_boundary_values() {
    let v = incomplete_fresnel(2.0, 0.0).unwrap();
    assert_eq!(v.value, 0.0);
    let inf = incomplete_fresnel(2.0, f64::INFINITY).unwrap();
    assert!((inf.value - (PI / 2.0).sqrt()).abs() < 1e-14, "{}", inf.value);
    assert!(incomplete_fresnel(2.0, -1.0).is_err());
    assert!(incomplete_fresnel(1.0, 1.0).is_err());
}

#[test]
fn fresnel_matches_reference() {
    let cases = [
        (2.0, 10.0, 1.267_340_779_468_536_8),
        (2.0, 0.5, 0.701_254_977_026_339_9),
        (2.0, 1.0, 0.967_577_490_992_647_6),
        (1.5, 50.0, 2.319_091_068_173_458_4),
        (7f64.sqrt(), 200.0, 0.805_874_353_899_071_1),
    ];
    for (p, x, v) in cases {
        let f = incomplete_fresnel(p, x).unwrap();
        assert!((f.value - v).abs() < 1e-13, "F({p}, {x}) = {} vs {v}", f.value);
        assert!(f.error_bound >= 0.0 && f.error_bound < 1e-12);
    }
}

/// Composite midpoint rule with 10^7 panels on [1, 10] plus the series on [0, 1].
#[test]
fn fresnel_against_brute_force_midpoint() {
    let p = 2.0;
    let q = 1.0 / p;
    let head: f64 = (0..20)
        .map(|k| {
            let m = (2 * k + 1) as f64;
            let fact: f64 = (1..=(2 * k + 1)).map(|j| j as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / (fact * (m - q))
        })
        .sum();
    let n = 10_000_000usize;
    let h = 9.0 / n as f64;
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..n {
        let x = 1.0 + (i as f64 + 0.5) * h;
        let y = x.powf(-1.0 - q) * x.sin() * h - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    let brute = q * (head + acc);
    let f = incomplete_fresnel(p, 10.0).unwrap();
    assert!((f.value - brute).abs() < 1e-9, "{} vs {brute}", f.value);
}

#[test]
fn fresnel_closure_at_large_argument() {
    let f = incomplete_fresnel(2.0, 1e4).unwrap();
    assert!((f.value - (PI / 2.0).sqrt()).abs() < 1e-4);
}

#[test]
fn fresnel_continuous_across_crossover() {
    for p in [1.5, 2.0, 3.0] {
        let below = incomplete_fresnel(p, FRESNEL_CROSSOVER * (1.0 - 1e-12)).unwrap();
        let above = incomplete_fresnel(p, FRESNEL_CROSSOVER * (1.0 + 1e-12)).unwrap();
        assert!((below.value - above.value).abs() < 1e-12 + below.error_bound + above.error_bound);
    }
}

/// The tail of the integral by rotating the contour: for X > 0,
/// int_X^inf xi^(-a) e^(i xi) d xi = i e^(iX) int_0^inf (X + i y)^(-a) e^(-y) dy.
fn fresnel_rotated(p: f64, x: f64) -> f64 {
    let a = 1.0 + 1.0 / p;
    let n = 200_000usize;
    let ymax = 50.0;
    let h = ymax / n as f64;
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        let y = (i as f64 + 0.5) * h;
        acc += (c(x, y).ln() * (-a)).exp() * (-y).exp() * h;
    }
    let j = c(0.0, 1.0) * c(x.cos(), x.sin()) * acc;
    fresnel_limit(p).unwrap() - j.im / p
}

#[test]
fn fresnel_against_rotated_contour() {
    for (p, x) in [(2.0, 3.0), (1.5, 40.0), (2.5, 250.0), (2.0, 400.0), (1.2, 1000.0)] {
        let f = incomplete_fresnel(p, x).unwrap();
        let r = fresnel_rotated(p, x);
        assert!((f.value - r).abs() < 1e-9, "p={p} X={x}: {} vs {r}", f.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_reflection(re in -20.0f64..20.0, im in -10.0f64..10.0) {
        let z = c(re, im);
        prop_assume!((re - re.round()).abs() > 1e-3 || im.abs() > 1e-3);
        let lhs = gamma(z).unwrap() * gamma(c(1.0, 0.0) - z).unwrap() * sineseries_core::special::sinpi_c(z) / PI;
        prop_assert!((lhs - c(1.0, 0.0)).norm() < 1e-12, "lhs = {}", lhs);
    }

    #[test]
    fn gamma_recurrence(re in 0.1f64..30.0, im in -20.0f64..20.0) {
        let z = c(re, im);
        let a = gamma(z + 1.0).unwrap();
        let b = gamma(z).unwrap() * z;
        prop_assert!(rel(a, b) < 1e-13);
    }

    #[test]
    fn zeta_left_strip_matches_euler_maclaurin(re in -2.0f64..0.0, im in -30.0f64..30.0) {
        let s = c(re, im);
        let a = zeta(s).unwrap();
        let b = zeta_em(s);
        prop_assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn zeta_right_half_matches_euler_maclaurin(re in 0.05f64..4.0, im in -60.0f64..60.0) {
        prop_assume!((re - 1.0).abs() > 1e-3 || im.abs() > 1e-3);
        let s = c(re, im);
        let a = zeta(s).unwrap();
        let b = zeta_em(s);
        prop_assert!((a - b).norm() < 1e-11 * b.norm().max(1e-3), "{} vs {}", a, b);
    }

    #[test]
    fn zeta_functional_equation_in_critical_strip(re in 0.05f64..0.95, im in -40.0f64..40.0) {
        // both sides are evaluated with the eta series here
        let s = c(re, im);
        let one = c(1.0, 0.0);
        let chi = (s * 2f64.ln() + (s - 1.0) * PI.ln()).exp()
            * sineseries_core::special::sinpi_c(s * 0.5)
            * gamma(one - s).unwrap();
        let lhs = zeta(s).unwrap();
        let rhs = chi * zeta(one - s).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-11 * lhs.norm().max(1e-3));
    }

    #[test]
    fn fresnel_tail_bound(p in 1.1f64..6.0, x in 1.0f64..5000.0) {
        let f = incomplete_fresnel(p, x).unwrap();
        let alpha = fresnel_limit(p).unwrap();
        prop_assert!((f.value - alpha).abs() <= 2.0 / p * x.powf(-1.0 / p) + f.error_bound);
    }

    #[test]
    fn fresnel_limit_identity(p in 1.05f64..20.0) {
        let alpha = fresnel_limit(p).unwrap();
        let direct = gamma_real(1.0 - 1.0 / p).unwrap() * (PI / (2.0 * p)).sin();
        prop_assert!((p * alpha - p * direct).abs() < 1e-13 * p * alpha);
        let far = incomplete_fresnel(p, f64::INFINITY).unwrap();
        prop_assert!((far.value - alpha).abs() < 1e-14);
    }
}
