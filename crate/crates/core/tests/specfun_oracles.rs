use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use risfso::quad::{integrate, QuadOptions};
use risfso::specfun::{
    gamma, ln_gamma, ln_gamma_signed, meijer_g, meijer_g_contour, meijer_g_series,
    meijer_g_series_estimate, sin_pi,
    MeijerGSpec,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Reference values computed with mpmath at 40 digits.
const LN_GAMMA_REF: &[(f64, f64)] = &[
    (0.001, 6.907_178_885_383_853_682_5),
    (0.1, 2.252_712_651_734_205_959_9),
    (0.5, 0.572_364_942_924_700_087_07),
    (0.75, 0.203_280_951_431_295_371_48),
    (1.0001, -0.000_057_713_342_220_471_268_005_18),
    (1.25, -0.098_271_836_421_813_161_464),
    (1.461_632_144_968_362_3, -0.121_486_290_535_849_608_1),
    (1.5, -0.120_782_237_635_245_222_35),
    (1.9999, -0.000_042_275_208_772_153_458_011_34),
    (2.3, 0.154_189_454_959_630_581_09),
    (3.7, 1.428_072_326_665_387_921_9),
    (7.5, 7.534_364_236_758_732_955_2),
    (10.0, 12.801_827_480_081_469_611),
    (15.2, 25.727_462_988_765_577_002),
    (33.3, 82.603_723_581_654_952_928),
    (100.5, 361.435_540_467_777_621_56),
    (999.9, 5904.529_702_692_284_005_7),
];

#[test]
fn ln_gamma_matches_high_precision_reference() {
    for &(x, want) in LN_GAMMA_REF {
        let got = ln_gamma(x).unwrap();
        assert!(rel(got, want) <= 1e-13, "x={x}: {got} vs {want}, rel {}", rel(got, want));
    }
}

#[test]
fn ln_gamma_trivial_points() {
    assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
    assert!((ln_gamma(1.5).unwrap() - (std::f64::consts::PI.sqrt() / 2.0).ln()).abs() < 1e-15);
    assert!((ln_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-13);
    assert!(ln_gamma(2.0).unwrap().abs() < 1e-16);
}

#[test]
fn ln_gamma_negative_arguments_track_sign() {
    let cases = [
        (-0.5, 1.265_512_123_484_645_396_5, -1.0),
        (-2.5, -0.056_243_716_497_674_050_673, -1.0),
        (-7.3, -7.779_101_629_826_852_441_8, 1.0),
    ];
    for (x, want, sign) in cases {
        let (v, s) = ln_gamma_signed(x).unwrap();
        assert!(rel(v, want) < 1e-13, "x={x}: {v} vs {want}");
        assert_eq!(s, sign);
    }
}

#[test]
fn ln_gamma_poles_are_errors() {
    for x in [0.0, -1.0, -5.0, -100.0] {
        assert!(ln_gamma(x).is_err(), "x = {x}");
    }
}

#[test]
fn gamma_reflection_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 50 {
        let x: f64 = rng.random_range(-12.0..12.0);
        if (x - x.round()).abs() < 1e-3 {
            continue;
        }
        let lhs = gamma(x).unwrap() * gamma(1.0 - x).unwrap();
        let rhs = std::f64::consts::PI / sin_pi(x);
        assert!(rel(lhs, rhs) <= 1e-11, "x={x}: {lhs} vs {rhs}");
        checked += 1;
    }
}

#[test]
fn meijer_exponential_identity() {
    for z in [0.1, 1.0, 5.0] {
        let spec = MeijerGSpec::new(1, 0, vec![], vec![0.0], z).unwrap();
        let got = meijer_g(&spec).unwrap();
        assert!(rel(got, (-z).exp()) <= 1e-12, "z={z}: {got}");
    }
    let spec = MeijerGSpec::new(1, 0, vec![], vec![0.0], 2.0).unwrap();
    assert!(rel(meijer_g_contour(&spec).unwrap(), (-2.0f64).exp()) <= 1e-10);
}

/// K_ν(x) = ∫_0^∞ exp(−x cosh t) cosh(νt) dt
fn bessel_k_by_quadrature(nu: f64, x: f64) -> f64 {
    integrate(
        |t| (-x * t.cosh()).exp() * (nu * t).cosh(),
        0.0,
        10.0,
        QuadOptions {
            epsabs: 1e-16,
            epsrel: 1e-13,
            max_intervals: 500,
        },
    )
    .value
}

#[test]
fn meijer_bessel_k_identity() {
    // G^{2,0}_{0,2}(z | b1, b2) = 2 z^{(b1+b2)/2} K_{b1−b2}(2√z); b1 − b2 = 1 collides.
    for z in [0.3, 1.0, 4.0] {
        let spec = MeijerGSpec::new(2, 0, vec![], vec![0.5, -0.5], z).unwrap();
        let want = 2.0 * bessel_k_by_quadrature(1.0, 2.0 * z.sqrt());
        let got = meijer_g(&spec).unwrap();
        assert!(rel(got, want) < 1e-8, "z={z}: {got} vs {want}");
    }
    // non-colliding order: K_{0.3}
    let spec = MeijerGSpec::new(2, 0, vec![], vec![0.4, 0.1], 1.7).unwrap();
    let want = 2.0 * 1.7f64.powf(0.25) * bessel_k_by_quadrature(0.3, 2.0 * 1.7f64.sqrt());
    assert!(rel(meijer_g_series(&spec).unwrap(), want) < 1e-12);
    assert!(rel(meijer_g_contour(&spec).unwrap(), want) < 1e-9);
}

fn pdf_spec(alpha: f64, beta: f64, zeta2: f64, z: f64) -> MeijerGSpec {
    MeijerGSpec::new(3, 0, vec![zeta2 + 1.0], vec![zeta2, alpha, beta], z).unwrap()
}

fn cdf_spec(alpha: f64, beta: f64, zeta2: f64, r: usize, z: f64) -> MeijerGSpec {
    let rf = r as f64;
    let mut a = vec![1.0];
    a.extend((1..=r).map(|i| (zeta2 + i as f64) / rf));
    let mut b: Vec<f64> = Vec::new();
    for base in [zeta2, alpha, beta] {
        b.extend((1..=r).map(|i| (base + i as f64 - 1.0) / rf));
    }
    b.push(0.0);
    MeijerGSpec::new(3 * r, 1, a, b, z).unwrap()
}

#[test]
fn series_and_contour_agree_on_fso_density_kernel() {
    let spec = pdf_spec(2.5, 1.8, 1.2, 0.7);
    let s = meijer_g_series(&spec).unwrap();
    let c = meijer_g_contour(&spec).unwrap();
    assert!(rel(s, c) <= 1e-8, "{s} vs {c}");
}

#[test]
fn collision_perturbation_agrees_with_contour() {
    for spec in [pdf_spec(2.0, 2.0, 1.5, 0.5), cdf_spec(2.0, 2.0, 1.5, 1, 0.5), cdf_spec(3.0, 3.0, 1.1, 2, 0.5)] {
        assert!(meijer_g_series(&spec).is_err());
        let g = meijer_g(&spec).unwrap();
        let c = meijer_g_contour(&spec).unwrap();
        assert!(g.is_finite());
        assert!(rel(g, c) <= 1e-6, "{g} vs {c}");
    }
}

#[test]
fn small_argument_limit() {
    let spec = cdf_spec(2.5, 1.8, 1.2, 1, 1e-12);
    let v = meijer_g(&spec).unwrap();
    assert!(v.abs() < 1e-12, "{v}");
    let spec = pdf_spec(2.5, 1.8, 1.2, 1e-200);
    assert!(meijer_g(&spec).unwrap().abs() < 1e-200);
}

#[test]
fn large_argument_falls_back_to_contour() {
    let spec = pdf_spec(4.2, 1.4, 1.1, 5000.0);
    assert!(meijer_g_series(&spec).is_err());
    let v = meijer_g(&spec).unwrap();
    assert!(v > 0.0 && v < 1e-50, "{v}");
}

#[test]
fn randomized_cross_oracle_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..100 {
        let alpha = rng.random_range(1.0..6.0);
        let beta = rng.random_range(1.0..6.0);
        let zeta2 = rng.random_range(0.5..12.0);
        let r = if rng.random_bool(0.5) { 1 } else { 2 };
        let z = 10f64.powf(rng.random_range(-4.0..1.0));
        let spec = if i % 2 == 0 {
            pdf_spec(alpha, beta, zeta2, z)
        } else {
            cdf_spec(alpha, beta, zeta2, r, z)
        };
        let c = meijer_g_contour(&spec).unwrap();
        // raw series value, including draws whose cancellation estimate makes
        // the dispatcher prefer the contour
        let (s, est) = meijer_g_series_estimate(&spec).unwrap();
        assert!(rel(s, c) <= 1e-8, "{spec:?}: {s} vs {c}");
        assert!((s - c).abs() <= est + 1e-10 * c.abs(), "{spec:?}: estimate {est} too small");
        let g = meijer_g(&spec).unwrap();
        assert!(rel(g, c) <= 1e-8, "{spec:?}: {g} vs {c}");
    }
}

#[test]
fn nearly_cancelling_parameters_keep_their_residues() {
    // a_2 and b_2 differ in the last bit only; dropping that pole family
    // costs ~1e-9 even though its residues are O(1e-16) individually
    let b = vec![
        1.473_739_380_132_328_2,
        1.973_739_380_132_328_4,
        1.979_583_475_109_185_2,
        2.479_583_475_109_185,
        1.362_525_188_290_779_6,
        1.862_525_188_290_779_6,
        0.0,
    ];
    let a = vec![1.0, 1.973_739_380_132_328_2, 2.473_739_380_132_328_4];
    let spec = MeijerGSpec::new(6, 1, a, b, 9.282_233_148_828_587).unwrap();
    // mpmath, 50 digits
    let want = 0.597_937_138_629_178_979_92;
    let (s, _) = meijer_g_series_estimate(&spec).unwrap();
    assert!(rel(s, want) < 1e-10, "{s}");
    assert!(rel(meijer_g(&spec).unwrap(), want) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn dispatch_matches_contour(
        alpha in 1.0f64..6.0,
        beta in 1.0f64..6.0,
        zeta2 in 0.5f64..12.0,
        r in 1usize..=2,
        log_z in -4.0f64..1.5,
        degree in 0usize..4,
    ) {
        let z = 10f64.powf(log_z);
        let mut spec = cdf_spec(alpha, beta, zeta2, r, z);
        // ASEP kernel order G^{3r,2}_{r+2,3r+1}
        spec.n = 2;
        spec.a.insert(0, 0.5 - degree as f64);
        let g = meijer_g(&spec).unwrap();
        let c = meijer_g_contour(&spec).unwrap();
        prop_assert!(rel(g, c) <= 1e-7, "{:?}: {} vs {}", spec, g, c);
    }
}
