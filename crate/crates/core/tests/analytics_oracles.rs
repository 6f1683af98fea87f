use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use risfso::analytics::{
    asep_closed, asep_closed_detailed, asep_quadrature, asymptote, e2e_cdf, e2e_cdf_expanded,
    fit_diversity_slope, fso_small_snr_constant, outage, DominantHop, Modulation, SystemParams,
};
use risfso::channels::{fso_cdf, FsoHopParams, RfHopParams};

fn system(k: u32, n: u32, fso: (f64, f64, f64, u8), gur: f64, grd: f64) -> SystemParams {
    SystemParams {
        rf: RfHopParams::new(k, n, gur).unwrap(),
        fso: FsoHopParams::new(fso.0, fso.1, fso.2, fso.3, grd).unwrap(),
        gamma_out: 1.0,
        modulation: Modulation::BPSK,
    }
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

const DEFAULT_FSO: (f64, f64, f64, u8) = (4.2, 1.4, 1.1, 1);

#[test]
fn e2e_cdf_limits() {
    let p = system(2, 3, DEFAULT_FSO, 10.0, 10.0);
    assert_eq!(e2e_cdf(0.0, &p).unwrap(), 0.0);
    let g = 1e7;
    assert!(fso_cdf(g, &p.fso).unwrap() >= 1.0 - 1e-12);
    assert!((e2e_cdf(g, &p).unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn product_and_expanded_forms_agree() {
    let p = system(2, 2, DEFAULT_FSO, 20.0, 15.0);
    for i in 0..100 {
        let g = 1e-3 * 10f64.powf(6.0 * i as f64 / 99.0);
        let a = e2e_cdf(g, &p).unwrap();
        let b = e2e_cdf_expanded(g, &p).unwrap();
        assert!((a - b).abs() <= 1e-10, "γ={g}: {a} vs {b}");
    }
}

#[test]
fn outage_vanishes_with_threshold() {
    let mut p = system(1, 2, DEFAULT_FSO, 10.0, 10.0);
    let mut last = f64::INFINITY;
    for t in [1e-2, 1e-4, 1e-8, 1e-12] {
        p.gamma_out = t;
        let o = outage(&p).unwrap();
        assert!(o < last);
        last = o;
    }
    assert!(last < 1e-10);
}

#[test]
fn noise_floor_is_the_fso_cdf() {
    for k in [1, 2, 4] {
        let p = system(k, 2, DEFAULT_FSO, 1e9, db(20.0));
        let floor = fso_cdf(p.gamma_out, &p.fso).unwrap();
        assert!((outage(&p).unwrap() - floor).abs() <= 1e-6);
    }
}

#[test]
fn more_sources_never_hurt() {
    for s in (0..=40).step_by(4) {
        let g = db(s as f64);
        let one = outage(&system(1, 2, DEFAULT_FSO, g, g)).unwrap();
        let two = outage(&system(2, 2, DEFAULT_FSO, g, g)).unwrap();
        assert!(two <= one, "{s} dB: {two} > {one}");
    }
}

#[test]
fn outage_monotonicity() {
    let base = system(2, 2, DEFAULT_FSO, 10.0, 10.0);
    let grid: Vec<f64> = (0..30).map(|i| db(-10.0 + 2.0 * i as f64)).collect();
    let by_ur: Vec<f64> = grid.iter().map(|&g| outage(&base.with_snrs(g, 10.0)).unwrap()).collect();
    let by_rd: Vec<f64> = grid.iter().map(|&g| outage(&base.with_snrs(10.0, g)).unwrap()).collect();
    assert!(by_ur.windows(2).all(|w| w[1] <= w[0]));
    assert!(by_rd.windows(2).all(|w| w[1] <= w[0]));
    let by_threshold: Vec<f64> = grid
        .iter()
        .map(|&t| outage(&SystemParams { gamma_out: t, ..base }).unwrap())
        .collect();
    assert!(by_threshold.windows(2).all(|w| w[1] >= w[0]));
}

// ------------------------------------------------------------------ ASEP

#[test]
fn asep_zero_snr_limit() {
    for (a, b) in [(1.0, 1.0), (1.0, 0.5), (2.0, 0.3)] {
        let mut p = system(2, 2, DEFAULT_FSO, 1e-6, 1e-6);
        p.modulation = Modulation { a, b };
        let v = asep_closed(&p).unwrap();
        assert!((v - a / 2.0).abs() <= 1e-3, "({a},{b}): {v}");
    }
}

#[test]
fn asep_closed_matches_quadrature_reference_config() {
    let p = system(2, 2, DEFAULT_FSO, 100.0, 100.0);
    let c = asep_closed(&p).unwrap();
    let q = asep_quadrature(&p).unwrap();
    assert!(((c - q) / q).abs() <= 1e-4, "{c} vs {q}");
}

#[test]
fn asep_closed_matches_quadrature_on_random_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let r = if i % 2 == 0 { 1 } else { 2 };
        let fso = (
            rng.random_range(1.0..6.0),
            rng.random_range(1.0..6.0),
            rng.random_range(0.5..8.0),
            r,
        );
        let g = db(rng.random_range(0.0..40.0));
        let mut p = system(rng.random_range(1..=3), rng.random_range(1..=4), fso, g, g);
        p.modulation = Modulation {
            a: 1.0,
            b: [1.0, 0.5][i % 2],
        };
        let c = asep_closed_detailed(&p).unwrap();
        assert!(!c.used_quadrature);
        let q = asep_quadrature(&p).unwrap();
        let rel = ((c.value - q) / q).abs();
        worst = worst.max(rel);
        assert!(rel <= 1e-4, "{p:?}: {} vs {q}", c.value);
    }
    eprintln!("worst closed/quadrature gap {worst:e}");
}

#[test]
fn asep_is_bounded_and_decreasing() {
    for fso in [DEFAULT_FSO, (2.296, 1.822, 1.2, 2)] {
        let mut last = f64::INFINITY;
        for s in (-10..=50).step_by(5) {
            let g = db(s as f64);
            let v = asep_closed(&system(2, 3, fso, g, g)).unwrap();
            assert!(v > 0.0 && v <= 0.5);
            assert!(v < last, "{s} dB");
            last = v;
        }
    }
}

#[test]
fn large_source_counts_stay_accurate() {
    let p = system(8, 16, DEFAULT_FSO, db(15.0), db(15.0));
    let c = asep_closed_detailed(&p).unwrap();
    let q = asep_quadrature(&p).unwrap();
    assert!(((c.value - q) / q).abs() <= 1e-4);
    let p = system(6, 2, DEFAULT_FSO, db(5.0), db(5.0));
    let c = asep_closed_detailed(&p).unwrap();
    let q = asep_quadrature(&p).unwrap();
    assert!(((c.value - q) / q).abs() <= 1e-4, "{c:?} vs {q}");
}

// ------------------------------------------------------------- asymptotes

#[test]
fn diversity_order_examples() {
    let r = asymptote(&system(2, 4, (5.0, 3.0, 10.0, 1), 1.0, 1.0)).unwrap();
    assert_eq!(r.diversity_order, 3.0);
    assert_eq!(r.dominant_hop, DominantHop::Fso);
    let r = asymptote(&system(3, 2, (2.2, 1.6, 6.0, 2), 1.0, 1.0)).unwrap();
    assert!((r.diversity_order - 0.8).abs() < 1e-15);
    assert_eq!(r.dominant_hop, DominantHop::Fso);
    let r = asymptote(&system(1, 1, (20.0, 20.0, 20.0, 1), 1.0, 1.0)).unwrap();
    assert_eq!((r.diversity_order, r.dominant_hop), (1.0, DominantHop::Rf));
    let r = asymptote(&system(1, 2, (5.0, 4.0, 6.0, 2), 1.0, 1.0)).unwrap();
    assert_eq!(r.dominant_hop, DominantHop::Tie);
    assert!(r.coding_gain.is_none());
}

#[test]
fn dominant_hop_ignores_joint_rescaling() {
    for (k, n, fso) in [(1, 1, DEFAULT_FSO), (2, 2, DEFAULT_FSO), (1, 1, (6.0, 5.0, 4.0, 2))] {
        let hops: Vec<DominantHop> = [1e-3, 1.0, 1e6]
            .iter()
            .map(|&g| asymptote(&system(k, n, fso, g, 3.0 * g)).unwrap().dominant_hop)
            .collect();
        assert!(hops.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn coding_gain_ratio_for_one_source_two_elements() {
    let fso = (20.0, 20.0, 20.0, 1);
    let a = asymptote(&system(1, 2, fso, 1.0, 1.0)).unwrap();
    let b = asymptote(&system(2, 1, fso, 1.0, 1.0)).unwrap();
    let want = (1.0 + std::f64::consts::FRAC_PI_4) * 2f64.sqrt();
    let ratio = a.coding_gain.unwrap() / b.coding_gain.unwrap();
    assert!((ratio - want).abs() <= 1e-9, "{ratio}");
    assert!((ratio - 2.525).abs() < 1e-3);
}

#[test]
fn upsilon_reproduces_small_snr_cdf() {
    // well separated poles: next exponent is 1 above ν/r
    for fso in [(4.2, 3.1, 0.6, 1), (6.0, 4.2, 1.1, 2)] {
        let p = FsoHopParams::new(fso.0, fso.1, fso.2, fso.3, 2.0).unwrap();
        let c = fso_small_snr_constant(&p).unwrap();
        assert!(!c.near_degenerate);
        for t in [1e-6, 1e-8] {
            let exact = fso_cdf(t * 2.0, &p).unwrap();
            assert!((c.eval(t) / exact - 1.0).abs() < 1e-4, "{fso:?} t={t}");
        }
    }
}

#[test]
fn coincident_poles_carry_a_logarithm() {
    let p = FsoHopParams::new(2.0, 1.4, 1.4, 1, 1.0).unwrap();
    let c = fso_small_snr_constant(&p).unwrap();
    assert!(c.near_degenerate && c.log_coefficient != 0.0);
    for t in [1e-8, 1e-10] {
        let exact = fso_cdf(t, &p).unwrap();
        assert!((c.eval(t) / exact - 1.0).abs() < 1e-5, "t={t}: {} vs {exact}", c.eval(t));
    }
}

fn joint_curve(p: &SystemParams, from_db: f64, to_db: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((to_db - from_db) / step).round() as usize;
    (0..=n)
        .map(|i| {
            let s = from_db + step * i as f64;
            (s, outage(&p.with_snrs(db(s), db(s))).unwrap())
        })
        .collect()
}

#[test]
fn slope_of_rf_dominant_curve() {
    let p = system(1, 2, (20.0, 20.0, 20.0, 1), 1.0, 1.0);
    let slope = fit_diversity_slope(&joint_curve(&p, 40.0, 50.0, 1.0)).unwrap();
    assert!((slope - 2.0).abs() <= 0.05 * 2.0, "{slope}");
}

#[test]
fn slope_of_fso_dominant_curve() {
    let p = system(2, 2, (4.2, 2.5, 1.1, 1), 1.0, 1.0);
    let slope = fit_diversity_slope(&joint_curve(&p, 40.0, 50.0, 1.0)).unwrap();
    assert!((slope - 1.1).abs() <= 0.05 * 1.1, "{slope}");
}

#[test]
fn asymptote_converges_where_outage_is_small() {
    for (k, n, fso) in [(1, 2, (20.0, 20.0, 20.0, 1)), (2, 2, (4.2, 2.5, 1.1, 1)), (1, 1, (6.0, 4.2, 3.0, 2))] {
        let p = system(k, n, fso, 1.0, 1.0);
        let report = asymptote(&p).unwrap();
        let mut checked = 0;
        for (s, exact) in joint_curve(&p, 0.0, 60.0, 2.0) {
            if exact <= 1e-4 {
                let asym = report.outage_at(db(s), db(s));
                assert!(((exact - asym) / asym).abs() <= 0.1, "{k} {n} {fso:?} {s} dB: {exact} vs {asym}");
                checked += 1;
            }
        }
        assert!(checked >= 5);
    }
}

#[test]
fn asymptote_gap_decays_at_the_next_pole_rate() {
    // ν/r = 1.3 with the next FSO pole at β/r = 1.5: the relative gap shrinks
    // like (γ_out/γ̄)^{0.2}, i.e. by 10^{-0.1} every 5 dB, and is still ~15%
    // at 60 dB although the outage is far below 1e-4
    let p = system(2, 1, (5.0, 3.0, 2.6, 2), 1.0, 1.0);
    let report = asymptote(&p).unwrap();
    let gap = |s: f64| {
        let exact = outage(&p.with_snrs(db(s), db(s))).unwrap();
        (report.outage_at(db(s), db(s)) - exact) / report.outage_at(db(s), db(s))
    };
    let gaps: Vec<f64> = [50.0, 55.0, 60.0, 65.0].iter().map(|&s| gap(s)).collect();
    for w in gaps.windows(2) {
        assert!((w[1] / w[0] - 10f64.powf(-0.1)).abs() < 0.01, "{gaps:?}");
    }
    assert!(gaps[2] > 0.1);
}
