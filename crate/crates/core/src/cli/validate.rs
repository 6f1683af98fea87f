//! Cross-oracle validation suite behind the `validate` command.
//!
//! Every check is deterministic given the options, so two runs with the same
//! seed produce identical reports regardless of the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    asep_closed, asep_closed_detailed, asep_quadrature, asymptote, fit_diversity_slope, outage,
    Modulation, SystemParams,
};
use crate::channels::{fso_cdf, fso_pdf, rf_sample, rf_selected_cdf, FsoHopParams, FsoSampler, RfHopParams};
use crate::error::Result;
use crate::montecarlo::{simulate_sep, SimPlan};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{meijer_g_contour, meijer_g_series_estimate};
use crate::stats::{ks_distance, ks_distance_bracketed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Monte Carlo trials per spot configuration.
    pub mc_trials: u64,
    /// Samples per KS test.
    pub ks_samples: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            seed: 1,
            mc_trials: 1_000_000,
            ks_samples: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Worst observed discrepancy (or failure count, per check).
    pub metric: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn bound(name: &str, metric: f64, tolerance: f64, detail: String) -> Check {
        Check {
            name: name.to_string(),
            metric,
            tolerance,
            passed: metric <= tolerance,
            detail,
        }
    }

    fn failed(name: &str, err: impl std::fmt::Display) -> Check {
        Check {
            name: name.to_string(),
            metric: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
            detail: format!("error: {err}"),
        }
    }

    fn from_result(name: &str, r: Result<Check>) -> Check {
        r.unwrap_or_else(|e| Check::failed(name, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub options: ValidateOptions,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Same checks with bit-identical numbers.
    pub fn same_result(&self, other: &Self) -> bool {
        self.options == other.options
            && self.checks.len() == other.checks.len()
            && self.checks.iter().zip(&other.checks).all(|(a, b)| {
                a.name == b.name
                    && a.metric.to_bits() == b.metric.to_bits()
                    && a.passed == b.passed
                    && a.detail == b.detail
            })
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn system(k: u32, n: u32, fso: (f64, f64, f64, u8), gur: f64, grd: f64) -> Result<SystemParams> {
    let p = SystemParams {
        rf: RfHopParams::new(k, n, gur)?,
        fso: FsoHopParams::new(fso.0, fso.1, fso.2, fso.3, grd)?,
        gamma_out: 1.0,
        modulation: Modulation::BPSK,
    };
    p.validate()?;
    Ok(p)
}

fn meijer_cross_oracle(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let p = FsoHopParams::new(
            rng.random_range(1.0..6.0),
            rng.random_range(1.0..6.0),
            rng.random_range(0.5..12.0),
            if rng.random_bool(0.5) { 1 } else { 2 },
            1.0,
        )?;
        let z = 10f64.powf(rng.random_range(-4.0..1.0));
        let spec = if i % 2 == 0 {
            // the SNR whose density kernel argument αβ(γ/γ̄)^{1/r} equals z
            p.pdf_spec(p.gamma_bar_rd * (z / (p.alpha * p.beta)).powi(p.r as i32))?
        } else {
            p.cdf_spec_at(z)?
        };
        let (series, _) = meijer_g_series_estimate(&spec)?;
        let contour = meijer_g_contour(&spec)?;
        worst = worst.max(rel(series, contour));
    }
    Ok(Check::bound(
        "meijer_series_vs_contour",
        worst,
        1e-7,
        "max relative gap over 100 random FSO kernels".into(),
    ))
}

/// ∫ f over u = ln(γ/γ̄), which keeps the integrand bounded near zero.
fn pdf_mass(p: &FsoHopParams) -> Result<f64> {
    let mut failure = None;
    let lo = (-30.0 * p.r as f64 / p.nu()).min(-10.0);
    let est = integrate(
        |u| {
            let g = p.gamma_bar_rd * u.exp();
            match fso_pdf(g, p) {
                Ok(f) => f * g,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        lo,
        14.0,
        QuadOptions {
            epsabs: 1e-12,
            epsrel: 1e-10,
            max_intervals: 2000,
        },
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

pub const NORMALIZATION_SETS: [(f64, f64, f64, u8); 10] = [
    (4.2, 1.4, 1.1, 1),
    (4.2, 1.4, 1.1, 2),
    (2.296, 1.822, 1.2, 2),
    (3.0, 3.0, 1.5, 1),
    (2.5, 2.5, 4.0, 2),
    (5.0, 3.0, 10.0, 1),
    (8.0, 6.0, 0.9, 1),
    (1.2, 5.5, 2.2, 2),
    (4.0, 2.0, 2.0, 1),
    (6.0, 4.2, 0.6, 2),
];

fn pdf_normalization() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for &(a, b, z, r) in &NORMALIZATION_SETS {
        let p = FsoHopParams::new(a, b, z, r, 10.0)?;
        worst = worst.max((pdf_mass(&p)? - 1.0).abs());
    }
    Ok(Check::bound(
        "fso_pdf_normalization",
        worst,
        1e-6,
        "max |mass - 1| over 10 parameter sets, including α = β".into(),
    ))
}

fn sorted(n: usize, mut draw: impl FnMut() -> f64) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..n).map(|_| draw()).collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// 1.95/√n is above the 99.9% Kolmogorov quantile.
fn ks_tolerance(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

fn fso_ks(seed: u64, n: usize) -> Result<Check> {
    let p = FsoHopParams::new(2.296, 1.822, 1.2, 2, 15.0)?;
    let sampler = FsoSampler::new(&p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = sorted(n, || sampler.sample(&mut rng));
    let stride = (n / 10_000).max(1);
    let ks = ks_distance_bracketed(&xs, stride, |g| fso_cdf(g, &p))?;
    Ok(Check::bound(
        "fso_sampler_ks",
        ks.upper,
        ks_tolerance(n) + stride as f64 / n as f64,
        format!("{n} samples, bracketed KS upper bound"),
    ))
}

fn rf_ks(seed: u64, n: usize, elements: u32, tolerance: f64, name: &str) -> Result<Check> {
    let p = RfHopParams::new(1, elements, 3.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = sorted(n, || rf_sample(&mut rng, &p));
    let ks = ks_distance(&xs, |g| Ok(rf_selected_cdf(g, &p)))?;
    Ok(Check::bound(name, ks, tolerance, format!("N = {elements}, {n} samples")))
}

fn asep_sweep(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut fallbacks = 0;
    for _ in 0..20 {
        let fso = (
            rng.random_range(1.5..6.0),
            rng.random_range(1.5..6.0),
            rng.random_range(0.7..6.0),
            if rng.random_bool(0.5) { 1 } else { 2 },
        );
        let p = system(
            rng.random_range(1..=3),
            rng.random_range(1..=4),
            fso,
            db(rng.random_range(0.0..30.0)),
            db(rng.random_range(0.0..30.0)),
        )?;
        let closed = asep_closed_detailed(&p)?;
        fallbacks += closed.used_quadrature as usize;
        worst = worst.max(rel(closed.value, asep_quadrature(&p)?));
    }
    let mut c = Check::bound(
        "asep_closed_vs_quadrature",
        worst,
        1e-4,
        format!("max relative gap over 20 random configurations, {fallbacks} quadrature fallbacks"),
    );
    c.passed &= fallbacks == 0;
    Ok(c)
}

pub const MC_SPOT_CONFIGS: [(u32, u32, (f64, f64, f64, u8), f64); 3] = [
    (1, 1, (2.296, 1.822, 1.2, 2), 10.0),
    (2, 2, (4.2, 1.4, 1.1, 1), 25.0),
    (3, 1, (6.0, 4.2, 3.0, 1), 15.0),
];

fn asep_mc(seed: u64, trials: u64) -> Result<Check> {
    let mut missed = 0;
    let mut details = vec![];
    for (i, &(k, n, fso, snr_db)) in MC_SPOT_CONFIGS.iter().enumerate() {
        let p = system(k, n, fso, db(snr_db), db(snr_db))?;
        let closed = asep_closed(&p)?;
        let e = simulate_sep(&SimPlan::new(p, trials, seed.wrapping_add(i as u64)))?;
        if !e.covers(closed) || e.low_count {
            missed += 1;
        }
        details.push(format!("{closed:.6e} in [{:.6e}, {:.6e}]", e.ci_low, e.ci_high));
    }
    Ok(Check::bound(
        "asep_mc_coverage",
        missed as f64,
        0.0,
        format!("{trials} trials; {}", details.join("; ")),
    ))
}

fn zero_snr() -> Result<Check> {
    let p = system(2, 2, (4.2, 1.4, 1.1, 1), 1e-6, 1e-6)?;
    let v = asep_closed(&p)?;
    Ok(Check::bound("asep_zero_snr_limit", (v - 0.5).abs(), 1e-3, format!("ASEP {v}")))
}

pub const SLOPE_CONFIGS: [(u32, u32, (f64, f64, f64, u8)); 6] = [
    (1, 2, (20.0, 20.0, 20.0, 1)),
    (1, 1, (4.2, 3.1, 2.5, 1)),
    (2, 2, (4.2, 2.5, 1.1, 1)),
    (2, 2, (6.0, 4.2, 1.1, 2)),
    (3, 2, (2.2, 1.6, 6.0, 2)),
    (1, 2, (12.0, 10.0, 8.0, 2)),
];

/// Outage with both average SNRs at each dB value.
pub fn joint_outage_curve(p: &SystemParams, points_db: &[f64]) -> Result<Vec<(f64, f64)>> {
    points_db
        .iter()
        .map(|&s| Ok((s, outage(&p.with_snrs(db(s), db(s)))?)))
        .collect()
}

fn slopes() -> Result<Check> {
    let grid: Vec<f64> = (0..=10).map(|i| 40.0 + i as f64).collect();
    let mut worst: f64 = 0.0;
    let mut fitted = vec![];
    for &(k, n, fso) in &SLOPE_CONFIGS {
        let p = system(k, n, fso, 1.0, 1.0)?;
        let want = ((k * n) as f64).min(p.fso.nu() / fso.3 as f64);
        let slope = fit_diversity_slope(&joint_outage_curve(&p, &grid)?)?;
        worst = worst.max(rel(slope, want));
        fitted.push(format!("{slope:.4}/{want}"));
    }
    Ok(Check::bound(
        "diversity_slope",
        worst,
        0.1,
        format!("fitted/expected over 40-50 dB: {}", fitted.join(", ")),
    ))
}

fn noise_floor() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut values = vec![];
    for k in [1, 2, 4] {
        let p = system(k, 2, (4.2, 1.4, 1.1, 1), db(90.0), db(30.0))?;
        let v = outage(&p)?;
        worst = worst.max((v - fso_cdf(p.gamma_out, &p.fso)?).abs());
        values.push(v);
    }
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    Ok(Check::bound(
        "noise_floor",
        worst.max(spread),
        1e-6,
        "K = 1, 2, 4 at 90 dB RF, 30 dB FSO vs FSO CDF".into(),
    ))
}

fn k_n_tradeoff() -> Result<Check> {
    let fso = (20.0, 20.0, 20.0, 1);
    let mut violations = 0;
    for i in 0..=20 {
        let g = db(2.0 * i as f64);
        let one_two = outage(&system(1, 2, fso, g, db(100.0))?)?;
        let two_one = outage(&system(2, 1, fso, g, db(100.0))?)?;
        violations += (one_two >= two_one) as usize;
    }
    let a = asymptote(&system(1, 2, fso, 1.0, 1.0)?)?;
    let b = asymptote(&system(2, 1, fso, 1.0, 1.0)?)?;
    let ratio = a.rf_coding_gain / b.rf_coding_gain;
    let want = (1.0 + std::f64::consts::FRAC_PI_4) * 2f64.sqrt();
    let mut c = Check::bound(
        "k_n_tradeoff",
        rel(ratio, want),
        1e-9,
        format!("coding-gain ratio {ratio}, {violations} sweep points where (1,2) is not below (2,1)"),
    );
    c.passed &= violations == 0;
    Ok(c)
}

fn asymptote_convergence() -> Result<Check> {
    let grid: Vec<f64> = (0..=30).map(|i| 2.0 * i as f64).collect();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (k, n, fso) in [(1, 2, (20.0, 20.0, 20.0, 1)), (2, 2, (4.2, 2.5, 1.1, 1)), (1, 1, (6.0, 4.2, 3.0, 2))] {
        let p = system(k, n, fso, 1.0, 1.0)?;
        let report = asymptote(&p)?;
        for (s, exact) in joint_outage_curve(&p, &grid)? {
            if exact <= 1e-4 {
                let asym = report.outage_at(db(s), db(s));
                worst = worst.max(rel(exact, asym));
                checked += 1;
            }
        }
    }
    Ok(Check::bound(
        "asymptote_convergence",
        worst,
        0.1,
        format!("{checked} points with outage at most 1e-4"),
    ))
}

type Job = (&'static str, Box<dyn Fn(&ValidateOptions) -> Result<Check> + Sync + Send>);

/// Runs every check on the current rayon pool.
pub fn run_validation(options: &ValidateOptions) -> ValidationReport {
    let n = options.ks_samples;
    let jobs: Vec<Job> = vec![
        ("meijer_series_vs_contour", Box::new(|o| meijer_cross_oracle(o.seed))),
        ("fso_pdf_normalization", Box::new(|_| pdf_normalization())),
        ("fso_sampler_ks", Box::new(|o| fso_ks(o.seed, o.ks_samples))),
        (
            "rf_sampler_ks_exact",
            Box::new(move |o| rf_ks(o.seed, n, 1, ks_tolerance(n), "rf_sampler_ks_exact")),
        ),
        ("rf_approximation_gap_n2", Box::new(move |o| rf_ks(o.seed, n, 2, 0.03, "rf_approximation_gap_n2"))),
        ("rf_approximation_gap_n4", Box::new(move |o| rf_ks(o.seed, n, 4, 0.03, "rf_approximation_gap_n4"))),
        ("rf_approximation_gap_n8", Box::new(move |o| rf_ks(o.seed, n, 8, 0.03, "rf_approximation_gap_n8"))),
        ("asep_closed_vs_quadrature", Box::new(|o| asep_sweep(o.seed))),
        ("asep_mc_coverage", Box::new(|o| asep_mc(o.seed, o.mc_trials))),
        ("asep_zero_snr_limit", Box::new(|_| zero_snr())),
        ("diversity_slope", Box::new(|_| slopes())),
        ("noise_floor", Box::new(|_| noise_floor())),
        ("k_n_tradeoff", Box::new(|_| k_n_tradeoff())),
        ("asymptote_convergence", Box::new(|_| asymptote_convergence())),
    ];
    let checks = jobs
        .par_iter()
        .map(|(name, job)| Check::from_result(name, job(options)))
        .collect();
    ValidationReport {
        options: *options,
        checks,
    }
}
