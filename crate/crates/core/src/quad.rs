//! Globally adaptive 21-point Gauss-Kronrod quadrature.
//!
//! Each call owns its own interval heap, so concurrent callers never share
//! workspace.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Smallest error a panel can claim, relative to the integral of |f| over it.
const ROUNDING_FLOOR: f64 = 50.0 * f64::EPSILON;

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub epsabs: f64,
    pub epsrel: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            epsabs: 1e-13,
            epsrel: 1e-11,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub abs_err: f64,
    /// Integral of |f|, useful as a cancellation scale.
    pub abs_integral: f64,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / ROUNDING_FLOOR {
        err = err.max(ROUNDING_FLOOR * res_abs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Segment {
        a,
        b,
        value,
        err,
        abs: res_abs,
    }
}

/// Integrates `f` over consecutive panels `[breaks[i], breaks[i+1]]`,
/// refining whichever subinterval currently carries the largest error.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadEstimate {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(&mut f, w[0], w[1]));
        }
    }
    loop {
        let (value, err, abs) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |(v, e, s), seg| (v + seg.value, e + seg.err, s + seg.abs));
        let tol = opts.epsabs.max(opts.epsrel * value.abs());
        if err <= tol {
            return QuadEstimate {
                value,
                abs_err: err,
                abs_integral: abs,
                converged: true,
            };
        }
        if heap.len() >= opts.max_intervals {
            return QuadEstimate {
                value,
                abs_err: err,
                abs_integral: abs,
                converged: false,
            };
        }
        let worst = heap.pop().expect("at least one segment");
        if worst.err <= ROUNDING_FLOOR * 1.000_001 * worst.abs {
            // bisection cannot push errors below the rounding floor
            heap.push(worst);
            let (value, err, abs) = heap
                .iter()
                .fold((0.0, 0.0, 0.0), |(v, e, s), seg| (v + seg.value, e + seg.err, s + seg.abs));
            return QuadEstimate {
                value,
                abs_err: err,
                abs_integral: abs,
                converged: false,
            };
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(Segment {
                err: 0.0,
                ..worst
            });
            continue;
        }
        heap.push(gk21(&mut f, worst.a, mid));
        heap.push(gk21(&mut f, mid, worst.b));
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadEstimate {
    integrate_panels(f, &[a, b], opts)
}

/// Like [`integrate`] but reports non-convergence as an error.
pub fn integrate_strict<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<f64> {
    let est = integrate(f, a, b, opts);
    if est.converged {
        Ok(est.value)
    } else {
        Err(Error::Quadrature {
            value: est.value,
            abs_err: est.abs_err,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| 3.0 * x * x, 0.0, 2.0, QuadOptions::default());
        assert!((est.value - 8.0).abs() < 1e-14);
        assert!(est.converged);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^{-1/2} dx = 2
        let est = integrate(|x| x.powf(-0.5), 0.0, 1.0, QuadOptions::default());
        assert!((est.value - 2.0).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn oscillatory_panels() {
        let breaks: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        let est = integrate_panels(|x| (10.0 * x).cos() * (-x).exp(), &breaks, QuadOptions::default());
        // ∫_0^20 e^{-x} cos(10x) dx
        let exact = {
            let e = (-20.0f64).exp();
            (1.0 - e * ((200.0f64).cos() - 10.0 * (200.0f64).sin())) / 101.0
        };
        assert!((est.value - exact).abs() < 1e-12);
    }
}
