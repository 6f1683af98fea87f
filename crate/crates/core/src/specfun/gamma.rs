//! Log-gamma for real and complex arguments.
//!
//! Real arguments use a Taylor expansion around 1 and 2 (where ln Γ has
//! roots), the Stirling series for x ≥ 15, downward recurrence in between and
//! the reflection formula below 1/2. Complex arguments follow the same
//! shift/Stirling/reflection route; only `exp` of the complex result is ever
//! used, so the branch of the imaginary part is irrelevant.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::dd::Dd;
use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const STIRLING_MIN: f64 = 15.0;

/// B_{2k} / (2k (2k - 1)) for k = 1..8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// ζ(2) .. ζ(12); higher orders are summed directly.
const ZETA_LOW: [f64; 11] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370_0,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
];

const TAYLOR_TERMS: usize = 56;

/// (-1)^k ζ(k) / k for k = 2..=TAYLOR_TERMS.
fn taylor_coeffs() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        (2..=TAYLOR_TERMS)
            .map(|k| {
                let zeta = if k <= 12 {
                    ZETA_LOW[k - 2]
                } else {
                    1.0 + (2..=40).rev().map(|n| (n as f64).powi(-(k as i32))).sum::<f64>()
                };
                (if k % 2 == 0 { zeta } else { -zeta }) / k as f64
            })
            .collect()
    })
}

/// ln Γ(1 + e) for |e| ≤ 1/2 via ln Γ(1+e) = -γe + Σ_{k≥2} (-1)^k ζ(k) e^k / k.
fn ln_gamma_1p(e: f64) -> f64 {
    let mut acc = 0.0;
    for c in taylor_coeffs().iter().rev() {
        acc = (acc + c) * e;
    }
    // acc currently holds Σ c_k e^{k-1}
    e * (acc - EULER_GAMMA)
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series * inv
}

/// sin(πx) with exact argument reduction.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x * 0.5).round();
    // r in [-1, 1]
    if r.abs() <= 0.25 {
        (PI * r).sin()
    } else if r > 0.75 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.75 {
        -(PI * (1.0 + r)).sin()
    } else if r > 0.0 {
        (PI * (0.5 - r)).cos()
    } else {
        -(PI * (0.5 + r)).cos()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// ln|Γ(x)| together with the sign of Γ(x).
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x == f64::INFINITY {
        return Ok((f64::INFINITY, 1.0));
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let (lg, _) = ln_gamma_signed(1.0 - x)?;
        let val = PI.ln() - s.abs().ln() - lg;
        return Ok((val, s.signum()));
    }
    Ok((ln_gamma_pos(x), 1.0))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x <= 1.5 {
        return ln_gamma_1p(x - 1.0);
    }
    if x <= 2.5 {
        let e = x - 2.0;
        return e.ln_1p() + ln_gamma_1p(e);
    }
    if x >= STIRLING_MIN {
        return stirling(x);
    }
    // Γ(x) = Γ(y) Π (y..x-1), y in (1.5, 2.5]; every step is exact
    let mut y = x;
    let mut prod = 1.0;
    while y > 2.5 {
        y -= 1.0;
        prod *= y;
    }
    ln_gamma_pos(y) + prod.ln()
}

/// Natural log of |Γ(x)|.
///
/// Fails at the poles x = 0, -1, -2, ...
pub fn ln_gamma(x: f64) -> Result<f64> {
    ln_gamma_signed(x).map(|(v, _)| v)
}

/// Γ(x), overflowing to ±∞ for large arguments.
pub fn gamma(x: f64) -> Result<f64> {
    let (lg, s) = ln_gamma_signed(x)?;
    Ok(s * lg.exp())
}

/// ln|Γ(x)| and sign for an argument carried in double-double, so that the
/// distance to a nearby pole is not lost when x is a difference of parameters.
pub(crate) fn ln_gamma_signed_dd(x: Dd) -> Result<(f64, f64)> {
    let n = x.hi.round();
    if n > 0.0 || !n.is_finite() {
        return ln_gamma_signed(x.to_f64());
    }
    let e = (x - Dd::new(n)).to_f64();
    if e == 0.0 {
        return Err(Error::GammaPole(n));
    }
    // Γ(n+e) = π / (sin(π(n+e)) Γ(1−n−e)), sin(π(n+e)) = (−1)^n sin(πe)
    let s = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 } * sin_pi(e);
    let (lg, _) = ln_gamma_signed((1.0 - n) - e)?;
    Ok((PI.ln() - s.abs().ln() - lg, s.signum()))
}

/// Γ(x) evaluated directly, without passing through a logarithm, together
/// with a bound on its relative error in ulps. The recurrence runs in
/// double-double so only the base value Γ(1 + e), |e| ≤ 1/2, is rounded.
/// `None` when the argument is a pole or too large for the recurrence.
pub(crate) fn gamma_direct(x: Dd) -> Option<(Dd, f64)> {
    const MAX_STEPS: f64 = 60.0;
    let n = x.hi.round();
    if !n.is_finite() || n > MAX_STEPS || n < -MAX_STEPS {
        return None;
    }
    // x = n + e exactly in double-double
    let e_dd = x - Dd::new(n);
    let e = e_dd.to_f64();
    if n <= 0.0 {
        // Γ(n+e) = Γ(1+e) / ((n+e)(n+1+e)···(e))
        if e == 0.0 {
            return None;
        }
        let mut den = e_dd;
        let mut i = n;
        while i < 0.0 {
            den = den * (Dd::new(i) + e_dd);
            i += 1.0;
        }
        return Some((Dd::new(ln_gamma_1p(e).exp()) / den, 2.0));
    }
    if n == 1.0 {
        return Some((Dd::new(ln_gamma_1p(e).exp()), 1.5));
    }
    // Γ(n+e) = Γ(1+e) (1+e)(2+e)···(n−1+e)
    let mut prod = Dd::new(ln_gamma_1p(e).exp());
    let mut i = 1.0;
    while i < n {
        prod = prod * (Dd::new(i) + e_dd);
        i += 1.0;
    }
    Some((prod, 2.0))
}

/// 1/Γ(x) as (ln magnitude, sign); sign 0 at the poles of Γ.
pub(crate) fn ln_rgamma_signed(x: Dd) -> (f64, f64) {
    match ln_gamma_signed_dd(x) {
        Ok((lg, s)) => (-lg, s),
        Err(_) => (f64::NEG_INFINITY, 0.0),
    }
}

fn stirling_c(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in STIRLING_COEFFS.iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series * inv
}

/// ln sin(πz), accurate for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if y.abs() < 20.0 {
        let s = Complex64::new(sin_pi(x) * (PI * y).cosh(), sin_pi(x + 0.5) * (PI * y).sinh());
        return s.ln();
    }
    // sin(πz) = (e^{iπz} - e^{-iπz}) / 2i; one exponential dominates.
    if y > 0.0 {
        // sin(πz) ≈ (i/2) e^{-iπz}
        Complex64::new(PI * y - std::f64::consts::LN_2, std::f64::consts::FRAC_PI_2 - PI * x)
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

/// ln Γ(z) for complex z, on an arbitrary branch of the imaginary part.
/// At the poles the real part is +∞.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let lp = Complex64::new(PI.ln(), 0.0);
        return lp - ln_sin_pi(z) - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    if z.norm() >= STIRLING_MIN {
        return stirling_c(z);
    }
    let mut y = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while y.norm() < STIRLING_MIN {
        prod *= y;
        y += 1.0;
    }
    stirling_c(y) - prod.ln()
}
