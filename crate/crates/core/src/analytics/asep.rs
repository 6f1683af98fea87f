//! Average symbol error probability
//! ASEP = a√b/(2√π) ∫_0^∞ e^{−bγ} γ^{−1/2} F_D(γ) dγ.

use std::f64::consts::PI;

use super::{e2e_cdf, Modulation, SystemParams};
use crate::channels::degree_weights;
use crate::error::{Error, Result};
use crate::quad::{integrate_panels, QuadOptions};
use crate::specfun::{ln_binomial, ln_gamma, meijer_g, MeijerGSpec};

/// Relative accuracy assumed for each Meijer G value when bounding the
/// rounding error of the closed form (the series acceptance bound).
const MEIJER_REL_ERR: f64 = 1e-9;
/// From this many sources on, an inaccurate alternating sum is replaced by
/// quadrature.
const COMPENSATED_FROM_K: u32 = 6;
const FALLBACK_REL_ERR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsepClosed {
    pub value: f64,
    /// Bound on the accumulated rounding and Meijer G error.
    pub abs_err: f64,
    /// The alternating sum was too inaccurate (or overflowed) and the value
    /// comes from [`asep_quadrature`].
    pub used_quadrature: bool,
}

/// Neumaier summation.
#[derive(Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// The ASEP closed form with the binomial sums collapsed by
/// [`degree_weights`]. The k = 0 term and the trailing Meijer term cancel
/// symbolically and are replaced by a/2, so only k ≥ 1 is summed:
///
/// ```text
/// ASEP = a/2 + a√b/(2√π) Σ_{k≥1} C(K,k)(−1)^k Σ_s c_s θ^{−s} p_k^{−δ}
///        [Γ(δ) − A G^{3r,2}_{r+2,3r+1}(B/(p_k γ̄_rd) | 1/2−s, 1, χ1; χ2, 0)]
/// ```
/// with θ = Cγ̄_ur, p_k = k/θ + b and δ = s + 1/2.
pub fn asep_closed_detailed(params: &SystemParams) -> Result<AsepClosed> {
    params.validate()?;
    let Modulation { a, b } = params.modulation;
    let fso = &params.fso;
    let kk = params.rf.k;
    let theta = params.rf.scale();
    let ln_theta = theta.ln();
    let ln_amp = fso.ln_a();
    let (chi1, chi2) = fso.chi();
    let mut upper = vec![0.0, 1.0];
    upper.extend(chi1);
    let mut lower = chi2;
    lower.push(0.0);
    let m = 3 * fso.r as usize;
    let big_b = fso.b();

    let mut sum = Compensated::default();
    let mut err = 0.0;
    let mut finite = true;
    for k in 1..=kk {
        let ln_p = b.ln() + (k as f64 / (theta * b)).ln_1p();
        let z = big_b / (ln_p.exp() * fso.gamma_bar_rd);
        let weights = degree_weights(k, params.rf.n);
        let ln_binom = ln_binomial(kk, k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (s, &c) in weights.coeffs.iter().enumerate() {
            let delta = s as f64 + 0.5;
            let lg = ln_gamma(delta)?;
            upper[0] = 0.5 - s as f64;
            let g = meijer_g(&MeijerGSpec::new(m, 2, upper.clone(), lower.clone(), z)?)?;
            // A·G/Γ(δ) is the e^{−pγ}γ^{δ−1} average of F2, a probability
            let ratio = (ln_amp - lg).exp() * g;
            let scale = (ln_binom + c.ln() - s as f64 * ln_theta - delta * ln_p + lg).exp();
            let term = sign * scale * (1.0 - ratio);
            if !term.is_finite() || !scale.is_finite() {
                finite = false;
                break;
            }
            sum.add(term);
            err += scale * (ratio.abs() * MEIJER_REL_ERR + 8.0 * f64::EPSILON);
        }
    }
    let pref = a * b.sqrt() / (2.0 * PI.sqrt());
    let value = 0.5 * a + pref * sum.value();
    let abs_err = pref * err + 0.5 * a * f64::EPSILON;
    let inaccurate = kk >= COMPENSATED_FROM_K && abs_err > FALLBACK_REL_ERR * value.abs();
    if !finite || inaccurate {
        return Ok(AsepClosed {
            value: asep_quadrature(params)?,
            abs_err: f64::NAN,
            used_quadrature: true,
        });
    }
    Ok(AsepClosed {
        value,
        abs_err,
        used_quadrature: false,
    })
}

/// Closed-form ASEP; see [`asep_closed_detailed`].
pub fn asep_closed(params: &SystemParams) -> Result<f64> {
    asep_closed_detailed(params).map(|r| r.value)
}

/// ASEP by adaptive quadrature of the CDF form.
pub fn asep_quadrature(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    let scales = [
        params.rf.gamma_bar_ur,
        params.rf.scale(),
        params.fso.gamma_bar_rd,
        params.gamma_out,
    ];
    asep_with_cdf(&params.modulation, &scales, |g| e2e_cdf(g, params))
}

/// a√b/(2√π) ∫ e^{−bγ} γ^{−1/2} F(γ) dγ for an arbitrary CDF, after the
/// substitution γ = t², which removes the endpoint singularity:
/// (a√b/√π) ∫_0^∞ e^{−bt²} F(t²) dt. `scales` are SNR values near which F
/// changes; they seed the panel breakpoints.
pub fn asep_with_cdf(
    modulation: &Modulation,
    scales: &[f64],
    mut cdf: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    modulation.validate()?;
    let Modulation { a, b } = *modulation;
    let g_max = 800.0 / b;
    let smallest = scales
        .iter()
        .copied()
        .filter(|s| *s > 0.0)
        .fold(1.0 / b, f64::min);
    let mut breaks = vec![0.0];
    let mut g = 1e-10 * smallest;
    while g < g_max {
        breaks.push(g.sqrt());
        g *= 10.0;
    }
    breaks.extend(scales.iter().filter(|s| **s > 0.0 && **s < g_max).map(|s| s.sqrt()));
    breaks.push((1.0 / b).sqrt());
    breaks.push(g_max.sqrt());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut failure = None;
    let est = integrate_panels(
        |t| {
            let w = (-b * t * t).exp();
            if w == 0.0 || failure.is_some() {
                return 0.0;
            }
            match cdf(t * t) {
                Ok(f) => w * f,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        &breaks,
        QuadOptions {
            epsabs: 1e-16,
            epsrel: 1e-10,
            max_intervals: 3000,
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = a * b.sqrt() / PI.sqrt();
    // the relative criterion is what matters for small ASEP values
    if !est.converged && est.abs_err > 1e-7 * est.value.abs() {
        return Err(Error::Quadrature {
            value: scale * est.value,
            abs_err: scale * est.abs_err,
        });
    }
    Ok(scale * est.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cdf_gives_half_a() {
        let m = Modulation { a: 1.7, b: 0.6 };
        let v = asep_with_cdf(&m, &[1.0], |_| Ok(1.0)).unwrap();
        assert!((v - 0.85).abs() < 1e-10, "{v}");
    }

    /// The displayed sum taken literally: k from 0, plus the trailing
    /// standalone Meijer term.
    fn ungrouped(params: &SystemParams) -> (f64, f64, f64) {
        let Modulation { a, b } = params.modulation;
        let fso = &params.fso;
        let theta = params.rf.scale();
        let amp = fso.ln_a().exp();
        let (chi1, chi2) = fso.chi();
        let m = 3 * fso.r as usize;
        let g = |first: f64, z: f64| {
            let mut upper = vec![first, 1.0];
            upper.extend(chi1.clone());
            let mut lower = chi2.clone();
            lower.push(0.0);
            meijer_g(&MeijerGSpec::new(m, 2, upper, lower, z).unwrap()).unwrap()
        };
        let mut total = 0.0;
        let mut k0 = 0.0;
        for k in 0..=params.rf.k {
            let p = k as f64 / theta + b;
            let binom = ln_binomial(params.rf.k, k).exp();
            for (s, c) in degree_weights(k, params.rf.n).coeffs.iter().enumerate() {
                let delta = s as f64 + 0.5;
                let bracket = ln_gamma(delta).unwrap().exp()
                    - amp * g(0.5 - s as f64, fso.b() / (p * fso.gamma_bar_rd));
                let t = if k % 2 == 0 { 1.0 } else { -1.0 } * binom * c
                    * theta.powi(-(s as i32))
                    * p.powf(-delta)
                    * bracket;
                if k == 0 {
                    k0 += t;
                }
                total += t;
            }
        }
        let trailing = amp / b.sqrt() * g(0.5, fso.b() / (b * fso.gamma_bar_rd));
        let pref = a * b.sqrt() / (2.0 * PI.sqrt());
        (pref * (total + trailing), pref * k0, pref * trailing)
    }

    #[test]
    fn grouped_form_equals_literal_sum() {
        use crate::channels::{FsoHopParams, RfHopParams};
        for (k, n, r, g) in [(2, 2, 1, 10.0), (3, 3, 2, 3.0), (1, 4, 1, 50.0)] {
            let p = SystemParams {
                rf: RfHopParams::new(k, n, g).unwrap(),
                fso: FsoHopParams::new(4.2, 1.4, 1.1, r, g).unwrap(),
                gamma_out: 1.0,
                modulation: Modulation { a: 1.0, b: 0.7 },
            };
            let (literal, k0, trailing) = ungrouped(&p);
            // the k = 0 Meijer part and the trailing term cancel to a/2
            assert!((k0 + trailing - 0.5).abs() < 1e-14, "{k0} + {trailing}");
            let grouped = asep_closed(&p).unwrap();
            assert!((literal - grouped).abs() < 1e-12, "{literal} vs {grouped}");
        }
    }

    #[test]
    fn compensated_sum_recovers_small_residue() {
        let mut s = Compensated::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
