//! Gamma-Gamma FSO hop with pointing errors.
//!
//! Density
//! ```text
//! f(γ) = ζ² / (r γ Γ(α)Γ(β)) · G^{3,0}_{1,3}[ αβ (γ/γ̄)^{1/r} | ζ²+1 ; ζ², α, β ]
//! ```
//! and distribution F(γ) = A · G^{3r,1}_{r+1,3r+1}[ B γ/γ̄ | 1, χ1 ; χ2, 0 ].
//!
//! γ̄ is the scale of the law, not its mean.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{ln_gamma, meijer_g, MeijerGSpec};

/// Tolerated excursion of an evaluated CDF outside [0, 1] before it is
/// treated as an evaluation failure.
pub const CDF_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsoHopParams {
    pub alpha: f64,
    pub beta: f64,
    /// Squared ratio of equivalent beam radius to jitter deviation.
    pub zeta2: f64,
    /// 1: heterodyne, 2: intensity modulation / direct detection.
    pub r: u8,
    pub gamma_bar_rd: f64,
}

impl FsoHopParams {
    pub fn new(alpha: f64, beta: f64, zeta2: f64, r: u8, gamma_bar_rd: f64) -> Result<Self> {
        let p = FsoHopParams {
            alpha,
            beta,
            zeta2,
            r,
            gamma_bar_rd,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("zeta2", self.zeta2),
            ("gamma_bar_rd", self.gamma_bar_rd),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(field, format!("must be positive and finite, got {v}")));
            }
        }
        if self.r != 1 && self.r != 2 {
            return Err(Error::param("r", format!("must be 1 or 2, got {}", self.r)));
        }
        Ok(())
    }

    /// ν = min(α, β, ζ²).
    pub fn nu(&self) -> f64 {
        self.alpha.min(self.beta).min(self.zeta2)
    }

    /// ln A with A = r^{α+β−2} ζ² / ((2π)^{r−1} Γ(α) Γ(β)).
    pub fn ln_a(&self) -> f64 {
        let r = self.r as f64;
        (self.alpha + self.beta - 2.0) * r.ln() + self.zeta2.ln()
            - (r - 1.0) * (2.0 * std::f64::consts::PI).ln()
            - ln_gamma(self.alpha).expect("alpha > 0")
            - ln_gamma(self.beta).expect("beta > 0")
    }

    /// B = (αβ)^r / r^{2r}.
    pub fn b(&self) -> f64 {
        let r = self.r as f64;
        (self.alpha * self.beta).powf(r) / r.powf(2.0 * r)
    }

    /// (χ1, χ2). The ζ² entries of both lists come from one table
    /// (ζ² + i)/r, i = 0..=r, so values shared by χ1 and χ2 (r = 2) are
    /// bit-identical and cancel exactly inside the Meijer G.
    pub fn chi(&self) -> (Vec<f64>, Vec<f64>) {
        let r = self.r as usize;
        let rf = r as f64;
        let zeta: Vec<f64> = (0..=r).map(|i| (self.zeta2 + i as f64) / rf).collect();
        let chi1 = zeta[1..].to_vec();
        let mut chi2 = zeta[..r].to_vec();
        chi2.extend((0..r).map(|i| (self.alpha + i as f64) / rf));
        chi2.extend((0..r).map(|i| (self.beta + i as f64) / rf));
        (chi1, chi2)
    }

    /// Parameters of the CDF's Meijer G at SNR γ (argument Bγ/γ̄).
    pub fn cdf_spec(&self, gamma: f64) -> Result<MeijerGSpec> {
        self.cdf_spec_at(self.b() * gamma / self.gamma_bar_rd)
    }

    /// The CDF's Meijer G parameters at an arbitrary argument.
    pub fn cdf_spec_at(&self, z: f64) -> Result<MeijerGSpec> {
        let r = self.r as usize;
        let (chi1, chi2) = self.chi();
        let mut a = vec![1.0];
        a.extend(chi1);
        let mut b = chi2;
        b.push(0.0);
        MeijerGSpec::new(3 * r, 1, a, b, z)
    }

    /// Parameters of the density's Meijer G at SNR γ.
    pub fn pdf_spec(&self, gamma: f64) -> Result<MeijerGSpec> {
        let z = self.alpha * self.beta * (gamma / self.gamma_bar_rd).powf(1.0 / self.r as f64);
        MeijerGSpec::new(
            3,
            0,
            vec![self.zeta2 + 1.0],
            vec![self.zeta2, self.alpha, self.beta],
            z,
        )
    }
}

pub fn fso_pdf(gamma: f64, params: &FsoHopParams) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("density needs a positive SNR, got {gamma}")));
    }
    let g = meijer_g(&params.pdf_spec(gamma)?)?;
    let ln_coef = params.zeta2.ln()
        - (params.r as f64 * gamma).ln()
        - ln_gamma(params.alpha)?
        - ln_gamma(params.beta)?;
    Ok((ln_coef.exp() * g).max(0.0))
}

pub fn fso_cdf(gamma: f64, params: &FsoHopParams) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::param("gamma", format!("must be nonnegative, got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let g = meijer_g(&params.cdf_spec(gamma)?)?;
    checked_probability("fso_cdf", params.ln_a().exp() * g)
}

pub(crate) fn checked_probability(what: &'static str, v: f64) -> Result<f64> {
    if !(v >= -CDF_SLACK && v <= 1.0 + CDF_SLACK) {
        return Err(Error::ProbabilityOutOfRange { what, value: v });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Sampler for the FSO SNR: γ = γ̄ (X Y U^{1/ζ²})^r with X ~ Gamma(α, 1/α),
/// Y ~ Gamma(β, 1/β) and U uniform on (0, 1).
///
/// U^{1/ζ²} has CDF h^{ζ²} on (0, 1), the pointing-loss law once the
/// beam-geometry constant A0 is divided out.
#[derive(Debug, Clone)]
pub struct FsoSampler {
    params: FsoHopParams,
    x: Gamma<f64>,
    y: Gamma<f64>,
}

impl FsoSampler {
    pub fn new(params: &FsoHopParams) -> Result<Self> {
        params.validate()?;
        let g = |shape: f64| {
            Gamma::new(shape, 1.0 / shape).map_err(|e| Error::param("alpha/beta", e.to_string()))
        };
        Ok(FsoSampler {
            params: *params,
            x: g(params.alpha)?,
            y: g(params.beta)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let ia = self.x.sample(rng) * self.y.sample(rng);
        let u: f64 = Open01.sample(rng);
        transform(&self.params, ia, u)
    }
}

/// γ̄ (I_a · u^{1/ζ²})^r.
pub fn transform(params: &FsoHopParams, ia: f64, u: f64) -> f64 {
    let h = ia * u.powf(1.0 / params.zeta2);
    params.gamma_bar_rd * h.powi(params.r as i32)
}

/// One FSO SNR draw. Builds the Gamma samplers on every call; use
/// [`FsoSampler`] in loops.
pub fn fso_sample<R: Rng + ?Sized>(rng: &mut R, params: &FsoHopParams) -> Result<f64> {
    Ok(FsoSampler::new(params)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: u8) -> FsoHopParams {
        FsoHopParams::new(2.296, 1.822, 1.2, r, 15.0).unwrap()
    }

    #[test]
    fn cdf_matches_reference_values() {
        // mpmath: quadrature of the density from 0 to 7
        assert!((fso_cdf(7.0, &params(1)).unwrap() - 0.637_475_280_940_85).abs() < 1e-10);
        assert!((fso_cdf(7.0, &params(2)).unwrap() - 0.748_735_142_009_23).abs() < 1e-10);
    }

    #[test]
    fn transform_identity_point() {
        let p = params(2);
        assert_eq!(transform(&p, 1.0, 1.0), 15.0);
    }

    #[test]
    fn chi_lists_share_values_bitwise() {
        let p = FsoHopParams::new(3.3, 1.7, 0.7, 2, 1.0).unwrap();
        let (chi1, chi2) = p.chi();
        assert_eq!(chi1[0].to_bits(), chi2[1].to_bits());
        assert_eq!(chi2.len(), 6);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FsoHopParams::new(0.0, 1.0, 1.0, 1, 1.0).is_err());
        assert!(FsoHopParams::new(1.0, 1.0, 1.0, 3, 1.0).is_err());
        assert!(fso_cdf(-1.0, &params(1)).is_err());
    }

    #[test]
    fn out_of_range_probability_is_an_error() {
        assert!(checked_probability("t", 1.0 + 1e-6).is_err());
        assert_eq!(checked_probability("t", 1.0 + 1e-12).unwrap(), 1.0);
        assert_eq!(checked_probability("t", -1e-12).unwrap(), 0.0);
    }
}
