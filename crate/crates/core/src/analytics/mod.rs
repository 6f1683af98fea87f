//! End-to-end metrics of the dual-hop link: outage, average symbol error
//! probability, high-SNR asymptotes and slope extraction.

mod asep;
mod asymptote;

use serde::{Deserialize, Serialize};

use crate::channels::{
    checked_probability, fso_cdf, rf_selected_cdf, rf_selected_cdf_expanded, FsoHopParams,
    RfHopParams,
};
use crate::error::{Error, Result};

pub use asep::{asep_closed, asep_closed_detailed, asep_quadrature, asep_with_cdf, AsepClosed};
pub use asymptote::{
    asymptote, fit_diversity_slope, fso_small_snr_constant, AsymptoteReport, DominantHop,
    SmallSnrConstant,
};

/// Parameters of the conditional symbol error a·Q(√(2bγ)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    pub a: f64,
    pub b: f64,
}

impl Modulation {
    pub const BPSK: Modulation = Modulation { a: 1.0, b: 1.0 };

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("modulation.a", self.a), ("modulation.b", self.b)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(field, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub rf: RfHopParams,
    pub fso: FsoHopParams,
    /// Outage threshold, linear.
    pub gamma_out: f64,
    pub modulation: Modulation,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        self.rf.validate()?;
        self.fso.validate()?;
        self.modulation.validate()?;
        // zero is allowed: the empty outage region
        if !(self.gamma_out >= 0.0) || !self.gamma_out.is_finite() {
            return Err(Error::param("gamma_out", format!("must be nonnegative, got {}", self.gamma_out)));
        }
        Ok(())
    }

    /// Copy with both average SNRs replaced.
    pub fn with_snrs(&self, gamma_bar_ur: f64, gamma_bar_rd: f64) -> Self {
        let mut p = *self;
        p.rf.gamma_bar_ur = gamma_bar_ur;
        p.fso.gamma_bar_rd = gamma_bar_rd;
        p
    }
}

/// CDF of the end-to-end SNR min(γ1, γ2): F1 + F2 − F1 F2.
pub fn e2e_cdf(gamma: f64, params: &SystemParams) -> Result<f64> {
    let f1 = rf_selected_cdf(gamma, &params.rf);
    let f2 = fso_cdf(gamma, &params.fso)?;
    checked_probability("e2e_cdf", f1 + f2 - f1 * f2)
}

/// The same CDF written as (binomial expansion of F1)·(1 − F2) + F2.
pub fn e2e_cdf_expanded(gamma: f64, params: &SystemParams) -> Result<f64> {
    let f2 = fso_cdf(gamma, &params.fso)?;
    let f1 = rf_selected_cdf_expanded(gamma, &params.rf);
    checked_probability("e2e_cdf_expanded", f1 * (1.0 - f2) + f2)
}

/// Outage probability P[γ_D ≤ γ_out].
pub fn outage(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    e2e_cdf(params.gamma_out, params)
}
