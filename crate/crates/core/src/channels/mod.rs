//! Hop SNR distributions and matched samplers.

mod fso;
mod rf;

use rand::Rng;

pub use fso::{
    fso_cdf, fso_pdf, fso_sample, transform as fso_transform, FsoHopParams, FsoSampler, CDF_SLACK,
};
pub(crate) use fso::checked_probability;
pub use rf::{
    degree_weights, rf_sample, rf_selected_cdf, rf_selected_cdf_expanded, rf_selected_pdf,
    rf_single_cdf, rf_single_pdf, DegreeWeights, RfHopParams,
};

use crate::error::Result;

/// A hop's analytic law together with a sampler that realizes it (exactly
/// for the FSO hop, physically for the RF hop, whose CDF is approximate).
pub trait HopDistribution {
    fn cdf(&self, gamma: f64) -> Result<f64>;
    fn pdf(&self, gamma: f64) -> Result<f64>;
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

/// The selected RF hop.
#[derive(Debug, Clone, Copy)]
pub struct RfHop(pub RfHopParams);

impl HopDistribution for RfHop {
    fn cdf(&self, gamma: f64) -> Result<f64> {
        Ok(rf_selected_cdf(gamma, &self.0))
    }

    fn pdf(&self, gamma: f64) -> Result<f64> {
        Ok(rf_selected_pdf(gamma, &self.0))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rf_sample(rng, &self.0)
    }
}

/// The FSO hop with a prepared sampler.
#[derive(Debug, Clone)]
pub struct FsoHop {
    pub params: FsoHopParams,
    sampler: FsoSampler,
}

impl FsoHop {
    pub fn new(params: FsoHopParams) -> Result<Self> {
        Ok(FsoHop {
            sampler: FsoSampler::new(&params)?,
            params,
        })
    }
}

impl HopDistribution for FsoHop {
    fn cdf(&self, gamma: f64) -> Result<f64> {
        fso_cdf(gamma, &self.params)
    }

    fn pdf(&self, gamma: f64) -> Result<f64> {
        fso_pdf(gamma, &self.params)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler.sample(rng)
    }
}
