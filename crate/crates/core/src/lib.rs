//! Performance analysis of K RIS-assisted RF sources with opportunistic
//! scheduling, a decode-and-forward relay, and a Gamma-Gamma FSO link with
//! pointing errors.
//!
//! * [`specfun`]: log-gamma and Meijer G (residue series + contour oracle)
//! * [`channels`]: hop CDFs/PDFs and matched samplers
//! * [`analytics`]: outage, ASEP, asymptotes, slope fitting
//! * [`montecarlo`]: seeded parallel simulation with confidence intervals
//! * [`cli`]: configuration, sweeps, figure presets, validation and result files
//! * [`stats`]: confidence intervals and Kolmogorov-Smirnov distances

pub mod analytics;
pub mod channels;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod quad;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
