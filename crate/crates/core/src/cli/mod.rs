//! Configuration, sweeps, figure presets, the validation suite and result
//! files for the `risfso` command.

pub mod config;
pub mod output;
pub mod presets;
pub mod sweep;
pub mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analytics::{asymptote, AsymptoteReport, DominantHop, SystemParams};
use crate::error::Result;

pub use config::{McOverrides, OutputKind, RangeDb, SweepConfig, SweepVariable, SystemConfig};
pub use output::{read_csv, read_json, to_csv_string, to_json_string, write_csv};
pub use presets::{figure_preset, FigurePreset};
pub use sweep::{run_sweep, run_sweeps, ResultTable, Row};
pub use validate::{run_validation, Check, ValidateOptions, ValidationReport};

/// High-SNR summary of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteSummary {
    pub params: SystemParams,
    pub report: AsymptoteReport,
}

pub fn report_asymptote(params: &SystemParams) -> Result<AsymptoteSummary> {
    Ok(AsymptoteSummary {
        params: *params,
        report: asymptote(params)?,
    })
}

impl fmt::Display for AsymptoteSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.report;
        let p = &self.params;
        writeln!(
            f,
            "K = {}, N = {}, alpha = {}, beta = {}, zeta2 = {}, r = {}",
            p.rf.k, p.rf.n, p.fso.alpha, p.fso.beta, p.fso.zeta2, p.fso.r
        )?;
        writeln!(f, "diversity order G_d: {}", r.diversity_order)?;
        let hop = match r.dominant_hop {
            DominantHop::Rf => "RF (first hop)",
            DominantHop::Fso => "FSO (second hop)",
            DominantHop::Tie => "TIE (both hops decay at the same rate)",
        };
        writeln!(f, "dominant hop: {hop}")?;
        match r.coding_gain {
            Some(g) => writeln!(f, "coding gain G_c: {g:.10e}")?,
            None => writeln!(f, "coding gain G_c: undefined")?,
        }
        writeln!(f, "RF exponent KN: {}, RF coding gain: {:.10e}", r.rf_exponent, r.rf_coding_gain)?;
        writeln!(
            f,
            "FSO exponent nu/r: {}, FSO coding gain: {:.10e}",
            r.fso_exponent, r.fso_coding_gain
        )?;
        write!(f, "Upsilon: {:.10e}", r.upsilon)?;
        if r.fso_leading.near_degenerate {
            write!(
                f,
                "\ncoincident poles: FSO outage ~ t^{}(Upsilon + {:.10e} ln t)",
                r.fso_exponent, r.fso_leading.log_coefficient
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<28} metric {:.3e} (tolerance {:.1e})  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.metric,
                c.tolerance,
                c.detail
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}
