//! Sweep configuration as read from JSON. Every SNR-like field carries a
//! `_db` suffix and is converted with γ = 10^{dB/10}.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::{Modulation, SystemParams};
use crate::channels::{FsoHopParams, RfHopParams};
use crate::error::{Error, Result};
use crate::montecarlo::{Combiner, SimPlan, DEFAULT_BATCH_SIZE};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// [`SystemParams`] with its SNRs in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub k: u32,
    pub n: u32,
    pub gamma_bar_ur_db: f64,
    pub alpha: f64,
    pub beta: f64,
    pub zeta2: f64,
    pub r: u8,
    pub gamma_bar_rd_db: f64,
    pub gamma_out_db: f64,
    #[serde(default = "bpsk")]
    pub modulation: Modulation,
}

fn bpsk() -> Modulation {
    Modulation::BPSK
}

impl SystemConfig {
    pub fn to_params(&self) -> Result<SystemParams> {
        for (field, v) in [
            ("gamma_bar_ur_db", self.gamma_bar_ur_db),
            ("gamma_bar_rd_db", self.gamma_bar_rd_db),
            ("gamma_out_db", self.gamma_out_db),
        ] {
            if !v.is_finite() {
                return Err(Error::param(field, format!("must be finite, got {v}")));
            }
        }
        let p = SystemParams {
            rf: RfHopParams {
                k: self.k,
                n: self.n,
                gamma_bar_ur: db_to_linear(self.gamma_bar_ur_db),
            },
            fso: FsoHopParams {
                alpha: self.alpha,
                beta: self.beta,
                zeta2: self.zeta2,
                r: self.r,
                gamma_bar_rd: db_to_linear(self.gamma_bar_rd_db),
            },
            gamma_out: db_to_linear(self.gamma_out_db),
            modulation: self.modulation,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SweepVariable {
    GammaUrDb,
    GammaRdDb,
    /// Both average SNRs set to the sweep value.
    BothDb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeDb {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeDb {
    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::param("range_db", "start and stop must be finite"));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::param("range_db.step", format!("must be positive, got {}", self.step)));
        }
        if !(self.start < self.stop) {
            return Err(Error::param(
                "range_db",
                format!("start {} must be below stop {}", self.start, self.stop),
            ));
        }
        if (self.stop - self.start) / self.step > 100_000.0 {
            return Err(Error::param("range_db.step", "more than 100000 points"));
        }
        Ok(())
    }

    /// start, start + step, ... up to stop inclusive (within 1e-9 step).
    /// Points are start + i·step, not accumulated.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OutputKind {
    OutageAnalytic,
    OutageAsymptotic,
    OutageMc,
    AsepAnalytic,
    AsepQuad,
    AsepMc,
}

impl OutputKind {
    pub const ALL: [OutputKind; 6] = [
        OutputKind::OutageAnalytic,
        OutputKind::OutageAsymptotic,
        OutputKind::OutageMc,
        OutputKind::AsepAnalytic,
        OutputKind::AsepQuad,
        OutputKind::AsepMc,
    ];

    pub fn column(self) -> &'static str {
        match self {
            OutputKind::OutageAnalytic => "outage_analytic",
            OutputKind::OutageAsymptotic => "outage_asymptotic",
            OutputKind::OutageMc => "outage_mc",
            OutputKind::AsepAnalytic => "asep_analytic",
            OutputKind::AsepQuad => "asep_quad",
            OutputKind::AsepMc => "asep_mc",
        }
    }

    pub fn is_mc(self) -> bool {
        matches!(self, OutputKind::OutageMc | OutputKind::AsepMc)
    }

    pub fn is_outage(self) -> bool {
        matches!(
            self,
            OutputKind::OutageAnalytic | OutputKind::OutageAsymptotic | OutputKind::OutageMc
        )
    }
}

/// Monte Carlo settings; unset fields take the defaults below.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combiner: Option<Combiner>,
    /// Raise trials per point until the analytic prediction gives at least
    /// this many events, capped at `max_trials`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_events: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_trials: Option<u64>,
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

impl McOverrides {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn plan(&self, params: SystemParams) -> SimPlan {
        SimPlan {
            batch_size: self.batch_size.unwrap_or(DEFAULT_BATCH_SIZE),
            combiner: self.combiner.unwrap_or_default(),
            ..SimPlan::new(params, self.trials.unwrap_or(DEFAULT_TRIALS), self.seed())
        }
    }

    /// Trial count for a point whose metric is predicted to be `predicted`.
    pub fn trials_for(&self, predicted: f64) -> u64 {
        let base = self.trials.unwrap_or(DEFAULT_TRIALS);
        match self.min_events {
            Some(events) if predicted > 0.0 && predicted.is_finite() => {
                let needed = (events / predicted).ceil();
                let cap = self.max_trials.unwrap_or(u64::MAX) as f64;
                needed.min(cap).max(base as f64) as u64
            }
            _ => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == Some(0) {
            return Err(Error::param("mc.trials", "must be at least 1"));
        }
        if self.batch_size == Some(0) {
            return Err(Error::param("mc.batch_size", "must be at least 1"));
        }
        if let Some(e) = self.min_events {
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::param("mc.min_events", format!("must be positive, got {e}")));
            }
        }
        if let (Some(max), Some(t)) = (self.max_trials, self.trials) {
            if max < t {
                return Err(Error::param("mc.max_trials", format!("{max} is below trials {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Curve name carried into every output row.
    #[serde(default)]
    pub label: String,
    pub base: SystemConfig,
    pub sweep_variable: SweepVariable,
    pub range_db: RangeDb,
    #[serde(default)]
    pub outputs: BTreeSet<OutputKind>,
    #[serde(default)]
    pub mc: Option<McOverrides>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.to_params().map_err(|e| prefix_field("base", e))?;
        self.range_db.validate()?;
        if let Some(mc) = &self.mc {
            mc.validate()?;
        }
        if self.outputs.is_empty() {
            return Err(Error::param("outputs", "no outputs requested"));
        }
        let highest = self.range_db.points().last().copied().unwrap_or(self.range_db.stop);
        let probe = self.params_at(highest).and_then(|p| {
            p.validate()?;
            Ok(p)
        });
        probe.map_err(|e| prefix_field("range_db", e))?;
        Ok(())
    }

    /// (γ̄_ur, γ̄_rd) in dB at sweep value `x_db`.
    pub fn snrs_db_at(&self, x_db: f64) -> (f64, f64) {
        match self.sweep_variable {
            SweepVariable::GammaUrDb => (x_db, self.base.gamma_bar_rd_db),
            SweepVariable::GammaRdDb => (self.base.gamma_bar_ur_db, x_db),
            SweepVariable::BothDb => (x_db, x_db),
        }
    }

    /// Base parameters with the swept SNR set to `x_db`.
    pub fn params_at(&self, x_db: f64) -> Result<SystemParams> {
        let mut base = self.base;
        match self.sweep_variable {
            SweepVariable::GammaUrDb => base.gamma_bar_ur_db = x_db,
            SweepVariable::GammaRdDb => base.gamma_bar_rd_db = x_db,
            SweepVariable::BothDb => {
                base.gamma_bar_ur_db = x_db;
                base.gamma_bar_rd_db = x_db;
            }
        }
        base.to_params()
    }

    pub fn mc(&self) -> McOverrides {
        self.mc.unwrap_or_default()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(compact.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn prefix_field(prefix: &str, e: Error) -> Error {
    match e {
        Error::InvalidParam { field, reason } => Error::InvalidParam {
            field: format!("{prefix}.{field}"),
            reason,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = r#"{
        "label": "k2",
        "base": {"k": 2, "n": 2, "gamma_bar_ur_db": 10, "alpha": 4.2, "beta": 1.4,
                 "zeta2": 1.1, "r": 1, "gamma_bar_rd_db": 30, "gamma_out_db": 0},
        "sweep_variable": "GAMMA_UR_DB",
        "range_db": {"start": 0, "stop": 20, "step": 10},
        "outputs": ["OUTAGE_ANALYTIC", "ASEP_MC"],
        "mc": {"trials": 1000, "seed": 4}
    }"#;

    #[test]
    fn parses_and_converts_db() {
        let c = SweepConfig::from_json(SAMPLE).unwrap();
        c.validate().unwrap();
        assert_eq!(c.range_db.points(), vec![0.0, 10.0, 20.0]);
        let p = c.params_at(20.0).unwrap();
        assert!((p.rf.gamma_bar_ur - 100.0).abs() < 1e-12);
        assert!((p.fso.gamma_bar_rd - 1000.0).abs() < 1e-9);
        assert_eq!(p.gamma_out, 1.0);
        assert_eq!(p.modulation, Modulation::BPSK);
        assert_eq!(c.mc().plan(p).trials, 1000);
    }

    #[test]
    fn linear_snr_field_is_rejected() {
        let bad = SAMPLE.replace("gamma_bar_ur_db", "gamma_bar_ur");
        let err = SweepConfig::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("gamma_bar_ur"), "{err}");
    }

    #[test]
    fn field_level_errors() {
        let mut c = SweepConfig::from_json(SAMPLE).unwrap();
        c.range_db.step = 0.0;
        assert!(matches!(c.validate(), Err(Error::InvalidParam { field, .. }) if field == "range_db.step"));
        let mut c = SweepConfig::from_json(SAMPLE).unwrap();
        c.range_db.stop = -5.0;
        assert!(matches!(c.validate(), Err(Error::InvalidParam { field, .. }) if field == "range_db"));
        let mut c = SweepConfig::from_json(SAMPLE).unwrap();
        c.base.r = 3;
        assert!(matches!(c.validate(), Err(Error::InvalidParam { field, .. }) if field == "base.r"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = SweepConfig::from_json(SAMPLE).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.base.alpha = 4.3;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn point_grid_is_inclusive_and_exact() {
        let r = RangeDb {
            start: 0.0,
            stop: 1.0,
            step: 0.1,
        };
        let p = r.points();
        assert_eq!(p.len(), 11);
        assert_eq!(p[3], 0.30000000000000004);
    }

    #[test]
    fn trial_planning_reaches_event_target() {
        let mc = McOverrides {
            trials: Some(100_000),
            min_events: Some(200.0),
            max_trials: Some(20_000_000),
            ..Default::default()
        };
        assert_eq!(mc.trials_for(0.5), 100_000);
        assert_eq!(mc.trials_for(1e-5), 20_000_000);
        assert_eq!(mc.trials_for(1e-9), 20_000_000);
        for p in [1e-2, 3e-4, 1e-5] {
            assert!(mc.trials_for(p) as f64 * p >= 100.0);
        }
    }
}
