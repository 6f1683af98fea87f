//! Figure-reproduction presets.
//!
//! The channel values below are chosen defaults, not fitted to any
//! reference curves: α = 4.2, β = 1.4 (moderate turbulence), ζ² = 1.1, r = 1,
//! γ_out = 0 dB. Monte Carlo columns raise their trial count per point to
//! expect 200 events, capped at 2·10^7, so no row down to P_out = 1e-5 is
//! flagged low-count.

use std::collections::BTreeSet;

use super::config::{McOverrides, OutputKind, RangeDb, SweepConfig, SweepVariable, SystemConfig};
use crate::analytics::Modulation;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 4.2;
pub const DEFAULT_BETA: f64 = 1.4;
pub const DEFAULT_ZETA2: f64 = 1.1;
pub const DEFAULT_R: u8 = 1;
pub const FIGURE_SEED: u64 = 2021;

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub name: String,
    pub description: String,
    pub curves: Vec<SweepConfig>,
}

fn base(k: u32, n: u32) -> SystemConfig {
    SystemConfig {
        k,
        n,
        gamma_bar_ur_db: 0.0,
        alpha: DEFAULT_ALPHA,
        beta: DEFAULT_BETA,
        zeta2: DEFAULT_ZETA2,
        r: DEFAULT_R,
        gamma_bar_rd_db: 40.0,
        gamma_out_db: 0.0,
        modulation: Modulation::BPSK,
    }
}

fn mc() -> Option<McOverrides> {
    Some(McOverrides {
        trials: Some(100_000),
        seed: Some(FIGURE_SEED),
        min_events: Some(200.0),
        max_trials: Some(20_000_000),
        ..Default::default()
    })
}

fn curve(
    label: String,
    base: SystemConfig,
    sweep_variable: SweepVariable,
    range: (f64, f64, f64),
    outputs: &[OutputKind],
) -> SweepConfig {
    SweepConfig {
        label,
        base,
        sweep_variable,
        range_db: RangeDb {
            start: range.0,
            stop: range.1,
            step: range.2,
        },
        outputs: outputs.iter().copied().collect::<BTreeSet<_>>(),
        mc: mc(),
    }
}

const OUTAGE: [OutputKind; 3] = [
    OutputKind::OutageAnalytic,
    OutputKind::OutageAsymptotic,
    OutputKind::OutageMc,
];
const ASEP: [OutputKind; 2] = [OutputKind::AsepAnalytic, OutputKind::AsepMc];

fn outage_vs_ur(pairs: &[(u32, u32)]) -> Vec<SweepConfig> {
    pairs
        .iter()
        .map(|&(k, n)| {
            curve(
                format!("K={k},N={n}"),
                base(k, n),
                SweepVariable::GammaUrDb,
                (0.0, 50.0, 2.5),
                &OUTAGE,
            )
        })
        .collect()
}

/// Presets 1 to 5.
pub fn figure_preset(n: u8) -> Result<FigurePreset> {
    let (description, curves) = match n {
        1 => (
            "outage vs average RF SNR for K = 1, 2, 3 sources (N = 2), FSO SNR fixed at 40 dB",
            outage_vs_ur(&[(1, 2), (2, 2), (3, 2)]),
        ),
        2 => (
            "outage vs average RF SNR for N = 1, 2, 3 elements (K = 2), FSO SNR fixed at 40 dB",
            outage_vs_ur(&[(2, 1), (2, 2), (2, 3)]),
        ),
        3 => (
            "outage vs average RF SNR for (K, N) = (1,1), (2,1), (1,2), (2,2), FSO SNR fixed at 40 dB",
            outage_vs_ur(&[(1, 1), (2, 1), (1, 2), (2, 2)]),
        ),
        4 => {
            let fso = [(4.2, 1.4, 0.9), (4.2, 1.4, 1.1), (4.2, 1.4, 3.0), (8.0, 6.0, 0.9)];
            let curves = fso
                .iter()
                .map(|&(alpha, beta, zeta2)| {
                    let mut b = base(2, 2);
                    b.gamma_bar_ur_db = 40.0;
                    b.alpha = alpha;
                    b.beta = beta;
                    b.zeta2 = zeta2;
                    curve(
                        format!("alpha={alpha},beta={beta},zeta2={zeta2}"),
                        b,
                        SweepVariable::GammaRdDb,
                        (0.0, 50.0, 5.0),
                        &ASEP,
                    )
                })
                .collect();
            (
                "BPSK error probability vs average FSO SNR for several turbulence and pointing settings, RF SNR fixed at 40 dB (K = N = 2)",
                curves,
            )
        }
        5 => {
            let mut curves = vec![];
            for k in [1, 2] {
                for (name, m) in [("BPSK", Modulation::BPSK), ("a=1,b=0.5", Modulation { a: 1.0, b: 0.5 })] {
                    let mut b = base(k, 1);
                    b.gamma_bar_rd_db = 60.0;
                    b.modulation = m;
                    curves.push(curve(
                        format!("K={k},{name}"),
                        b,
                        SweepVariable::GammaUrDb,
                        (0.0, 40.0, 2.5),
                        &ASEP,
                    ));
                }
            }
            (
                "error probability vs average RF SNR for (a, b) = (1, 1) and (1, 0.5), K = 1, 2, FSO SNR fixed at 60 dB",
                curves,
            )
        }
        other => return Err(Error::param("figure", format!("expected 1 to 5, got {other}"))),
    };
    Ok(FigurePreset {
        name: format!("fig{n}"),
        description: description.to_string(),
        curves,
    })
}
