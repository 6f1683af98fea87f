//! High-SNR behaviour: P_out ≈ (G_c,1 γ̄_ur)^{−KN} + (G_c,2 γ̄_rd)^{−ν/r}.

use serde::{Deserialize, Serialize};

use super::SystemParams;
use crate::channels::FsoHopParams;
use crate::error::{Error, Result};
use crate::specfun::{ln_gamma, pole_leading_coefficient, MeijerGSpec, PERTURBATION};

/// Poles closer than this to the dominant one are treated as coincident.
const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominantHop {
    Rf,
    Fso,
    Tie,
}

/// F_FSO(γ) ≈ Υ (γ/γ̄_rd)^{exponent} as γ/γ̄_rd → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallSnrConstant {
    pub upsilon: f64,
    /// ν/r.
    pub exponent: f64,
    /// Another pole lies within 1e-6 of ν/r. The leading term is then
    /// (γ/γ̄)^{ν/r} (Υ + L ln(γ/γ̄)) with both constants taken from the
    /// perturbation-averaged cluster of residues.
    pub near_degenerate: bool,
    /// L above; zero for a simple pole.
    pub log_coefficient: f64,
}

impl SmallSnrConstant {
    /// Leading-order F_FSO at t = γ/γ̄_rd.
    pub fn eval(&self, t: f64) -> f64 {
        t.powf(self.exponent) * (self.upsilon + self.log_coefficient * t.ln())
    }
}

/// Leading small-argument term of the FSO CDF, from the residue of the
/// smallest lower parameter ν/r.
pub fn fso_small_snr_constant(fso: &FsoHopParams) -> Result<SmallSnrConstant> {
    fso.validate()?;
    let spec = fso.cdf_spec_at(1.0)?;
    let m = spec.m;
    let h = (0..m)
        .min_by(|&i, &j| spec.b[i].total_cmp(&spec.b[j]))
        .expect("m ≥ 3");
    let exponent = spec.b[h];
    let cluster: Vec<usize> = (0..m)
        .filter(|&j| j != h && (spec.b[j] - exponent).abs() < DEGENERACY_TOL)
        .collect();
    let ln_a = fso.ln_a();
    let ln_b = fso.b().ln();
    // Σ_j A c_j B^{b_j} t^{b_j} = t^{b_h} Σ_j w_j (1 + (b_j − b_h) ln t + …);
    // returns (Σ w_j, Σ w_j (b_j − b_h))
    let cluster_sums = |spec: &MeijerGSpec, members: &[usize]| -> Result<(f64, f64)> {
        let (mut total, mut slope) = (0.0, 0.0);
        for &j in members {
            let (ln_c, sign) = pole_leading_coefficient(spec, j)?;
            let w = sign * (ln_a + ln_c + spec.b[j] * ln_b).exp();
            total += w;
            slope += w * (spec.b[j] - exponent);
        }
        Ok((total, slope))
    };
    if cluster.is_empty() {
        return Ok(SmallSnrConstant {
            upsilon: cluster_sums(&spec, &[h])?.0,
            exponent,
            near_degenerate: false,
            log_coefficient: 0.0,
        });
    }
    let mut members = vec![h];
    members.extend(&cluster);
    let (mut upsilon, mut log_coefficient) = (0.0, 0.0);
    for sign in [1.0, -1.0] {
        let mut shifted = spec.clone();
        for (rank, &j) in cluster.iter().enumerate() {
            shifted.b[j] = exponent + sign * (rank + 1) as f64 * PERTURBATION;
        }
        let (total, slope) = cluster_sums(&shifted, &members)?;
        upsilon += 0.5 * total;
        log_coefficient += 0.5 * slope;
    }
    Ok(SmallSnrConstant {
        upsilon,
        exponent,
        near_degenerate: true,
        log_coefficient,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteReport {
    /// min(KN, ν/r).
    pub diversity_order: f64,
    /// Coding gain of the dominant hop; `None` on a tie or when the
    /// dominant FSO term carries a logarithm.
    pub coding_gain: Option<f64>,
    pub dominant_hop: DominantHop,
    pub upsilon: f64,
    /// Leading FSO term including any logarithmic correction.
    pub fso_leading: SmallSnrConstant,
    pub gamma_out: f64,
    /// KN.
    pub rf_exponent: f64,
    /// ν/r.
    pub fso_exponent: f64,
    /// C (N!)^{1/N} / γ_out.
    pub rf_coding_gain: f64,
    /// Υ^{−r/ν} / γ_out; NaN when the FSO term is not a pure power law.
    pub fso_coding_gain: f64,
}

impl AsymptoteReport {
    /// (G_c,1 γ̄_ur)^{−KN}.
    pub fn first_hop_term_at(&self, gamma_bar_ur: f64) -> f64 {
        (-self.rf_exponent * (self.rf_coding_gain * gamma_bar_ur).ln()).exp()
    }

    /// Υ (γ_out/γ̄_rd)^{ν/r} = (G_c,2 γ̄_rd)^{−ν/r}, with the logarithmic
    /// correction when poles coincide.
    pub fn second_hop_term_at(&self, gamma_bar_rd: f64) -> f64 {
        self.fso_leading.eval(self.gamma_out / gamma_bar_rd)
    }

    /// Asymptotic outage, the sum of both hop terms.
    pub fn outage_at(&self, gamma_bar_ur: f64, gamma_bar_rd: f64) -> f64 {
        self.first_hop_term_at(gamma_bar_ur) + self.second_hop_term_at(gamma_bar_rd)
    }
}

pub fn asymptote(params: &SystemParams) -> Result<AsymptoteReport> {
    params.validate()?;
    if params.gamma_out == 0.0 {
        return Err(Error::param("gamma_out", "asymptotes need a positive threshold"));
    }
    let (k, n) = (params.rf.k as f64, params.rf.n as f64);
    let small = fso_small_snr_constant(&params.fso)?;
    let rf_exponent = k * n;
    let fso_exponent = small.exponent;
    let ln_n_fact = ln_gamma(n + 1.0)?;
    let rf_coding_gain = params.rf.c() * (ln_n_fact / n).exp() / params.gamma_out;
    let fso_coding_gain = if small.near_degenerate || !(small.upsilon > 0.0) {
        f64::NAN
    } else {
        small.upsilon.powf(-1.0 / fso_exponent) / params.gamma_out
    };
    let dominant_hop = if rf_exponent < fso_exponent {
        DominantHop::Rf
    } else if fso_exponent < rf_exponent {
        DominantHop::Fso
    } else {
        DominantHop::Tie
    };
    let coding_gain = match dominant_hop {
        DominantHop::Rf => Some(rf_coding_gain),
        DominantHop::Fso => Some(fso_coding_gain).filter(|g| g.is_finite()),
        DominantHop::Tie => None,
    };
    Ok(AsymptoteReport {
        diversity_order: rf_exponent.min(fso_exponent),
        coding_gain,
        dominant_hop,
        upsilon: small.upsilon,
        fso_leading: small,
        gamma_out: params.gamma_out,
        rf_exponent,
        fso_exponent,
        rf_coding_gain,
        fso_coding_gain,
    })
}

/// Negated least-squares slope of log10 P against SNR_dB/10.
pub fn fit_diversity_slope(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 points, got {}", curve.len())));
    }
    if let Some(&(s, p)) = curve.iter().find(|(s, p)| !(*p > 0.0) || !p.is_finite() || !s.is_finite()) {
        return Err(Error::DegenerateFit(format!("unusable point ({s} dB, {p})")));
    }
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::DegenerateFit("SNRs must be strictly increasing".into()));
    }
    let n = curve.len() as f64;
    let xs: Vec<f64> = curve.iter().map(|(s, _)| s / 10.0).collect();
    let ys: Vec<f64> = curve.iter().map(|(_, p)| p.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("no spread in SNR".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_slope() {
        let curve: Vec<(f64, f64)> = (0..8)
            .map(|i| {
                let s = 10.0 + 2.5 * i as f64;
                (s, 10f64.powf(s / 10.0).powf(-2.0))
            })
            .collect();
        assert!((fit_diversity_slope(&curve).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_fits_are_rejected() {
        assert!(fit_diversity_slope(&[(0.0, 0.1), (1.0, 0.01), (2.0, 0.001)]).is_err());
        assert!(fit_diversity_slope(&[(0.0, 0.1), (1.0, 0.0), (2.0, 0.1), (3.0, 0.1)]).is_err());
        assert!(fit_diversity_slope(&[(0.0, 0.1), (0.0, 0.1), (2.0, 0.1), (3.0, 0.1)]).is_err());
    }
}
