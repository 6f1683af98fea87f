//! RIS-assisted RF hop with opportunistic selection among K sources.
//!
//! With perfect phase alignment a source's SNR is γ̄ (Σ_{i=1}^{N} a_i)² with
//! a_i Rayleigh, E[a_i²] = 1. Its law is approximated by a Gamma
//! distribution of shape N and scale Cγ̄, C = 1 + (N − 1)π/4, which matches
//! the first moment exactly. The selected SNR is the maximum over sources.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfHopParams {
    /// Number of sources.
    pub k: u32,
    /// Reflecting elements per source.
    pub n: u32,
    /// Average per-hop SNR, linear.
    pub gamma_bar_ur: f64,
}

impl RfHopParams {
    pub fn new(k: u32, n: u32, gamma_bar_ur: f64) -> Result<Self> {
        let p = RfHopParams { k, n, gamma_bar_ur };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        if !(self.gamma_bar_ur > 0.0) || !self.gamma_bar_ur.is_finite() {
            return Err(Error::param("gamma_bar_ur", format!("must be positive, got {}", self.gamma_bar_ur)));
        }
        Ok(())
    }

    /// C = 1 + (N − 1) Γ(3/2)².
    pub fn c(&self) -> f64 {
        1.0 + (self.n as f64 - 1.0) * std::f64::consts::FRAC_PI_4
    }

    /// Scale Cγ̄ of the Gamma approximation.
    pub fn scale(&self) -> f64 {
        self.c() * self.gamma_bar_ur
    }
}

/// Regularized lower incomplete gamma P(n, x) for integer n ≥ 1.
pub(crate) fn regularized_gamma_p(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    let nf = n as f64;
    // e^{-x} x^n / n!, directly when representable (a log round trip costs
    // |ln| ulps)
    let ln_lead = nf * x.ln() - x - ln_gamma(nf + 1.0).expect("positive argument");
    let direct = (1..=n).fold((-x).exp(), |acc, i| acc * x / i as f64);
    let lead = if direct.is_normal() { direct } else { ln_lead.exp() };
    if x < nf + 1.0 {
        // P = e^{-x} x^n/n! Σ_k x^k / ((n+1)···(n+k)), no cancellation
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= x / (nf + k);
            sum += term;
            k += 1.0;
        }
        (lead * sum).min(1.0)
    } else {
        // Q = e^{-x} Σ_{i<n} x^i / i!, summed downward from the largest term
        let mut term = lead * nf / x; // e^{-x} x^{n-1}/(n-1)!
        let mut q = 0.0;
        let mut i = nf - 1.0;
        loop {
            q += term;
            if i == 0.0 || term < 1e-17 * q {
                break;
            }
            term *= i / x;
            i -= 1.0;
        }
        (1.0 - q).max(0.0)
    }
}

/// CDF of a single source's SNR (Gamma approximation; exact for N = 1).
pub fn rf_single_cdf(gamma: f64, params: &RfHopParams) -> f64 {
    regularized_gamma_p(params.n, gamma / params.scale())
}

/// Density of a single source's SNR.
pub fn rf_single_pdf(gamma: f64, params: &RfHopParams) -> f64 {
    if gamma <= 0.0 {
        return if params.n == 1 { 1.0 / params.scale() } else { 0.0 };
    }
    let nf = params.n as f64;
    let theta = params.scale();
    let x = gamma / theta;
    ((nf - 1.0) * x.ln() - x - ln_gamma(nf).expect("positive argument")).exp() / theta
}

/// CDF of the selected (maximum) SNR, F_single^K.
pub fn rf_selected_cdf(gamma: f64, params: &RfHopParams) -> f64 {
    rf_single_cdf(gamma, params).powi(params.k as i32)
}

/// Density of the selected SNR, K F^{K−1} f.
pub fn rf_selected_pdf(gamma: f64, params: &RfHopParams) -> f64 {
    let k = params.k as i32;
    k as f64 * rf_single_cdf(gamma, params).powi(k - 1) * rf_single_pdf(gamma, params)
}

/// Coefficients of (Σ_{j=0}^{N−1} x^j / j!)^k.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeWeights {
    pub k: u32,
    /// c_s for s = 0 ..= k(N − 1).
    pub coeffs: Vec<f64>,
}

impl DegreeWeights {
    /// Σ_s c_s x^s.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Collapses the k-fold sum Σ_{j_1..j_k < N} x^{Σj}/Π j_n! into a single
/// polynomial by repeated convolution.
pub fn degree_weights(k: u32, n: u32) -> DegreeWeights {
    assert!(n >= 1, "N must be at least 1");
    let base: Vec<f64> = (0..n)
        .scan(1.0, |f, j| {
            let c = *f;
            *f /= (j + 1) as f64;
            Some(c)
        })
        .collect();
    let mut coeffs = vec![1.0];
    for _ in 0..k {
        let mut next = vec![0.0; coeffs.len() + base.len() - 1];
        for (i, a) in coeffs.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        coeffs = next;
    }
    DegreeWeights { k, coeffs }
}

/// F_single^K written as Σ_k C(K,k)(−1)^k e^{−kx} Σ_s c_s^{(k)} x^s,
/// x = γ/(Cγ̄). Algebraically identical to [`rf_selected_cdf`]; the same
/// expansion drives the closed-form ASEP.
pub fn rf_selected_cdf_expanded(gamma: f64, params: &RfHopParams) -> f64 {
    let x = gamma / params.scale();
    let kk = params.k;
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..=kk {
        let w = degree_weights(k, params.n);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binom * (-(k as f64) * x).exp() * w.eval(x);
        binom = binom * (kk - k) as f64 / (k + 1) as f64;
    }
    total
}

/// One draw of the selected SNR from the exact sum-of-Rayleigh model.
pub fn rf_sample<R: Rng + ?Sized>(rng: &mut R, params: &RfHopParams) -> f64 {
    let mut best = 0.0f64;
    for _ in 0..params.k {
        let mut amp = 0.0;
        for _ in 0..params.n {
            // Rayleigh with E[a²] = 1: a² ~ Exp(1)
            let e: f64 = Exp1.sample(rng);
            amp += e.sqrt();
        }
        best = best.max(params.gamma_bar_ur * amp * amp);
    }
    best
}
