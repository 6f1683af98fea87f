//! Gamma-family special functions and the Meijer G-function.

mod dd;
mod gamma;
mod meijer;

pub use gamma::{gamma, ln_gamma, ln_gamma_complex, ln_gamma_signed, sin_pi};
pub use meijer::{
    contour_abscissa, contour_plan, meijer_g, meijer_g_contour, meijer_g_perturbed, meijer_g_series, meijer_g_series_estimate,
    pole_leading_coefficient, ContourPlan, MeijerGSpec, PoleLayout, COLLISION_TOL, MAX_SERIES_TERMS,
    LAST_RESORT_ACCEPT, PERTURBATION, SERIES_ACCEPT,
};

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// ln C(n, k).
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    assert!(k <= n);
    let lg = |x: u32| ln_gamma(x as f64 + 1.0).expect("positive argument");
    lg(n) - lg(k) - lg(n - k)
}
