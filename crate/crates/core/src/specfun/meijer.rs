//! Meijer G-function for real positive arguments.
//!
//! ```text
//!                1   ⌠  Π_{j≤m} Γ(b_j − s) Π_{j≤n} Γ(1 − a_j + s)
//! G^{m,n}_{p,q} = ── │  ───────────────────────────────────────────── z^s ds
//!                2πi ⌡L Π_{j>m} Γ(1 − b_j + s) Π_{j>n} Γ(a_j − s)
//! ```
//!
//! Two independent evaluators are provided: the residue series over the
//! right-hand poles s = b_h + ℓ (exact for p < q, and for p = q when z < 1),
//! and direct quadrature along a vertical contour. [`meijer_g`] dispatches
//! between them and handles coincident poles by symmetric perturbation.

use num_complex::Complex64;

use super::dd::Dd;
use super::gamma::{gamma_direct, ln_gamma_complex, ln_gamma_signed, ln_gamma_signed_dd, ln_rgamma_signed};
use crate::error::{Error, Result};
use crate::quad::{integrate_panels, QuadOptions};

/// Two lower parameters collide when their difference is this close to an integer.
pub const COLLISION_TOL: f64 = 1e-9;
/// Offset applied to colliding lower parameters.
pub const PERTURBATION: f64 = 1e-5;
/// Per-pole term budget for the residue series.
pub const MAX_SERIES_TERMS: usize = 500;
/// Relative term size at which a pole's series is truncated.
pub const SERIES_TRUNCATION: f64 = 1e-16;
/// Largest estimated relative rounding error the series may return.
pub const SERIES_ACCEPT: f64 = 1e-9;
/// Relative error estimate accepted from the better path when neither
/// meets its own target.
pub const LAST_RESORT_ACCEPT: f64 = 1e-6;
/// Contour tails are dropped where the integrand is this far below its peak.
pub const CONTOUR_TAIL: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub z: f64,
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>, z: f64) -> Result<Self> {
        let spec = MeijerGSpec { m, n, a, b, z };
        spec.validate()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = (self.p(), self.q());
        if self.n > p || self.m > q {
            return Err(Error::InvalidMeijer(format!(
                "orders (m={}, n={}) exceed (p={p}, q={q})",
                self.m, self.n
            )));
        }
        if p > q {
            return Err(Error::InvalidMeijer(format!("p = {p} > q = {q} is not supported")));
        }
        if self.m == 0 {
            return Err(Error::InvalidMeijer("m = 0 is not supported".into()));
        }
        if !(self.z > 0.0) || !self.z.is_finite() {
            return Err(Error::InvalidMeijer(format!("argument z = {} must be positive", self.z)));
        }
        if self.a.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeijer("non-finite parameter".into()));
        }
        Ok(())
    }

    /// Equivalent lower-order function with exactly cancelling Gamma pairs
    /// removed: Γ(b_h − s)/Γ(a_j − s) with h < m, j ≥ n, and
    /// Γ(1 − a_j + s)/Γ(1 − b_h + s) with j < n, h ≥ m, whenever a_j = b_h.
    pub fn reduced(&self) -> Self {
        let mut out = self.clone();
        loop {
            let pair = (out.n..out.p())
                .find_map(|j| (0..out.m).find(|&h| out.a[j] == out.b[h]).map(|h| (j, h)))
                .filter(|_| out.m > 1);
            if let Some((j, h)) = pair {
                out.a.remove(j);
                out.b.remove(h);
                out.m -= 1;
                continue;
            }
            let pair = (0..out.n)
                .find_map(|j| (out.m..out.q()).find(|&h| out.a[j] == out.b[h]).map(|h| (j, h)));
            if let Some((j, h)) = pair {
                out.a.remove(j);
                out.b.remove(h);
                out.n -= 1;
                continue;
            }
            return out;
        }
    }

    /// Same orders and parameters at a different argument.
    pub fn with_z(&self, z: f64) -> Self {
        MeijerGSpec { z, ..self.clone() }
    }
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < COLLISION_TOL
}

fn exact_nonpositive_integer(x: Dd) -> Option<i64> {
    let k = x.hi.round();
    (k <= 0.0 && (x - Dd::new(k)).to_f64() == 0.0).then_some(k as i64)
}

/// Right-hand pole families and their integer-spaced collisions.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleLayout {
    /// (b_j, true when b_j is alone in its collision group), j < m.
    pub simple_poles: Vec<(f64, bool)>,
    /// Disjoint groups of lower-parameter indices covering 0..m.
    pub collision_groups: Vec<Vec<usize>>,
}

impl PoleLayout {
    pub fn of(spec: &MeijerGSpec) -> Self {
        let m = spec.m;
        let mut parent: Vec<usize> = (0..m).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if near_integer(spec.b[i] - spec.b[j]) {
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    if ri != rj {
                        parent[rj.max(ri)] = rj.min(ri);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_of_root = vec![usize::MAX; m];
        for i in 0..m {
            let r = root(&mut parent, i);
            if group_of_root[r] == usize::MAX {
                group_of_root[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[group_of_root[r]].push(i);
        }
        let simple_poles = (0..m)
            .map(|i| {
                let g = &groups[group_of_root[root(&mut parent, i)]];
                (spec.b[i], g.len() == 1)
            })
            .collect();
        PoleLayout {
            simple_poles,
            collision_groups: groups,
        }
    }

    pub fn is_collision_free(&self) -> bool {
        self.collision_groups.iter().all(|g| g.len() == 1)
    }
}

/// Coefficient of z^{b_h} in the residue expansion (the leading small-z
/// term of pole family h), as (ln |c|, sign). Sign 0 means the family
/// vanishes identically.
pub fn pole_leading_coefficient(spec: &MeijerGSpec, h: usize) -> Result<(f64, f64)> {
    term_at(spec, h, 0).map(|(l, s)| (l - spec.b[h] * spec.z.ln(), s))
}

/// ln |term_ℓ| and its sign for pole family h, including z^{b_h + ℓ}.
fn term_at(spec: &MeijerGSpec, h: usize, l: usize) -> Result<(f64, f64)> {
    let bh = spec.b[h];
    let lf = l as f64;
    // arguments are formed in double-double: near-coincident parameters put
    // them close to poles, where relative accuracy depends on the offset
    let arg = |x: f64, y: f64, c: f64| Dd::new(x) - Dd::new(y) + Dd::new(c);
    let mut ln = 0.0;
    let mut sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    for j in 0..spec.m {
        if j == h {
            continue;
        }
        let (v, s) = ln_gamma_signed_dd(arg(spec.b[j], bh, -lf)).map_err(|_| Error::PoleCollision {
            i: h,
            j,
            bi: bh,
            bj: spec.b[j],
        })?;
        ln += v;
        sign *= s;
    }
    for j in 0..spec.n {
        let (v, s) = ln_gamma_signed_dd(arg(bh, spec.a[j], 1.0 + lf)).map_err(|_| {
            Error::SeriesRejected(format!("upper parameter a_{j} = {} overlaps pole b_{h}", spec.a[j]))
        })?;
        ln += v;
        sign *= s;
    }
    for j in spec.m..spec.q() {
        let (v, s) = ln_rgamma_signed(arg(bh, spec.b[j], 1.0 + lf));
        ln += v;
        sign *= s;
    }
    for j in spec.n..spec.p() {
        let (v, s) = ln_rgamma_signed(arg(spec.a[j], bh, -lf));
        ln += v;
        sign *= s;
    }
    let (lfact, _) = ln_gamma_signed(lf + 1.0)?;
    ln += -lfact + (bh + lf) * spec.z.ln();
    Ok((ln, sign))
}

/// term_ℓ of pole family h as a plain product of directly evaluated Gamma
/// values, with a relative error bound. `None` when a factor falls outside
/// the direct range or the product leaves the double range.
fn term_direct(spec: &MeijerGSpec, h: usize, l: usize) -> Option<(f64, f64)> {
    let bh = spec.b[h];
    let lf = l as f64;
    let arg = |x: f64, y: f64, c: f64| Dd::new(x) - Dd::new(y) + Dd::new(c);
    let mut num = Dd::new(if l % 2 == 0 { 1.0 } else { -1.0 });
    let mut den = Dd::new(1.0);
    let mut ulps = 0.0;
    for j in (0..spec.m).filter(|&j| j != h) {
        let (g, u) = gamma_direct(arg(spec.b[j], bh, -lf))?;
        num = num * g;
        ulps += u * u;
    }
    for j in 0..spec.n {
        let (g, u) = gamma_direct(arg(bh, spec.a[j], 1.0 + lf))?;
        num = num * g;
        ulps += u * u;
    }
    for j in spec.m..spec.q() {
        let (g, u) = gamma_direct(arg(bh, spec.b[j], 1.0 + lf))?;
        den = den * g;
        ulps += u * u;
    }
    for j in spec.n..spec.p() {
        let (g, u) = gamma_direct(arg(spec.a[j], bh, -lf))?;
        den = den * g;
        ulps += u * u;
    }
    let (g, u) = gamma_direct(Dd::new(lf + 1.0))?;
    den = den * g;
    ulps += u * u;
    let v = (num / den).to_f64() * spec.z.powf(bh + lf);
    // powf carries ~1 ulp; a rounded exponent b_h + ℓ adds |(b_h + ℓ) ln z| / 2
    ulps += 1.5 * 1.5;
    if l > 0 {
        ulps += (0.5 * (bh + lf) * spec.z.ln()).powi(2);
    }
    if v.is_finite() && v.abs() > 1e-290 {
        Some((v, ulps.sqrt()))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy)]
struct SeriesOutcome {
    value: f64,
    err: f64,
}

fn check_series_domain(spec: &MeijerGSpec) -> Result<()> {
    let sigma = spec.q() - spec.p();
    if sigma == 0 {
        if spec.z >= 1.0 {
            return Err(Error::SeriesRejected(format!(
                "p = q series diverges for z = {} ≥ 1",
                spec.z
            )));
        }
    } else {
        let growth = sigma as f64 * spec.z.powf(1.0 / sigma as f64);
        if growth > 40.0 {
            return Err(Error::SeriesRejected(format!(
                "argument z = {} too large for the residue series",
                spec.z
            )));
        }
    }
    Ok(())
}

fn pole_series(spec: &MeijerGSpec, h: usize) -> Result<SeriesOutcome> {
    let (p, q) = (spec.p(), spec.q());
    let bh = spec.b[h];

    // Exact tests only: a family whose parameters are merely close to these
    // degenerate cases still carries a (possibly large) residue.
    // A family is annihilated when some 1/Γ(a_j − b_h − ℓ) is zero for every ℓ.
    if (spec.n..p).any(|j| exact_nonpositive_integer(Dd::new(spec.a[j]) - Dd::new(bh)).is_some()) {
        return Ok(SeriesOutcome { value: 0.0, err: 0.0 });
    }
    // Leading terms vanish while 1/Γ(1 − b_j + b_h + ℓ) sits on a pole.
    let mut start = 0usize;
    for j in spec.m..q {
        if let Some(k) = exact_nonpositive_integer(Dd::new(1.0) + Dd::new(bh) - Dd::new(spec.b[j])) {
            start = start.max((-k) as usize + 1);
        }
    }

    let (ln0, sign0) = term_at(spec, h, start)?;
    if sign0 == 0.0 || ln0 == f64::NEG_INFINITY {
        return Ok(SeriesOutcome { value: 0.0, err: 0.0 });
    }
    if !ln0.is_finite() || ln0 > 700.0 {
        return Err(Error::SeriesRejected(format!("pole {h} coefficient overflows")));
    }

    let one = Dd::new(1.0);
    let bh_dd = Dd::new(bh);
    let upper: Vec<Dd> = spec.a.iter().map(|&a| one + bh_dd - Dd::new(a)).collect();
    let lower: Vec<Dd> = spec
        .b
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != h)
        .map(|(_, &b)| one + bh_dd - Dd::new(b))
        .collect();
    let sign_flip = (p + spec.m + spec.n) % 2 == 1;
    let zdd = Dd::new(if sign_flip { -spec.z } else { spec.z });

    // the direct product is preferred; exp of a log-space coefficient
    // carries ~|ln| ulps of relative error
    let (first, coeff_ulps) = match term_direct(spec, h, start) {
        Some((v, u)) => (v, u),
        _ => (sign0 * ln0.exp(), ln0.abs() + 8.0),
    };
    let mut term = Dd::new(first);
    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut l = start;
    loop {
        sum = sum + term;
        abs_sum += term.to_f64().abs();
        if l - start >= MAX_SERIES_TERMS {
            return Err(Error::SeriesRejected(format!(
                "pole {h} needs more than {MAX_SERIES_TERMS} terms"
            )));
        }
        let lf = Dd::new(l as f64);
        let mut num = zdd;
        for u in &upper {
            num = num * (*u + lf);
        }
        let mut den = Dd::new((l + 1) as f64);
        for v in &lower {
            den = den * (*v + lf);
        }
        let next = term * num / den;
        l += 1;
        if !next.is_finite() || !sum.is_finite() {
            return Err(Error::SeriesRejected(format!("pole {h} series overflowed")));
        }
        let nx = next.to_f64().abs();
        if nx == 0.0 {
            break;
        }
        if nx < SERIES_TRUNCATION * sum.to_f64().abs() && nx < term.to_f64().abs() {
            sum = sum + next;
            abs_sum += nx;
            break;
        }
        term = next;
    }
    let value = sum.to_f64();
    let coeff_err = value.abs() * (coeff_ulps + 0.5) * f64::EPSILON;
    Ok(SeriesOutcome {
        value,
        err: coeff_err + abs_sum * 1e-30,
    })
}

fn series_outcome(spec: &MeijerGSpec) -> Result<SeriesOutcome> {
    spec.validate()?;
    let spec = &spec.reduced();
    check_series_domain(spec)?;
    let layout = PoleLayout::of(spec);
    if let Some(g) = layout.collision_groups.iter().find(|g| g.len() > 1) {
        return Err(Error::PoleCollision {
            i: g[0],
            j: g[1],
            bi: spec.b[g[0]],
            bj: spec.b[g[1]],
        });
    }
    let mut total = Dd::ZERO;
    let mut err = 0.0;
    for h in 0..spec.m {
        let o = pole_series(spec, h)?;
        total = total + Dd::new(o.value);
        // families are rounded independently
        err += o.err * o.err;
    }
    let value = total.to_f64();
    let err = err.sqrt() + value.abs() * f64::EPSILON;
    Ok(SeriesOutcome { value, err })
}

/// Residue-series evaluation.
///
/// Rejects (rather than returning an inaccurate value) when pole families
/// collide, when the argument lies outside the series' useful range, or when
/// cancellation between pole families would cost more than
/// [`SERIES_ACCEPT`] relative accuracy.
pub fn meijer_g_series(spec: &MeijerGSpec) -> Result<f64> {
    let (value, err) = meijer_g_series_estimate(spec)?;
    if err > SERIES_ACCEPT * value.abs() && !(value == 0.0 && err == 0.0) {
        return Err(Error::SeriesRejected(format!(
            "cancellation: value {value:e}, rounding estimate {err:e}"
        )));
    }
    Ok(value)
}

/// Residue-series value together with its estimated absolute rounding
/// error, without the acceptance check of [`meijer_g_series`].
pub fn meijer_g_series_estimate(spec: &MeijerGSpec) -> Result<(f64, f64)> {
    let o = series_outcome(spec)?;
    Ok((o.value, o.err))
}

fn perturbed(spec: &MeijerGSpec, layout: &PoleLayout, direction: f64) -> MeijerGSpec {
    let mut out = spec.clone();
    for g in &layout.collision_groups {
        for (k, &j) in g.iter().enumerate().skip(1) {
            out.b[j] += direction * PERTURBATION * k as f64;
        }
    }
    out
}

/// Series evaluation averaged over symmetric ±ε shifts of colliding lower
/// parameters; first-order perturbation error cancels.
pub fn meijer_g_perturbed(spec: &MeijerGSpec) -> Result<f64> {
    let (value, err) = perturbed_estimate(spec)?;
    if err > SERIES_ACCEPT * value.abs() && !(value == 0.0 && err == 0.0) {
        return Err(Error::SeriesRejected(format!(
            "cancellation: value {value:e}, error estimate {err:e}"
        )));
    }
    Ok(value)
}

/// Value and error estimate of [`meijer_g_perturbed`] without the
/// acceptance check. Besides rounding, the estimate includes the
/// second-order perturbation bias, gauged from the spread of the two shifts.
fn perturbed_estimate(spec: &MeijerGSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let spec = &spec.reduced();
    let layout = PoleLayout::of(spec);
    if layout.is_collision_free() {
        return meijer_g_series_estimate(spec);
    }
    let (up, e_up) = meijer_g_series_estimate(&perturbed(spec, &layout, 1.0))?;
    let (down, e_down) = meijer_g_series_estimate(&perturbed(spec, &layout, -1.0))?;
    let value = 0.5 * (up + down);
    let first_order = 0.5 * (up - down);
    let bias = first_order * first_order / value.abs().max(f64::MIN_POSITIVE);
    Ok((value, 0.5 * e_up.hypot(e_down) + bias))
}

fn ln_integrand(spec: &MeijerGSpec, s: Complex64, lnz: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = s * lnz;
    for j in 0..spec.m {
        acc += ln_gamma_complex(spec.b[j] - s);
    }
    for j in 0..spec.n {
        acc += ln_gamma_complex(one - spec.a[j] + s);
    }
    for j in spec.m..spec.q() {
        acc -= ln_gamma_complex(one - spec.b[j] + s);
    }
    for j in spec.n..spec.p() {
        acc -= ln_gamma_complex(spec.a[j] - s);
    }
    acc
}

fn log_modulus(spec: &MeijerGSpec, c: f64, t: f64, lnz: f64) -> f64 {
    let v = ln_integrand(spec, Complex64::new(c, t), lnz).re;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Envelope of the integrand along the line Re s = c.
fn line_metric(spec: &MeijerGSpec, c: f64, lnz: f64) -> f64 {
    [0.0, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&t| log_modulus(spec, c, t, lnz))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Residue of the integrand at the left pole s₀ = a_j − 1 − k of Γ(1 − a_j + s).
fn left_residue(spec: &MeijerGSpec, j: usize, k: usize) -> Result<f64> {
    let s0 = Dd::new(spec.a[j]) - Dd::new(1.0 + k as f64);
    let mut ln = s0.to_f64() * spec.z.ln();
    let mut sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let (lf, _) = ln_gamma_signed(k as f64 + 1.0)?;
    ln -= lf;
    let double_pole = || Error::ContourSelection {
        left: s0.to_f64(),
        right: s0.to_f64(),
    };
    for h in 0..spec.m {
        let (v, sg) = ln_gamma_signed_dd(Dd::new(spec.b[h]) - s0).map_err(|_| double_pole())?;
        ln += v;
        sign *= sg;
    }
    for i in (0..spec.n).filter(|&i| i != j) {
        let (v, sg) = ln_gamma_signed_dd(Dd::new(1.0 - spec.a[i]) + s0).map_err(|_| double_pole())?;
        ln += v;
        sign *= sg;
    }
    for h in spec.m..spec.q() {
        let (v, sg) = ln_rgamma_signed(Dd::new(1.0 - spec.b[h]) + s0);
        ln += v;
        sign *= sg;
    }
    for i in spec.n..spec.p() {
        let (v, sg) = ln_rgamma_signed(Dd::new(spec.a[i]) - s0);
        ln += v;
        sign *= sg;
    }
    Ok(if sign == 0.0 { 0.0 } else { sign * ln.exp() })
}

/// Left poles that survive cancellation against zeros of 1/Γ(1 − b_h + s),
/// as (location, j, k), nearest first.
fn left_poles(spec: &MeijerGSpec, depth: usize) -> Vec<(f64, usize, usize)> {
    let mut poles = Vec::new();
    for j in 0..spec.n {
        for k in 0..depth {
            // zeros sit at b_h − 1 − k'; s₀ = a_j − 1 − k coincides when
            // a_j − b_h is an integer d ≤ k
            let cancelled = (spec.m..spec.q()).any(|h| {
                let d = spec.a[j] - spec.b[h];
                d == d.round() && d <= k as f64
            });
            if !cancelled {
                poles.push((spec.a[j] - 1.0 - k as f64, j, k));
            }
        }
    }
    poles.sort_by(|x, y| y.0.total_cmp(&x.0));
    poles
}

/// Where to integrate: abscissa c, the left poles moved to the right of
/// the line, and the sum of their residues.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPlan {
    pub abscissa: f64,
    pub crossed: Vec<f64>,
    pub residues: f64,
    /// ln of the integrand envelope on the chosen line.
    pub envelope: f64,
}

/// Largest number of left poles the contour may be moved across.
const MAX_CROSSINGS: usize = 2;

fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x0, mut x3) = (lo, hi);
    let mut x1 = x3 - phi * (x3 - x0);
    let mut x2 = x0 + phi * (x3 - x0);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..48 {
        if f1 < f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - phi * (x3 - x0);
            f1 = f(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + phi * (x3 - x0);
            f2 = f(x2);
        }
    }
    let c = 0.5 * (x1 + x2);
    (c, f(c))
}

/// Chooses the integration line.
///
/// The line must separate the right poles (of Γ(b_h − s)) from the left
/// poles (of Γ(1 − a_j + s)). Optionally it is moved left across up to
/// [`MAX_CROSSINGS`] left poles, whose residues are then added back; this is
/// what keeps large arguments accurate, where the separating strip forces
/// |z^s| to be large while G itself is O(1). Within the chosen strip the
/// abscissa minimizes the integrand envelope, which bounds the cancellation
/// error of the quadrature.
pub fn contour_plan(spec: &MeijerGSpec) -> Result<ContourPlan> {
    spec.validate()?;
    let right = spec.b[..spec.m].iter().cloned().fold(f64::INFINITY, f64::min);
    let poles = left_poles(spec, 64);
    if let Some(&(left, _, _)) = poles.first() {
        if left >= right {
            return Err(Error::ContourSelection { left, right });
        }
    }
    let lnz = spec.z.ln();
    let sigma = (spec.q() - spec.p()).max(1) as f64;

    let mut best: Option<(f64, ContourPlan)> = None;
    let mut residues = 0.0;
    let mut crossed = Vec::new();
    for crossings in 0..=MAX_CROSSINGS.min(poles.len()) {
        if crossings > 0 {
            let (loc, j, k) = poles[crossings - 1];
            // a repeated location is a higher-order pole
            if poles.get(crossings).is_some_and(|p| p.0 == loc) {
                break;
            }
            residues += left_residue(spec, j, k)?;
            crossed.push(loc);
        }
        let hi = if crossings == 0 { right } else { crossed[crossings - 1] };
        let (lo, hi) = match poles.get(crossings) {
            Some(&(lo, _, _)) => {
                let d = (hi - lo) / 8.0;
                (lo + d, hi - d)
            }
            None => {
                let width = 10.0 + 3.0 * spec.z.powf(1.0 / sigma);
                (hi - width, hi - 0.25f64.min(width / 8.0))
            }
        };
        let (c, envelope) = golden_min(lo, hi, |c| line_metric(spec, c, lnz));
        let score = if residues != 0.0 {
            envelope.max(residues.abs().ln())
        } else {
            envelope
        };
        let plan = ContourPlan {
            abscissa: c,
            crossed: crossed.clone(),
            residues,
            envelope,
        };
        // a crossing must win clearly to be worth it
        if best.as_ref().is_none_or(|(s, _)| score < *s - 1.0) {
            best = Some((score, plan));
        }
    }
    Ok(best.expect("at least the uncrossed strip").1)
}

/// Chosen abscissa of [`contour_plan`].
pub fn contour_abscissa(spec: &MeijerGSpec) -> Result<f64> {
    contour_plan(spec).map(|p| p.abscissa)
}

/// Mellin-Barnes quadrature along Re s = c plus the residues of any left
/// poles the line was moved across.
///
/// By conjugate symmetry the line integral is (1/π) ∫_0^∞ Re F(c + it) dt;
/// the tail is cut where |F| falls below [`CONTOUR_TAIL`] times its peak.
pub fn meijer_g_contour(spec: &MeijerGSpec) -> Result<f64> {
    let est = contour_estimate(spec)?;
    if !est.accepted {
        return Err(Error::Quadrature {
            value: est.value,
            abs_err: est.abs_err,
        });
    }
    Ok(est.value)
}

struct ContourEstimate {
    value: f64,
    abs_err: f64,
    /// Converged, or close enough to the rounding floor of the integrand.
    accepted: bool,
}

fn contour_estimate(spec: &MeijerGSpec) -> Result<ContourEstimate> {
    let exact = |value: f64| {
        Ok(ContourEstimate {
            value,
            abs_err: value.abs() * f64::EPSILON,
            accepted: true,
        })
    };
    let plan = contour_plan(spec)?;
    let c = plan.abscissa;
    let lnz = spec.z.ln();
    let floor = if plan.residues != 0.0 {
        plan.residues.abs().ln() + (f64::EPSILON / 8.0).ln()
    } else {
        // below this the line integral underflows
        -760.0
    };
    if plan.envelope < floor - 20.0 {
        return exact(plan.residues);
    }

    let mut peak = log_modulus(spec, c, 0.0, lnz);
    let cutoff = CONTOUR_TAIL.ln();
    let mut t = 0.5;
    let height = loop {
        let v = log_modulus(spec, c, t, lnz);
        peak = peak.max(v);
        if t >= 2.0 && v < peak + cutoff {
            break t;
        }
        t *= 1.25;
        if t > 1e7 {
            return Err(Error::Quadrature {
                value: f64::NAN,
                abs_err: f64::INFINITY,
            });
        }
    };
    if !peak.is_finite() {
        return Err(Error::Quadrature {
            value: f64::NAN,
            abs_err: f64::INFINITY,
        });
    }
    if peak + height.ln() < floor {
        return exact(plan.residues);
    }

    let width = 1.0f64.min(std::f64::consts::PI / lnz.abs().max(1.0));
    let panels = (height / width).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| height * i as f64 / panels as f64).collect();
    let opts = QuadOptions {
        epsabs: 1e-15,
        epsrel: 1e-12,
        max_intervals: 20_000,
    };
    let est = integrate_panels(
        |t| {
            let v = ln_integrand(spec, Complex64::new(c, t), lnz) - peak;
            let r = v.exp().re;
            if r.is_nan() {
                0.0
            } else {
                r
            }
        },
        &breaks,
        opts,
    );
    let scale = peak.exp() / std::f64::consts::PI;
    let accepted = est.converged || est.abs_err <= 1e-9 * est.value.abs() + 1e-14 * est.abs_integral;
    let value = plan.residues + est.value * scale;
    Ok(ContourEstimate {
        value,
        abs_err: est.abs_err * scale + value.abs() * f64::EPSILON,
        accepted: accepted && value.is_finite(),
    })
}

/// Meijer G with automatic path selection: residue series (perturbed on
/// collisions), falling back to contour quadrature when the series rejects.
///
/// When neither path meets its own accuracy target (typically three or
/// more coincident lower parameters at small z), the candidate with the
/// smaller error estimate is returned if that estimate is within
/// [`LAST_RESORT_ACCEPT`] relative.
pub fn meijer_g(spec: &MeijerGSpec) -> Result<f64> {
    spec.validate()?;
    let series = perturbed_estimate(spec);
    if let Ok((v, e)) = series {
        if e <= SERIES_ACCEPT * v.abs() || (v == 0.0 && e == 0.0) {
            return Ok(v);
        }
    }
    let contour = contour_estimate(spec);
    if let Ok(c) = &contour {
        if c.accepted {
            return Ok(c.value);
        }
    }
    let candidates = [
        series.as_ref().ok().copied(),
        contour.as_ref().ok().map(|c| (c.value, c.abs_err)),
    ];
    let best = candidates
        .iter()
        .flatten()
        .filter(|(v, e)| v.is_finite() && *e <= LAST_RESORT_ACCEPT * v.abs())
        .min_by(|x, y| (x.1 / x.0.abs()).total_cmp(&(y.1 / y.0.abs())));
    if let Some(&(v, _)) = best {
        return Ok(v);
    }
    let describe_series = match &series {
        Ok((v, e)) => format!("value {v:e} with error estimate {e:e}"),
        Err(e) => e.to_string(),
    };
    let describe_contour = match &contour {
        Ok(c) => format!("value {:e} with error estimate {:e}", c.value, c.abs_err),
        Err(e) => e.to_string(),
    };
    Err(Error::MeijerFailed {
        series: describe_series,
        contour: describe_contour,
    })
}
