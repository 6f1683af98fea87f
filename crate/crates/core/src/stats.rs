//! Goodness-of-fit and interval helpers shared by the simulator and the
//! validation suites.

use crate::error::Result;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Normal interval for a sample mean from its sum and sum of squares.
pub fn mean_interval(sum: f64, sum_sq: f64, trials: u64, z: f64) -> (f64, f64, f64) {
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let half = z * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

/// Exact Kolmogorov-Smirnov distance between the empirical law of `sorted`
/// (ascending) and a continuous CDF.
pub fn ks_distance(sorted: &[f64], mut cdf: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Bounds on the Kolmogorov-Smirnov distance when the CDF is evaluated only
/// at every `stride`-th order statistic.
///
/// Between two evaluated order statistics the CDF is bracketed by its
/// values at the ends, so `upper` is a guaranteed bound on the exact
/// statistic and `lower` is the statistic restricted to evaluated points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn ks_distance_bracketed(
    sorted: &[f64],
    stride: usize,
    mut cdf: impl FnMut(f64) -> Result<f64>,
) -> Result<KsBounds> {
    assert!(stride >= 1 && !sorted.is_empty());
    let len = sorted.len();
    let n = len as f64;
    let mut nodes: Vec<usize> = (0..len).step_by(stride).collect();
    if *nodes.last().expect("nonempty") != len - 1 {
        nodes.push(len - 1);
    }
    let values = nodes.iter().map(|&i| cdf(sorted[i])).collect::<Result<Vec<f64>>>()?;
    let mut lower = 0.0f64;
    let mut upper = 0.0f64;
    for (&i, &f) in nodes.iter().zip(&values) {
        lower = lower.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    upper = upper.max(lower);
    for w in 0..nodes.len().saturating_sub(1) {
        let (lo, hi) = (nodes[w], nodes[w + 1]);
        let (f_lo, f_hi) = (values[w], values[w + 1]);
        // sample indices lo..=hi, 1-based ranks lo+1..=hi+1
        upper = upper.max((hi + 1) as f64 / n - f_lo).max(f_hi - lo as f64 / n);
    }
    Ok(KsBounds { lower, upper })
}
