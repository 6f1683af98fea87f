//! Seeded parallel simulation of the dual-hop link over the exact channel
//! physics.
//!
//! Trials are split into batches of `batch_size`. Batch `i` draws from the
//! ChaCha8 stream `i` of the key derived from `seed`, so the sample set
//! depends only on (seed, trials, batch_size) and never on scheduling.
//! Per-batch results are reduced in batch order.

use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::SystemParams;
use crate::channels::{rf_sample, FsoSampler};
use crate::error::{Error, Result};
use crate::specfun::q_function;
use crate::stats::{mean_interval, wilson_interval, Z99};

pub const DEFAULT_BATCH_SIZE: u64 = 1 << 16;
/// Estimates resting on fewer events than this are flagged.
pub const LOW_COUNT_EVENTS: f64 = 100.0;

/// How the two hop SNRs combine into the end-to-end SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    /// min(γ1, γ2), the decode-and-forward bottleneck.
    #[default]
    Min,
    /// γ1γ2/(γ1 + γ2).
    Harmonic,
}

impl Combiner {
    pub fn combine(self, g1: f64, g2: f64) -> f64 {
        match self {
            Combiner::Min => g1.min(g2),
            Combiner::Harmonic => g1 * g2 / (g1 + g2),
        }
    }
}

impl FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Combiner::Min),
            "harmonic" => Ok(Combiner::Harmonic),
            other => Err(Error::param("combiner", format!("expected min or harmonic, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimPlan {
    pub params: SystemParams,
    pub trials: u64,
    pub seed: u64,
    pub batch_size: u64,
    pub combiner: Combiner,
}

impl SimPlan {
    pub fn new(params: SystemParams, trials: u64, seed: u64) -> Self {
        SimPlan {
            params,
            trials,
            seed,
            batch_size: DEFAULT_BATCH_SIZE,
            combiner: Combiner::Min,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::param("batch_size", "must be at least 1"));
        }
        Ok(())
    }

    fn batches(&self) -> Vec<(u64, u64)> {
        let n = self.trials.div_ceil(self.batch_size);
        (0..n)
            .map(|i| (i, self.batch_size.min(self.trials - i * self.batch_size)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub estimate: f64,
    /// 99% interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub seconds: f64,
    /// estimate·trials < 100: too few events to trust the interval.
    pub low_count: bool,
}

impl EstimateWithCI {
    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    /// Same numbers, ignoring wall time.
    pub fn same_result(&self, other: &Self) -> bool {
        self.estimate.to_bits() == other.estimate.to_bits()
            && self.ci_low.to_bits() == other.ci_low.to_bits()
            && self.ci_high.to_bits() == other.ci_high.to_bits()
            && self.trials == other.trials
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (0: rayon's default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    Ok(pool.install(f))
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Draws every batch's (γ1, γ2) pairs and folds them with `visit`.
fn run_batches<A: Send>(
    plan: &SimPlan,
    init: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, f64, f64) + Sync,
) -> Result<Vec<A>> {
    plan.validate()?;
    let sampler = FsoSampler::new(&plan.params.fso)?;
    let rf = plan.params.rf;
    Ok(plan
        .batches()
        .into_par_iter()
        .map(|(index, size)| {
            let mut rng = batch_rng(plan.seed, index);
            let mut acc = init();
            for _ in 0..size {
                let g1 = rf_sample(&mut rng, &rf);
                let g2 = sampler.sample(&mut rng);
                visit(&mut acc, g1, g2);
            }
            acc
        })
        .collect())
}

fn proportion(events: u64, trials: u64, seconds: f64) -> EstimateWithCI {
    let (ci_low, ci_high) = wilson_interval(events, trials, Z99);
    EstimateWithCI {
        estimate: events as f64 / trials as f64,
        ci_low,
        ci_high,
        trials,
        seconds,
        low_count: (events as f64) < LOW_COUNT_EVENTS,
    }
}

/// Outage under both combiners from one sample set: (min, harmonic).
/// Pointwise γ1γ2/(γ1+γ2) ≤ min(γ1, γ2), so the harmonic count is never
/// smaller.
pub fn simulate_outage_pair(plan: &SimPlan) -> Result<(EstimateWithCI, EstimateWithCI)> {
    let start = Instant::now();
    let threshold = plan.params.gamma_out;
    let counts = run_batches(
        plan,
        || (0u64, 0u64),
        |acc, g1, g2| {
            acc.0 += (Combiner::Min.combine(g1, g2) <= threshold) as u64;
            acc.1 += (Combiner::Harmonic.combine(g1, g2) <= threshold) as u64;
        },
    )?;
    let (min, harmonic) = counts
        .iter()
        .fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
    assert!(harmonic >= min, "harmonic outage below min outage");
    let seconds = start.elapsed().as_secs_f64();
    Ok((
        proportion(min, plan.trials, seconds),
        proportion(harmonic, plan.trials, seconds),
    ))
}

/// Fraction of trials with combined SNR at or below γ_out, with a 99%
/// Wilson interval.
pub fn simulate_outage(plan: &SimPlan) -> Result<EstimateWithCI> {
    let start = Instant::now();
    let threshold = plan.params.gamma_out;
    let combiner = plan.combiner;
    let counts = run_batches(
        plan,
        || 0u64,
        |acc, g1, g2| *acc += (combiner.combine(g1, g2) <= threshold) as u64,
    )?;
    Ok(proportion(
        counts.iter().sum(),
        plan.trials,
        start.elapsed().as_secs_f64(),
    ))
}

/// Mean of a·Q(√(2bγ_D)) with a 99% normal interval.
pub fn simulate_sep(plan: &SimPlan) -> Result<EstimateWithCI> {
    let start = Instant::now();
    let combiner = plan.combiner;
    let m = plan.params.modulation;
    let sums = run_batches(
        plan,
        || (0.0f64, 0.0f64),
        |acc, g1, g2| {
            let e = m.a * q_function((2.0 * m.b * combiner.combine(g1, g2)).sqrt());
            acc.0 += e;
            acc.1 += e * e;
        },
    )?;
    let (sum, sum_sq) = sums
        .iter()
        .fold((0.0, 0.0), |(s, q), (x, y)| (s + x, q + y));
    let (estimate, lo, hi) = mean_interval(sum, sum_sq, plan.trials, Z99);
    Ok(EstimateWithCI {
        estimate,
        ci_low: lo.max(0.0),
        ci_high: hi,
        trials: plan.trials,
        seconds: start.elapsed().as_secs_f64(),
        low_count: estimate * (plan.trials as f64) < LOW_COUNT_EVENTS,
    })
}
