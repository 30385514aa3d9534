//! Monte Carlo outage estimation and cascade moment checks.
//!
//! Trial `i` always draws from substream `i` of the run seed. Trials are
//! grouped into fixed-size chunks, each chunk is reduced on whichever thread
//! picks it up, and the chunk results are combined in chunk order. The
//! outcome is therefore identical for every worker count.

use serde::{Deserialize, Serialize};

use crate::channel::{sample_gains, Substreams};
use crate::exec::{ordered_map, Workers};
use crate::params::{DerivedParams, SystemParams};
use crate::sysmodel::{outage_by_threshold, outage_indicator, snr_from_gains};

const CHUNK: u64 = 4096;
const Z_95: f64 = 1.959_963_984_540_054;

/// Default trial count for a single outage estimate.
pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            seed: 42,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    /// Binomial standard error √(p̂(1−p̂)/N).
    pub stderr: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub trials: u64,
    pub seed: u64,
    /// Trials where the rate test and the threshold test disagreed. Only
    /// possible within rounding of the boundary; expected to be zero.
    pub form_disagreements: u64,
}

impl OutageEstimate {
    fn from_count(outages: u64, trials: u64, seed: u64, form_disagreements: u64) -> Self {
        let n = trials as f64;
        let p_hat = outages as f64 / n;
        let stderr = (p_hat * (1.0 - p_hat) / n).sqrt();
        Self {
            p_hat,
            stderr,
            ci95_lo: (p_hat - Z_95 * stderr).max(0.0),
            ci95_hi: (p_hat + Z_95 * stderr).min(1.0),
            trials,
            seed,
            form_disagreements,
        }
    }

    pub fn covers(&self, p: f64) -> bool {
        self.ci95_lo <= p && p <= self.ci95_hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CascadeMoments {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub stderr_mean: f64,
    /// Large-sample standard error of the variance, √((μ₄ − σ⁴)/N).
    pub stderr_variance: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum McError {
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { min: u64, got: u64 },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("cascade moments need at least one element")]
    NoElements,
}

impl McConfig {
    fn check(&self, min_trials: u64) -> Result<(), McError> {
        if self.trials < min_trials {
            return Err(McError::TooFewTrials {
                min: min_trials,
                got: self.trials,
            });
        }
        if self.workers == 0 {
            return Err(McError::NoWorkers);
        }
        Ok(())
    }

    fn chunks(&self) -> usize {
        self.trials.div_ceil(CHUNK) as usize
    }

    fn chunk_range(&self, chunk: usize) -> std::ops::Range<u64> {
        let start = chunk as u64 * CHUNK;
        start..(start + CHUNK).min(self.trials)
    }
}

/// Fraction of simulated coherence intervals in which the rate falls short.
pub fn estimate_outage(
    params: &SystemParams,
    derived: &DerivedParams,
    mc: &McConfig,
) -> Result<OutageEstimate, McError> {
    mc.check(1)?;
    let m = params.elements();
    let streams = Substreams::new(mc.seed);

    let per_chunk = ordered_map(mc.chunks(), Workers::from_count(mc.workers), |c| {
        let mut outages = 0u64;
        let mut disagreements = 0u64;
        for trial in mc.chunk_range(c) {
            let (h1_gain, cascade) = sample_gains(&mut streams.stream(trial), m);
            let sample = snr_from_gains(params, derived, h1_gain, cascade);
            let by_rate = outage_indicator(&sample, params.r_rate);
            let by_threshold = outage_by_threshold(h1_gain, cascade, derived.threshold_t);
            outages += by_rate as u64;
            disagreements += (by_rate != by_threshold) as u64;
        }
        (outages, disagreements)
    });

    let (outages, disagreements) = per_chunk
        .into_iter()
        .fold((0, 0), |(o, d), (co, cd)| (o + co, d + cd));
    Ok(OutageEstimate::from_count(
        outages,
        mc.trials,
        mc.seed,
        disagreements,
    ))
}

/// Running central moments up to order four, mergeable across chunks.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.merge(&Moments {
            n: 1.0,
            mean: x,
            ..Default::default()
        });
    }

    // Pairwise update for central moment sums (Pébay 2008).
    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n, o.n);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d_n = d / n;
        let d2 = d * d_n * na * nb;

        let m4 = self.m4
            + o.m4
            + d2 * d_n * d_n * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * o.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * o.m3 - nb * self.m3);
        let m3 = self.m3 + o.m3 + d2 * d_n * (na - nb) + 3.0 * d_n * (na * o.m2 - nb * self.m2);
        let m2 = self.m2 + o.m2 + d2;

        *self = Moments {
            n,
            mean: self.mean + d_n * nb,
            m2,
            m3,
            m4,
        };
    }
}

/// Sample moments of the aligned cascade sum Σ|h2,k||h3,k| over `trials`
/// independent surfaces of `m` elements.
pub fn estimate_cascade_moments(
    m: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<CascadeMoments, McError> {
    if m == 0 {
        return Err(McError::NoElements);
    }
    let mc = McConfig {
        trials,
        seed,
        workers,
    };
    mc.check(2)?;
    let streams = Substreams::new(seed);

    let per_chunk = ordered_map(mc.chunks(), Workers::from_count(workers), |c| {
        let mut acc = Moments::default();
        for trial in mc.chunk_range(c) {
            let (_, cascade) = sample_gains(&mut streams.stream(trial), m);
            acc.push(cascade);
        }
        acc
    });
    let mut total = Moments::default();
    for chunk in &per_chunk {
        total.merge(chunk);
    }

    let n = total.n;
    let variance = total.m2 / (n - 1.0);
    let pop_var = total.m2 / n;
    let mu4 = total.m4 / n;
    Ok(CascadeMoments {
        mean: total.mean,
        variance,
        stderr_mean: (variance / n).sqrt(),
        stderr_variance: ((mu4 - pop_var * pop_var).max(0.0) / n).sqrt(),
        trials,
    })
}
