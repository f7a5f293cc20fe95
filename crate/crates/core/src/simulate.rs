//! Seeded Monte-Carlo runs of the encode/measure/guess protocol.
//!
//! Trials are split into fixed blocks of [`BLOCK_TRIALS`]. Block `b` draws
//! from ChaCha8 seeded with the master seed on stream `b`, and block
//! statistics are merged in block order, so a report depends only on
//! `(state, set, trials, seed)` and never on how many worker threads ran.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::encoding::EffectiveState;
use crate::error::{Error, Result};
use crate::povm::{check_closure, Measurement, WeightedDirectionSet};

pub const BLOCK_TRIALS: u64 = 1 << 16;
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), seed_from_u64(seed), stream = block index";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub seed: u64,
    pub rng: String,
    pub state: String,
    pub set: String,
}

impl SimulationReport {
    /// `|mean - target| <= k · std_error`.
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean_fidelity - target).abs() <= sigmas * self.std_error
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn blocks(trials: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let n_blocks = trials.div_ceil(BLOCK_TRIALS);
    (0..n_blocks as usize).into_par_iter().map(move |b| {
        let b = b as u64;
        let start = b * BLOCK_TRIALS;
        (b, (trials - start).min(BLOCK_TRIALS))
    })
}

/// Inverse-CDF draw from unnormalised weights summing to `total`.
fn sample_index(p: &[f64], total: f64, u: f64) -> usize {
    let target = u * total;
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if target < acc {
            return i;
        }
    }
    p.len() - 1
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    Ok(())
}

/// Simulates `trials` rounds: a source direction drawn uniformly on the
/// sphere, an outcome drawn from the finite measurement, and the score
/// `(1 + n·n_r)/2`.
pub fn run_protocol(
    state: &EffectiveState,
    set: &WeightedDirectionSet,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    check_trials(trials)?;
    let meas = Measurement::new(state, set);
    let per_block: Vec<Moments> = blocks(trials)
        .map(|(block, count)| {
            let mut rng = block_rng(seed, block);
            let mut scratch = meas.scratch();
            let mut p = Vec::with_capacity(meas.outcomes());
            let mut acc = Moments::default();
            for _ in 0..count {
                let cos_theta: f64 = 2.0 * rng.random::<f64>() - 1.0;
                let phi = TAU * rng.random::<f64>();
                let theta = cos_theta.clamp(-1.0, 1.0).acos();
                let total = meas.probabilities_into(theta, phi, &mut scratch, &mut p);
                check_closure(total)?;
                let r = sample_index(&p, total, rng.random::<f64>());
                let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
                let source = Vector3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta);
                acc.push(0.5 * (1.0 + source.dot(&meas.directions()[r])));
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let moments = per_block
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    let variance = if moments.count > 1 {
        moments.m2 / (moments.count - 1) as f64
    } else {
        0.0
    };
    Ok(SimulationReport {
        trials,
        mean_fidelity: moments.mean,
        std_error: (variance / trials as f64).sqrt(),
        seed,
        rng: RNG_NAME.to_string(),
        state: state.descriptor(),
        set: format!("{} directions, C = {}", set.len(), set.total_weight()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub trials: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub expected: Vec<f64>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    /// Upper-tail probability of `chi_square`; 1 when there is nothing to test.
    pub p_value: f64,
}

/// Outcome histogram at a fixed source, with a chi-square comparison against
/// the exact distribution. Outcomes of zero probability are excluded from the
/// statistic (and must never be drawn).
pub fn empirical_outcome_frequencies(
    state: &EffectiveState,
    set: &WeightedDirectionSet,
    source: &Vector3<f64>,
    trials: u64,
    seed: u64,
) -> Result<FrequencyReport> {
    check_trials(trials)?;
    let meas = Measurement::new(state, set);
    let expected = meas.distribution(source)?;
    let total: f64 = expected.iter().sum();
    let per_block: Vec<Vec<u64>> = blocks(trials)
        .map(|(block, count)| {
            let mut rng = block_rng(seed, block);
            let mut counts = vec![0u64; expected.len()];
            for _ in 0..count {
                counts[sample_index(&expected, total, rng.random::<f64>())] += 1;
            }
            counts
        })
        .collect();
    let mut counts = vec![0u64; expected.len()];
    for block in per_block {
        for (c, b) in counts.iter_mut().zip(block) {
            *c += b;
        }
    }
    let n = trials as f64;
    let mut chi_square = 0.0;
    let mut bins = 0usize;
    for (&c, &p) in counts.iter().zip(&expected) {
        if p > 0.0 {
            let e = n * p;
            chi_square += (c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    let dof = bins.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(chi_square))
            .unwrap_or(f64::NAN)
    };
    let frequencies = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(FrequencyReport {
        trials,
        counts,
        frequencies,
        expected,
        chi_square,
        degrees_of_freedom: dof,
        p_value,
    })
}
