//! Seeded sampling of heterogeneous consumer populations.
//!
//! Consumer `i` draws from ChaCha stream `i` of the population seed, so a
//! consumer's parameters depend only on `(seed, i)` and the distributions.
//! Free riders are chosen by a seeded shuffle on a separate stream.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{require, ModelError, Result};
use crate::game::BelievedCost;
use crate::preferences::ConsumerProfile;

/// Attempts per consumer when redrawing `(alpha, beta)` until `alpha >= beta`.
pub const PAIR_REJECTION_CAP: usize = 1000;

const TRUNCATION_CAP: usize = 100_000;
const SHUFFLE_STREAM: u64 = u64::MAX;

/// A univariate parameter distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    TruncatedNormal { mean: f64, sd: f64, lo: f64, hi: f64 },
}

impl Distribution {
    /// Smallest and largest value the distribution can produce.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Distribution::Constant { value } => (value, value),
            Distribution::Uniform { lo, hi } | Distribution::TruncatedNormal { lo, hi, .. } => (lo, hi),
        }
    }

    fn check_shape(&self, field: &'static str) -> Result<()> {
        let (lo, hi) = self.support();
        require(lo.is_finite(), field, lo, "a finite lower bound")?;
        require(hi.is_finite(), field, hi, "a finite upper bound")?;
        require(lo <= hi, field, lo, "lo <= hi")?;
        if let Distribution::TruncatedNormal { mean, sd, .. } = *self {
            require(mean.is_finite(), field, mean, "a finite mean")?;
            require(sd.is_finite() && sd > 0.0, field, sd, "sd > 0")?;
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match *self {
            Distribution::Constant { value } => Ok(value),
            Distribution::Uniform { lo, hi } => {
                if lo == hi {
                    Ok(lo)
                } else {
                    Ok(rng.random_range(lo..hi))
                }
            }
            Distribution::TruncatedNormal { mean, sd, lo, hi } => {
                if lo == hi {
                    return Ok(lo);
                }
                let normal = Normal::new(mean, sd).expect("sd checked positive");
                for _ in 0..TRUNCATION_CAP {
                    let x = normal.sample(rng);
                    if (lo..=hi).contains(&x) {
                        return Ok(x);
                    }
                }
                Err(ModelError::TruncationCap {
                    lo,
                    hi,
                    attempts: TRUNCATION_CAP,
                })
            }
        }
    }
}

/// How to build a population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub size: usize,
    #[serde(default = "defaults::v")]
    pub v: Distribution,
    #[serde(default = "defaults::alpha")]
    pub alpha: Distribution,
    #[serde(default = "defaults::beta")]
    pub beta: Distribution,
    #[serde(default = "defaults::gamma")]
    pub gamma: Distribution,
    #[serde(default = "defaults::lambda")]
    pub lambda: Distribution,
    #[serde(default)]
    pub free_rider_share: f64,
    #[serde(default)]
    pub believed_cost_rule: BelievedCost,
    pub seed: u64,
}

/// Defaults are conveniences: the valuation is uniform, the inequity weights
/// are truncated normals near the usual calibrations, and surplus is shared
/// equally.
pub mod defaults {
    use super::Distribution;

    pub fn v() -> Distribution {
        Distribution::Uniform { lo: 5.0, hi: 15.0 }
    }

    pub fn alpha() -> Distribution {
        Distribution::TruncatedNormal {
            mean: 0.85,
            sd: 0.5,
            lo: 0.0,
            hi: 4.0,
        }
    }

    pub fn beta() -> Distribution {
        Distribution::TruncatedNormal {
            mean: 0.315,
            sd: 0.2,
            lo: 0.0,
            hi: 0.95,
        }
    }

    pub fn gamma() -> Distribution {
        Distribution::TruncatedNormal {
            mean: 0.5,
            sd: 0.3,
            lo: 0.0,
            hi: 2.0,
        }
    }

    pub fn lambda() -> Distribution {
        Distribution::Constant { value: 0.5 }
    }
}

impl PopulationSpec {
    /// Population spec with default distributions.
    pub fn new(size: usize, seed: u64) -> Self {
        Self {
            size,
            v: defaults::v(),
            alpha: defaults::alpha(),
            beta: defaults::beta(),
            gamma: defaults::gamma(),
            lambda: defaults::lambda(),
            free_rider_share: 0.0,
            believed_cost_rule: BelievedCost::default(),
            seed,
        }
    }

    /// Every consumer with the same parameters.
    pub fn constant(size: usize, seed: u64, v: f64, alpha: f64, beta: f64, gamma: f64, lambda: f64) -> Self {
        let c = |value| Distribution::Constant { value };
        Self {
            v: c(v),
            alpha: c(alpha),
            beta: c(beta),
            gamma: c(gamma),
            lambda: c(lambda),
            ..Self::new(size, seed)
        }
    }

    /// Checks each field; the error names the offending field.
    pub fn validate(&self) -> Result<()> {
        require(self.size >= 1, "size", self.size as f64, "size >= 1")?;
        let share = self.free_rider_share;
        require(
            share.is_finite() && (0.0..=1.0).contains(&share),
            "free_rider_share",
            share,
            "0 <= free_rider_share <= 1",
        )?;
        self.believed_cost_rule.validate()?;

        self.v.check_shape("v")?;
        self.alpha.check_shape("alpha")?;
        self.beta.check_shape("beta")?;
        self.gamma.check_shape("gamma")?;
        self.lambda.check_shape("lambda")?;

        let (v_lo, _) = self.v.support();
        require(v_lo >= 0.0, "v", v_lo, "support within [0, inf)")?;
        let (b_lo, b_hi) = self.beta.support();
        require(b_lo >= 0.0, "beta", b_lo, "support within [0, 1)")?;
        require(b_hi < 1.0, "beta", b_hi, "support within [0, 1)")?;
        let (_, a_hi) = self.alpha.support();
        require(
            a_hi >= b_lo,
            "alpha",
            a_hi,
            "support reaching the lower end of beta (alpha >= beta must be attainable)",
        )?;
        let (g_lo, _) = self.gamma.support();
        require(g_lo >= 0.0, "gamma", g_lo, "support within [0, inf)")?;
        let (l_lo, l_hi) = self.lambda.support();
        require(l_lo > 0.0, "lambda", l_lo, "support within (0, 1]")?;
        require(l_hi <= 1.0, "lambda", l_hi, "support within (0, 1]")?;
        Ok(())
    }

    pub fn free_rider_count(&self) -> usize {
        (self.size as f64 * self.free_rider_share).floor() as usize
    }
}

/// Generator for consumer `index`'s draws.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `spec.size` consumers. Deterministic in `spec`.
pub fn sample_population(spec: &PopulationSpec) -> Result<Vec<ConsumerProfile>> {
    spec.validate()?;

    let mut free_rider = vec![false; spec.size];
    let mut order: Vec<usize> = (0..spec.size).collect();
    order.shuffle(&mut substream(spec.seed, SHUFFLE_STREAM));
    for &i in &order[..spec.free_rider_count()] {
        free_rider[i] = true;
    }

    free_rider
        .into_iter()
        .enumerate()
        .map(|(i, rider)| sample_consumer(spec, i, rider))
        .collect()
}

fn sample_consumer(spec: &PopulationSpec, index: usize, is_free_rider: bool) -> Result<ConsumerProfile> {
    let mut rng = substream(spec.seed, index as u64);
    // Draw order is fixed: v, (beta, alpha), gamma, lambda.
    let v = spec.v.sample(&mut rng)?;
    let (alpha, beta) = sample_pair(spec, &mut rng, index)?;
    let gamma = spec.gamma.sample(&mut rng)?;
    let lambda = spec.lambda.sample(&mut rng)?;
    ConsumerProfile::new(v, alpha, beta, gamma, lambda, is_free_rider)
}

fn sample_pair(spec: &PopulationSpec, rng: &mut ChaCha8Rng, index: usize) -> Result<(f64, f64)> {
    for _ in 0..PAIR_REJECTION_CAP {
        let beta = spec.beta.sample(rng)?;
        let alpha = spec.alpha.sample(rng)?;
        if alpha >= beta {
            return Ok((alpha, beta));
        }
    }
    Err(ModelError::RejectionCap {
        index,
        attempts: PAIR_REJECTION_CAP,
    })
}
