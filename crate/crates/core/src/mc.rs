//! Seeded Monte Carlo estimates of hitting times and Kemeny's constant.
//!
//! Trajectory `i` draws from ChaCha stream `i` under the caller's seed, so
//! results do not depend on how trajectories are scheduled across threads.
//! Step counts are integers and are summed exactly, making estimates
//! bit-identical between runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{MarkovChain, StationaryDistribution};
use crate::error::{Error, Result};
use crate::tolerance::STEP_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of the mean; 0 when `samples == 1`.
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_sums(samples: u64, sum: u128, sum_sq: u128) -> Self {
        let n = samples as u128;
        let mean = sum as f64 / samples as f64;
        let stderr = if samples > 1 {
            // n Σs² − (Σs)² is exact in integers.
            let centered = n * sum_sq - sum * sum;
            let var = centered as f64 / (n * (n - 1)) as f64;
            (var / samples as f64).sqrt()
        } else {
            0.0
        };
        McEstimate { mean, stderr, samples }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Inverse-CDF sampler over each row of P.
struct RowSampler {
    cdf: Vec<Vec<f64>>,
}

impl RowSampler {
    fn new(chain: &MarkovChain) -> Self {
        let p = chain.transition_matrix();
        let cdf = (0..chain.len())
            .map(|x| cumulative(p.row(x).iter().copied()))
            .collect();
        RowSampler { cdf }
    }

    fn step<R: Rng>(&self, x: usize, rng: &mut R) -> usize {
        draw(&self.cdf[x], rng)
    }
}

/// Cumulative sums with the final positive entry (and everything after it)
/// set to infinity so that every uniform draw lands on a positive-weight
/// index.
fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    let last_positive = (0..cdf.len())
        .rev()
        .find(|&i| cdf[i] > if i == 0 { 0.0 } else { cdf[i - 1] })
        .unwrap_or(cdf.len().saturating_sub(1));
    for c in &mut cdf[last_positive..] {
        *c = f64::INFINITY;
    }
    cdf
}

fn draw<R: Rng>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    cdf.partition_point(|&c| c <= u)
}

fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn walk<R: Rng>(sampler: &RowSampler, from: usize, to: usize, rng: &mut R) -> Result<u64> {
    let mut state = from;
    let mut steps = 0u64;
    while state != to {
        if steps == STEP_CAP {
            return Err(Error::CapExceeded { from, to, cap: STEP_CAP });
        }
        state = sampler.step(state, rng);
        steps += 1;
    }
    Ok(steps)
}

fn accumulate(samples: u64, f: impl Fn(u64) -> Result<u64> + Sync) -> Result<McEstimate> {
    let (sum, sum_sq) = (0..samples)
        .into_par_iter()
        .map(|i| f(i).map(|s| (s as u128, (s as u128) * (s as u128))))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(McEstimate::from_sums(samples, sum, sum_sq))
}

fn check_state(chain: &MarkovChain, x: usize) -> Result<()> {
    if x < chain.len() {
        Ok(())
    } else {
        Err(Error::UnknownState(x.to_string()))
    }
}

/// Mean first-arrival time from `x` to `y` over `samples` trajectories.
pub fn sample_hitting_time(chain: &MarkovChain, x: usize, y: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    check_state(chain, x)?;
    check_state(chain, y)?;
    if x == y {
        return Err(Error::InvalidArgument("hitting-time sampling needs distinct states".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if !chain.is_irreducible() {
        return Err(Error::Reducible);
    }
    let sampler = RowSampler::new(chain);
    accumulate(samples, |i| walk(&sampler, x, y, &mut trajectory_rng(seed, i)))
}

/// Starts every trajectory at the first state and walks to a target drawn
/// from π; the mean step count estimates Kemeny's constant.
pub fn estimate_kemeny(chain: &MarkovChain, pi: &StationaryDistribution, samples: u64, seed: u64) -> Result<McEstimate> {
    if pi.len() != chain.len() {
        return Err(Error::InconsistentInputs(format!(
            "chain has {} states, pi has {}",
            chain.len(),
            pi.len()
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let sampler = RowSampler::new(chain);
    let target_cdf = cumulative(pi.as_vector().iter().copied());
    accumulate(samples, |i| {
        let mut rng = trajectory_rng(seed, i);
        let y = draw(&target_cdf, &mut rng);
        walk(&sampler, 0, y, &mut rng)
    })
}
