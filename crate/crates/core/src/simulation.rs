//! Repeated-sampling checks of the randomized credible bound.
//!
//! Every replication block draws from its own ChaCha8 stream derived from the
//! user seed (`stream = block index`), and indicator counts are summed as
//! integers, so results are bit-identical regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{realize_one_sided, stochastic_bound, Boundary};
use crate::model::{DataSummary, ModelPair, Prior};
use crate::posterior::{model_averaged_posterior, Component, ModelAveragedPosterior};
use crate::scalar::Real;

/// Fewer replications than this give a standard error too large to say anything.
pub const MIN_REPLICATIONS: u64 = 1000;

const BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    pub replications: u64,
    pub hits: u64,
    /// `1 − α`.
    pub target: f64,
    pub empirical: f64,
    /// `√(target·(1 − target)/replications)`.
    pub std_error: f64,
    pub seed: u64,
}

impl CoverageReport {
    fn new(replications: u64, hits: u64, target: f64, seed: u64) -> Self {
        let empirical = hits as f64 / replications as f64;
        let std_error = (target * (1.0 - target) / replications as f64).sqrt();
        Self { replications, hits, target, empirical, std_error, seed }
    }

    /// `|empirical − target| ≤ 3·SE`.
    pub fn passes(&self) -> bool {
        (self.empirical - self.target).abs() <= 3.0 * self.std_error
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn count_blocks<F>(reps: u64, seed: u64, per_draw: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    (0..reps.div_ceil(BLOCK))
        .into_par_iter()
        .map(|block| {
            let mut rng = block_rng(seed, block);
            let count = BLOCK.min(reps - block * BLOCK);
            (0..count).filter(|_| per_draw(&mut rng)).count() as u64
        })
        .sum()
}

/// One draw of θ from the model-averaged posterior.
pub fn sample_posterior<T: Real, R: Rng + ?Sized>(post: &ModelAveragedPosterior<T>, rng: &mut R) -> T {
    let u: f64 = rng.random();
    let s: f64 = StandardNormal.sample(rng);
    let from_m0 = T::lit(u) < post.weights().pm0;
    let normal = |mean: T, sd: T| mean + sd * T::lit(s);
    match (from_m0, post.component0()) {
        (true, Component::Atom { location }) => location,
        (true, Component::Normal(c)) => normal(c.mean, c.sd()),
        (false, _) => {
            let c = post.component1();
            normal(c.mean, c.sd())
        }
    }
}

fn covers<T: Real>(bound: Boundary<T>, theta: T) -> bool {
    if bound.open {
        theta > bound.value
    } else {
        theta >= bound.value
    }
}

/// Posterior probability content of the stochastic bound `[θ*, ∞)`, estimated
/// by drawing θ from the posterior and θ* from its two-point law independently.
pub fn simulate_stochastic_content<T: Real>(
    pair: &ModelPair<T>,
    data: &DataSummary<T>,
    alpha: T,
    reps: u64,
    seed: u64,
) -> Result<CoverageReport> {
    if reps < MIN_REPLICATIONS {
        return Err(Error::TooFewReplications { reps, min: MIN_REPLICATIONS });
    }
    let post = model_averaged_posterior(pair, data);
    let bound = stochastic_bound(&post, alpha)?;
    let hits = count_blocks(reps, seed, |rng| {
        let theta = sample_posterior(&post, rng);
        covers(bound.realize(rng), theta)
    });
    Ok(CoverageReport::new(reps, hits, 1.0 - alpha.as_f64(), seed))
}

/// Coverage under the full data-generating process, conditioning on
/// `|z − z_center| ≤ half_width`. Binning on z is an approximation to
/// conditioning on an exact z; `half_width` is the bin half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointCoverageReport {
    pub proposals: u64,
    pub coverage: CoverageReport,
    pub z_center: f64,
    pub half_width: f64,
}

/// Slow mode: draw the model, θ from its prior and `z ~ N(√n·θ, 1)`; keep draws
/// in the z bin, build that draw's one-sided `(1 − α)` bound (randomized if
/// needed) and record whether it covers θ. Stops after `accepted` hits in the bin.
pub fn simulate_joint_dgp<T: Real>(
    pair: &ModelPair<T>,
    n: T,
    z_center: T,
    half_width: T,
    alpha: T,
    accepted: u64,
    seed: u64,
) -> Result<JointCoverageReport> {
    if accepted < MIN_REPLICATIONS {
        return Err(Error::TooFewReplications { reps: accepted, min: MIN_REPLICATIONS });
    }
    if half_width.is_nan() || half_width <= T::zero() {
        return Err(Error::Domain(format!("bin half-width must be positive, got {half_width}")));
    }
    DataSummary::from_z(n, z_center)?;
    let sqrt_n = n.sqrt();
    let draw_prior = |prior: Prior<T>, rng: &mut ChaCha8Rng| match prior {
        Prior::PointMass { location } => location,
        Prior::ZeroMeanNormal { variance } => {
            let s: f64 = StandardNormal.sample(rng);
            variance.sqrt() * T::lit(s)
        }
    };
    // each block keeps proposing until it has its quota of accepted draws
    let blocks = accepted.div_ceil(BLOCK);
    let results: Vec<Result<(u64, u64)>> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = block_rng(seed, block);
            let quota = BLOCK.min(accepted - block * BLOCK);
            let (mut kept, mut hits, mut proposals) = (0u64, 0u64, 0u64);
            while kept < quota {
                proposals += 1;
                let u: f64 = rng.random();
                let prior = if T::lit(u) < pair.prior_prob_m0() { pair.prior0() } else { pair.prior1() };
                let theta = draw_prior(prior, &mut rng);
                let e: f64 = StandardNormal.sample(&mut rng);
                let z = sqrt_n * theta + T::lit(e);
                if (z - z_center).abs() > half_width {
                    continue;
                }
                kept += 1;
                let post = model_averaged_posterior(pair, &DataSummary::from_z(n, z)?);
                if covers(realize_one_sided(&post, alpha, &mut rng)?, theta) {
                    hits += 1;
                }
            }
            Ok((hits, proposals))
        })
        .collect();
    let (mut hits, mut proposals) = (0, 0);
    for r in results {
        let (h, p) = r?;
        hits += h;
        proposals += p;
    }
    Ok(JointCoverageReport {
        proposals,
        coverage: CoverageReport::new(accepted, hits, 1.0 - alpha.as_f64(), seed),
        z_center: z_center.as_f64(),
        half_width: half_width.as_f64(),
    })
}
