//! Large-sample limits in the fixed-p-value regime `ȳ = a + b·n^{-1/2}`, and
//! the sample-size sweeps built on them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::stochastic_bound;
use crate::kernels;
use crate::model::{DataSummary, ModelPair};
use crate::posterior::model_averaged_posterior;
use crate::quadrature::{self, Tolerance};
use crate::scalar::Real;

/// `lim_{n→∞} Pr(M₁|data)` at fixed `z`.
///
/// With two normal priors `BF₀₁ → √(g₁/g₀)`, giving `(1 + √(g₁/g₀))⁻¹` under equal
/// prior odds. With a point-null M₀ the limit is 0.
pub fn limit_posterior_model_prob<T: Real>(pair: &ModelPair<T>) -> T {
    match pair.prior0().atom() {
        Some(_) => T::zero(),
        None => {
            let g0 = match pair.prior0() {
                crate::model::Prior::ZeroMeanNormal { variance } => variance,
                crate::model::Prior::PointMass { .. } => unreachable!(),
            };
            let limit_bf01 = (pair.g1() / g0).sqrt();
            let p1 = pair.prior_prob_m1();
            p1 / (p1 + pair.prior_prob_m0() * limit_bf01)
        }
    }
}

/// `ȳ = a + b/√n` with a confidence bound at `ȳ − k/√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRegime<T> {
    pub a: T,
    pub b: T,
    pub k: T,
}

impl<T: Real> AsymptoticRegime<T> {
    pub fn new(a: T, b: T, k: T) -> Result<Self> {
        if k.is_nan() || k <= T::zero() || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("regime needs finite a, b and k > 0 (got a={a}, b={b}, k={k})")));
        }
        Ok(Self { a, b, k })
    }

    pub fn ybar(&self, n: T) -> T {
        self.a + self.b / n.sqrt()
    }

    pub fn data(&self, n: T) -> Result<DataSummary<T>> {
        DataSummary::from_ybar(n, self.ybar(n))
    }

    /// `a + (b − k)/√n`.
    pub fn ci_lower(&self, n: T) -> T {
        self.a + (self.b - self.k) / n.sqrt()
    }

    /// `Φ(−k)`, the large-n limit of the posterior lower-tail content.
    pub fn limit(&self) -> T {
        kernels::std_normal_cdf(-self.k)
    }

    fn prior_at_s(&self, pair: &ModelPair<T>, n: T, s: T) -> T {
        pair.continuous_prior_density(self.a + (self.b + s) / n.sqrt())
    }
}

fn require_continuous<T: Real>(regime: &AsymptoticRegime<T>, pair: &ModelPair<T>) -> Result<()> {
    if pair.is_point_null() {
        return Err(Error::NotApplicable("the prior has an atom; a continuous prior density is required".into()));
    }
    let density = pair.continuous_prior_density(regime.a);
    if density.is_nan() || density <= T::zero() {
        return Err(Error::NotApplicable(format!("prior density vanishes at a = {}", regime.a)));
    }
    Ok(())
}

/// `Pr(θ < a + (b−k)/√n | ȳ = a + b/√n)` from the conjugate posterior.
pub fn ci_content_closed_form<T: Real>(regime: &AsymptoticRegime<T>, pair: &ModelPair<T>, n: T) -> Result<T> {
    require_continuous(regime, pair)?;
    let post = model_averaged_posterior(pair, &regime.data(n)?);
    Ok(post.cdf(regime.ci_lower(n), false))
}

/// Same quantity as the ratio `E*{1(S < −k)·π(a+(b+S)/√n)} / E*{π(a+(b+S)/√n)}`
/// with `S ~ N(0, 1)`, evaluated by adaptive quadrature over S.
pub fn ci_posterior_content<T: Real>(regime: &AsymptoticRegime<T>, pair: &ModelPair<T>, n: T) -> Result<T> {
    require_continuous(regime, pair)?;
    let integrand = |s: T| kernels::std_normal_pdf(s) * regime.prior_at_s(pair, n, s);

    // In S, each prior component is a normal centred at −(b + a√n) with
    // variance n·g; its product with φ(S) is a normal with mean
    // centre/(1 + n·g) and sd below 1, so the mass lives near those means.
    let centre = -(regime.b + regime.a * n.sqrt());
    let mut breaks = vec![-regime.k, T::zero()];
    let (mut lo, mut hi) = (T::zero(), T::zero());
    for g in prior_variances(pair) {
        let m = centre / (T::one() + n * g);
        lo = lo.min(m);
        hi = hi.max(m);
        for d in [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0] {
            breaks.push(m + T::lit(d));
        }
    }
    let span = T::lit(40.0);
    let (lo, hi) = (lo - span, hi + span);
    let tol = Tolerance { abs: T::lit(1e-300), rel: T::lit(1e-12), max_subdivisions: 4000 };
    let num = quadrature::integrate(integrand, lo, -regime.k, &breaks, tol)?;
    let den = quadrature::integrate(integrand, lo, hi, &breaks, tol)?;
    Ok(num.value / den.value)
}

fn prior_variances<T: Real>(pair: &ModelPair<T>) -> Vec<T> {
    [pair.prior0(), pair.prior1()]
        .iter()
        .filter_map(|p| match *p {
            crate::model::Prior::ZeroMeanNormal { variance } => Some(variance),
            crate::model::Prior::PointMass { .. } => None,
        })
        .collect()
}

/// Monte Carlo ratio estimate with a delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub draws: u64,
    pub seed: u64,
}

const CHUNK: u64 = 1 << 16;

/// Monte Carlo version of [`ci_posterior_content`]: draws `S ~ N(0, 1)`
/// and forms the self-normalized ratio. Chunk `i` uses ChaCha8 stream `i` of
/// `seed`, so the result does not depend on thread scheduling.
pub fn ci_content_monte_carlo<T: Real>(
    regime: &AsymptoticRegime<T>,
    pair: &ModelPair<T>,
    n: T,
    draws: u64,
    seed: u64,
) -> Result<MonteCarloEstimate<T>> {
    require_continuous(regime, pair)?;
    if draws < 2 {
        return Err(Error::TooFewReplications { reps: draws, min: 2 });
    }
    let chunks = draws.div_ceil(CHUNK);
    let sums: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = CHUNK.min(draws - chunk * CHUNK);
            let mut acc = [0.0_f64; 4];
            for _ in 0..count {
                let s: f64 = StandardNormal.sample(&mut rng);
                let w = regime.prior_at_s(pair, n, T::lit(s)).as_f64();
                let hit = if s < -regime.k.as_f64() { w } else { 0.0 };
                acc[0] += hit;
                acc[1] += w;
                acc[2] += hit * hit;
                acc[3] += w * w;
            }
            acc
        })
        .collect();
    // fixed-order reduction over chunks
    let total = sums.iter().fold([0.0_f64; 4], |mut t, c| {
        for (a, b) in t.iter_mut().zip(c) {
            *a += b;
        }
        t
    });
    let m = draws as f64;
    let ratio = total[0] / total[1];
    // Var(R) ≈ E[(h − R w)²] / (N E[w]²), where h·w = h² because h ∈ {0, w}
    let mean_w = total[1] / m;
    let resid = (total[2] * (1.0 - 2.0 * ratio) + ratio * ratio * total[3]) / m;
    let std_error = (resid.max(0.0) / m).sqrt() / mean_w;
    Ok(MonteCarloEstimate { value: T::lit(ratio), std_error: T::lit(std_error), draws, seed })
}

/// One point of the exclusion-probability sweep at a fixed one-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionPoint<T> {
    pub n: T,
    pub z: T,
    pub lower: T,
    pub upper: T,
    /// `1 − γ`, the probability of excluding θ₀; `None` when α is outside the jump.
    pub exclusion_prob: Option<T>,
}

/// `z` such that the one-sided p-value against `H₀: θ < θ₀` equals `p`.
pub fn z_for_p_value<T: Real>(p: T, n: T, null_location: T) -> Result<T> {
    Ok(n.sqrt() * null_location - kernels::std_normal_quantile(p)?)
}

/// `(n, 1 − γ(n))` for data held at one-sided p-value `p`.
pub fn jl_exclusion_curve<T: Real>(
    pair: &ModelPair<T>,
    p: T,
    alpha: T,
    n_grid: &[T],
) -> Result<Vec<ExclusionPoint<T>>> {
    if !pair.is_point_null() {
        return Err(Error::InvalidModel("the exclusion curve needs a point-null M0".into()));
    }
    n_grid
        .iter()
        .map(|&n| {
            let z = z_for_p_value(p, n, pair.null_location())?;
            let post = model_averaged_posterior(pair, &DataSummary::from_z(n, z)?);
            let jump = post.incredibility_interval();
            let exclusion_prob = stochastic_bound(&post, alpha).ok().map(|b| T::one() - b.prob_a);
            Ok(ExclusionPoint { n, z, lower: jump.lower, upper: jump.upper, exclusion_prob })
        })
        .collect()
}

/// Largest integer `n ≤ n_max` such that a quantile at level α exists for
/// every sample size `1..=n` with z held fixed. `None` if it fails already at `n = 1`.
pub fn largest_n_with_quantile<T: Real>(pair: &ModelPair<T>, z: T, alpha: T, n_max: u64) -> Result<Option<u64>> {
    let mut last = None;
    for n in 1..=n_max {
        let data = DataSummary::from_z(T::from_u64(n).expect("n fits the scalar"), z)?;
        let jump = model_averaged_posterior(pair, &data).incredibility_interval();
        if jump.contains_strictly(alpha) {
            break;
        }
        last = Some(n);
    }
    Ok(last)
}
