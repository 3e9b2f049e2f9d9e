//! Frequentist confidence bounds, conventional credible intervals and the
//! randomized ("stochastic") credible intervals needed when a requested level
//! falls inside the CDF jump.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels;
use crate::model::DataSummary;
use crate::posterior::{IncredibilityInterval, ModelAveragedPosterior, QuantileResult};
use crate::scalar::Real;

/// Lower bound of the upper one-sided `(1 − A)` confidence interval,
/// `ȳ − Φ⁻¹(1 − A)/√n`.
pub fn frequentist_ci_lower<T: Real>(data: &DataSummary<T>, a: T) -> Result<T> {
    if !(a > T::zero() && a < T::one()) {
        return Err(Error::Domain(format!("confidence tail must lie in (0, 1), got {a}")));
    }
    let q = -kernels::std_normal_quantile(a)?;
    Ok(data.ybar() - q / data.n().sqrt())
}

/// `[lower, ∞)`, or `(lower, ∞)` when `lower_open`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSidedInterval<T> {
    pub lower: T,
    pub lower_open: bool,
    pub level: T,
}

impl<T: Real> OneSidedInterval<T> {
    pub fn contains(&self, theta: T) -> bool {
        if self.lower_open {
            theta > self.lower
        } else {
            theta >= self.lower
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OneSidedCredible<T> {
    Interval(OneSidedInterval<T>),
    /// No `(1 − α)` interval exists. The two nearest achievable intervals are
    /// `[θ₀, ∞)` at level `closed_level` and `(θ₀, ∞)` at level `open_level`.
    Undefined {
        jump: IncredibilityInterval<T>,
        closed_level: T,
        open_level: T,
    },
}

/// Upper one-sided `(1 − α)` credible interval `[θ*, ∞)` with `Pr(θ < θ*) = α`.
pub fn credible_one_sided<T: Real>(post: &ModelAveragedPosterior<T>, alpha: T) -> Result<OneSidedCredible<T>> {
    let level = T::one() - alpha;
    Ok(match post.quantile(alpha)? {
        QuantileResult::Exact(lower) => {
            OneSidedCredible::Interval(OneSidedInterval { lower, lower_open: false, level })
        }
        QuantileResult::AtAtom { location, open } => {
            OneSidedCredible::Interval(OneSidedInterval { lower: location, lower_open: open, level })
        }
        QuantileResult::InsideJump(jump) => {
            OneSidedCredible::Undefined { jump, closed_level: T::one() - jump.lower, open_level: T::one() - jump.upper }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degenerate<T> {
    No,
    SinglePoint(T),
    Empty,
}

/// `[lower, upper)` by default; the flags record where an endpoint sits on
/// the atom and takes the other bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSidedInterval<T> {
    pub lower: T,
    pub upper: T,
    pub lower_open: bool,
    pub upper_closed: bool,
    pub level: T,
    pub degenerate: Degenerate<T>,
}

impl<T: Real> TwoSidedInterval<T> {
    pub fn contains(&self, theta: T) -> bool {
        match self.degenerate {
            Degenerate::Empty => false,
            Degenerate::SinglePoint(p) => theta == p,
            Degenerate::No => {
                let above = if self.lower_open { theta > self.lower } else { theta >= self.lower };
                let below = if self.upper_closed { theta <= self.upper } else { theta < self.upper };
                above && below
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoSidedCredible<T> {
    Interval(TwoSidedInterval<T>),
    /// At least one tail level lies inside the jump.
    Undefined {
        lower_tail: QuantileResult<T>,
        upper_tail: QuantileResult<T>,
    },
}

/// Equal-tailed `(1 − α)` credible interval from the `α/2` and `1 − α/2` quantiles.
pub fn credible_two_sided<T: Real>(post: &ModelAveragedPosterior<T>, alpha: T) -> Result<TwoSidedCredible<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {alpha}")));
    }
    let half = alpha * T::lit(0.5);
    let lower_tail = post.quantile(half)?;
    let upper_tail = post.quantile(T::one() - half)?;
    Ok(match (lower_tail.bound(), upper_tail.bound()) {
        (Some((lower, lower_open)), Some((upper, upper_open))) => TwoSidedCredible::Interval(build_two_sided(
            lower,
            lower_open,
            upper,
            // θᵘ* = θ₀⁺ means Pr(θ < θᵘ*) includes the atom, so the atom is inside
            upper_open,
            T::one() - alpha,
        )),
        _ => TwoSidedCredible::Undefined { lower_tail, upper_tail },
    })
}

fn build_two_sided<T: Real>(lower: T, lower_open: bool, upper: T, upper_closed: bool, level: T) -> TwoSidedInterval<T> {
    let degenerate = if lower < upper {
        Degenerate::No
    } else if lower == upper && !lower_open && upper_closed {
        Degenerate::SinglePoint(lower)
    } else {
        Degenerate::Empty
    };
    TwoSidedInterval { lower, upper, lower_open, upper_closed, level, degenerate }
}

/// A boundary value with its bracket: `open = false` means the boundary point
/// itself belongs to the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary<T> {
    pub value: T,
    pub open: bool,
}

/// Randomized lower bound: `value_a` with probability `prob_a` (γ), else `value_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticBound<T> {
    pub value_a: Boundary<T>,
    pub value_b: Boundary<T>,
    pub prob_a: T,
    pub jump: IncredibilityInterval<T>,
    pub alpha: T,
}

impl<T: Real> StochasticBound<T> {
    /// Expected `Pr(θ < θ*|data)` over the randomization:
    /// `γ·Pr(θ<θ₀) + (1−γ)·Pr(θ≤θ₀)`, equal to α up to rounding.
    pub fn expected_lower_tail(&self) -> T {
        self.prob_a * self.jump.lower + (T::one() - self.prob_a) * self.jump.upper
    }

    /// Draws the boundary using a caller-owned random stream.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Boundary<T> {
        let u: f64 = rng.random();
        if T::lit(u) < self.prob_a {
            self.value_a
        } else {
            self.value_b
        }
    }
}

/// Stochastic lower bound for α inside `[Pr(θ<θ₀), Pr(θ≤θ₀)]`:
/// `θ* = θ₀` (closed) with probability `γ = (α − Pr(θ≤θ₀))/(Pr(θ<θ₀) − Pr(θ≤θ₀))`,
/// otherwise `θ₀⁺` (open).
pub fn stochastic_bound<T: Real>(post: &ModelAveragedPosterior<T>, alpha: T) -> Result<StochasticBound<T>> {
    let jump = post.incredibility_interval();
    let location = match post.atom_location() {
        Some(l) => l,
        None => {
            return Err(Error::LevelOutsideJump {
                alpha: alpha.as_f64(),
                lower: jump.lower.as_f64(),
                upper: jump.upper.as_f64(),
            })
        }
    };
    if !jump.contains(alpha) {
        return Err(Error::LevelOutsideJump {
            alpha: alpha.as_f64(),
            lower: jump.lower.as_f64(),
            upper: jump.upper.as_f64(),
        });
    }
    let gamma = (alpha - jump.upper) / (jump.lower - jump.upper);
    let gamma = gamma.max(T::zero()).min(T::one());
    Ok(StochasticBound {
        value_a: Boundary { value: location, open: false },
        value_b: Boundary { value: location, open: true },
        prob_a: gamma,
        jump,
        alpha,
    })
}

/// Randomized equal-tailed interval when both tail levels sit in the jump:
/// `{θ₀}` with probability ψ, `∅` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticTwoSided<T> {
    pub prob_point: T,
    pub point: T,
    pub atom_mass: T,
    pub alpha: T,
}

impl<T: Real> StochasticTwoSided<T> {
    /// Expected posterior content of the realized set, `ψ·Pr(θ = θ₀|data)`.
    pub fn expected_content(&self) -> T {
        self.prob_point * self.atom_mass
    }

    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> TwoSidedInterval<T> {
        let u: f64 = rng.random();
        let degenerate =
            if T::lit(u) < self.prob_point { Degenerate::SinglePoint(self.point) } else { Degenerate::Empty };
        TwoSidedInterval {
            lower: self.point,
            upper: self.point,
            lower_open: false,
            upper_closed: matches!(degenerate, Degenerate::SinglePoint(_)),
            level: T::one() - self.alpha,
            degenerate,
        }
    }
}

/// `ψ = (Pr(θ=θ₀|data) − α)/(2·Pr(θ=θ₀|data) − 1)`, defined only when both `α/2`
/// and `1 − α/2` lie inside the incredibility interval.
pub fn stochastic_two_sided<T: Real>(post: &ModelAveragedPosterior<T>, alpha: T) -> Result<StochasticTwoSided<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {alpha}")));
    }
    let jump = post.incredibility_interval();
    let half = alpha * T::lit(0.5);
    let lower_in = jump.contains(half);
    let upper_in = jump.contains(T::one() - half);
    if post.atom_location().is_none() || !(lower_in && upper_in) {
        let which = match (lower_in, upper_in) {
            (false, false) => "both tails",
            (false, true) => "lower tail",
            _ => "upper tail",
        };
        return Err(Error::TailOutsideJump(format!(
            "{which} outside [{}, {}] (tail levels {} and {})",
            jump.lower,
            jump.upper,
            half,
            T::one() - half
        )));
    }
    let mass = post.atom_mass();
    let psi = (mass - alpha) / (T::lit(2.0) * mass - T::one());
    if !(psi >= T::zero() && psi <= T::one()) {
        return Err(Error::MixingOutOfRange { what: "psi", value: psi.as_f64() });
    }
    Ok(StochasticTwoSided { prob_point: psi, point: jump.atom_location, atom_mass: mass, alpha })
}

/// Posterior probability of a realized two-sided interval.
pub fn two_sided_content<T: Real>(post: &ModelAveragedPosterior<T>, interval: &TwoSidedInterval<T>) -> T {
    match interval.degenerate {
        Degenerate::Empty => T::zero(),
        Degenerate::SinglePoint(p) if post.atom_location() == Some(p) => post.atom_mass(),
        Degenerate::SinglePoint(_) => T::zero(),
        // Pr(θ ≥ l) = 1 − Pr(θ < l), Pr(θ > l) = 1 − Pr(θ ≤ l)
        Degenerate::No => {
            post.cdf(interval.upper, interval.upper_closed) - post.cdf(interval.lower, interval.lower_open)
        }
    }
}

impl<T: Real> TailSpec<T> {
    /// The boundary with the larger (`widest = true`) or smaller interval for this tail.
    fn extreme(&self, lower_tail: bool, widest: bool) -> Boundary<T> {
        match self {
            TailSpec::Fixed(b) => *b,
            // value_a is closed at θ₀: it keeps θ₀ for a lower tail and drops it for an upper one
            TailSpec::Stochastic(s) => {
                if lower_tail == widest {
                    s.value_a
                } else {
                    s.value_b
                }
            }
        }
    }
}

/// One tail of an equal-tailed interval: either fixed or randomized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailSpec<T> {
    Fixed(Boundary<T>),
    Stochastic(StochasticBound<T>),
}

/// Per-tail construction of an equal-tailed interval. A tail whose level is
/// inside the jump gets a γ-randomized boundary; the other tail stays fixed.
/// This covers the case where only one tail level is inside the jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerTailTwoSided<T> {
    pub lower: TailSpec<T>,
    pub upper: TailSpec<T>,
    pub alpha: T,
}

pub fn per_tail_two_sided<T: Real>(post: &ModelAveragedPosterior<T>, alpha: T) -> Result<PerTailTwoSided<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {alpha}")));
    }
    let half = alpha * T::lit(0.5);
    let tail = |level: T| -> Result<TailSpec<T>> {
        match post.quantile(level)? {
            QuantileResult::InsideJump(_) => Ok(TailSpec::Stochastic(stochastic_bound(post, level)?)),
            q => {
                let (value, open) = q.bound().expect("quantile exists outside the jump");
                Ok(TailSpec::Fixed(Boundary { value, open }))
            }
        }
    };
    Ok(PerTailTwoSided { lower: tail(half)?, upper: tail(T::one() - half)?, alpha })
}

impl<T: Real> PerTailTwoSided<T> {
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> TwoSidedInterval<T> {
        let mut draw = |spec: &TailSpec<T>| match spec {
            TailSpec::Fixed(b) => *b,
            TailSpec::Stochastic(s) => s.realize(rng),
        };
        let lo = draw(&self.lower);
        let hi = draw(&self.upper);
        // an upper boundary at θ₀⁺ (open flag) keeps θ₀ inside
        build_two_sided(lo.value, lo.open, hi.value, hi.open, T::one() - self.alpha)
    }
}

impl<T: Real> PerTailTwoSided<T> {
    /// Contents of the smallest and largest intervals the randomization can produce.
    pub fn content_range(&self, post: &ModelAveragedPosterior<T>) -> (T, T) {
        let level = T::one() - self.alpha;
        let build = |widest: bool| {
            let lo = self.lower.extreme(true, widest);
            let hi = self.upper.extreme(false, widest);
            build_two_sided(lo.value, lo.open, hi.value, hi.open, level)
        };
        (two_sided_content(post, &build(false)), two_sided_content(post, &build(true)))
    }
}

/// Draws a `(1 − α)` one-sided lower bound, deterministic when the quantile
/// exists and γ-randomized inside the jump.
pub fn realize_one_sided<T: Real, R: Rng + ?Sized>(
    post: &ModelAveragedPosterior<T>,
    alpha: T,
    rng: &mut R,
) -> Result<Boundary<T>> {
    match post.quantile(alpha)? {
        QuantileResult::InsideJump(_) => Ok(stochastic_bound(post, alpha)?.realize(rng)),
        q => {
            let (value, open) = q.bound().expect("quantile exists outside the jump");
            Ok(Boundary { value, open })
        }
    }
}
